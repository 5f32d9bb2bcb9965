#pragma once

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include <fcntl.h>
#include <unistd.h>

#include "pcbf/core/errors.hpp"

namespace pcbf {

// Protocol boundaries exposed for crash-injection tests. A hook that throws
// simulates a crash at that point: nothing later in the protocol runs and no
// cleanup happens, exactly as a real crash would leave the filesystem.
enum class WritePhase {
    before_tmp_write,
    after_tmp_write,
    after_fsync,
    after_rename,
};

struct WriteHooks {
    std::function<void(WritePhase)> at;

    void fire(WritePhase p) const {
        if (at) at(p);
    }
};

namespace detail {

inline void throw_errno(const std::string& what, const std::filesystem::path& p) {
    throw IoFailure(what + " " + p.string() + ": " + std::strerror(errno));
}

class Fd {
  public:
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() {
        if (fd_ >= 0) ::close(fd_);
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    int get() const { return fd_; }
    int release() {
        const int fd = fd_;
        fd_ = -1;
        return fd;
    }

  private:
    int fd_;
};

}  // namespace detail

// Crash-safe replace-on-write: stage the full content at <path>.tmp, fsync,
// rename onto path, fsync the directory. A reader of path sees either the
// complete old bytes or the complete new bytes, never a torn state.
// Concurrent writes to distinct paths are independent; concurrent writes to
// the same path resolve to whichever rename lands last.
inline void atomic_write(const std::filesystem::path& path, std::string_view bytes,
                         const WriteHooks& hooks = {}) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp";
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");

    hooks.fire(WritePhase::before_tmp_write);

    {
        detail::Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644));
        if (fd.get() < 0) detail::throw_errno("atomic_write: cannot create", tmp);

        std::size_t off = 0;
        while (off < bytes.size()) {
            const ssize_t n = ::write(fd.get(), bytes.data() + off, bytes.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                ::unlink(tmp.c_str());
                detail::throw_errno("atomic_write: write failed on", tmp);
            }
            off += static_cast<std::size_t>(n);
        }

        hooks.fire(WritePhase::after_tmp_write);

        if (::fsync(fd.get()) != 0) {
            ::unlink(tmp.c_str());
            detail::throw_errno("atomic_write: fsync failed on", tmp);
        }
    }

    hooks.fire(WritePhase::after_fsync);

    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        ::unlink(tmp.c_str());
        detail::throw_errno("atomic_write: rename failed onto", path);
    }

    hooks.fire(WritePhase::after_rename);

    {
        detail::Fd dfd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY));
        if (dfd.get() < 0) detail::throw_errno("atomic_write: cannot open directory", dir);
        if (::fsync(dfd.get()) != 0) detail::throw_errno("atomic_write: directory fsync failed for", dir);
    }
}

}  // namespace pcbf
