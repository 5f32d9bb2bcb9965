#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "pcbf/core/errors.hpp"

namespace pcbf {

namespace detail {

class Sha256 {
  public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
            throw IoFailure("sha256: digest init failed");
        }
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t len) {
        if (EVP_DigestUpdate(ctx_, data, len) != 1) throw IoFailure("sha256: update failed");
    }

    std::array<unsigned char, 32> finish() {
        std::array<unsigned char, 32> out{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_, out.data(), &len) != 1 || len != out.size()) {
            throw IoFailure("sha256: final failed");
        }
        return out;
    }

  private:
    EVP_MD_CTX* ctx_;
};

inline std::string hex(const std::array<unsigned char, 32>& digest) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(64, '0');
    for (std::size_t i = 0; i < digest.size(); ++i) {
        out[2 * i] = kDigits[digest[i] >> 4];
        out[2 * i + 1] = kDigits[digest[i] & 0x0f];
    }
    return out;
}

}  // namespace detail

inline std::array<unsigned char, 32> sha256_digest(std::string_view bytes) {
    detail::Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.finish();
}

inline std::string sha256_hex(std::string_view bytes) { return detail::hex(sha256_digest(bytes)); }

inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("sha256_file: cannot open " + path.string());
    detail::Sha256 h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) throw IoFailure("sha256_file: read failed on " + path.string());
    return detail::hex(h.finish());
}

}  // namespace pcbf
