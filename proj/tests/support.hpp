#pragma once

// Shared helpers for the test binaries: process spawning, temp dirs, a
// counting recurrent policy, and a brute-force grid oracle for the
// two-constraint projection.

#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "pcbf/algo/algorithm.hpp"
#include "pcbf/core/vec2.hpp"
#include "pcbf/safety/types.hpp"

namespace pcbf::testing {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

// Runs a shell command, capturing combined output. Only for spawning the
// project's own binaries in tests.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult result;
  const std::string full = cmd + " 2>&1";
  FILE* pipe = ::popen(full.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buf{};
  size_t n = 0;
  while ((n = ::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.output.append(buf.data(), n);
  }
  const int status = ::pclose(pipe);
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  }
  return result;
}

// Scratch root for test artifacts. atomic_write fsyncs every file, which is
// painfully slow on disk-backed filesystems, so prefer tmpfs when present.
inline const std::filesystem::path& scratch_root() {
  static const std::filesystem::path root = [] {
    if (const char* env = std::getenv("TMPDIR"); env != nullptr && *env != '\0') {
      return std::filesystem::path(env);
    }
    std::error_code ec;
    const std::filesystem::path shm{"/dev/shm"};
    if (std::filesystem::is_directory(shm, ec)) return shm;
    return std::filesystem::temp_directory_path();
  }();
  return root;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    const unsigned id = counter.fetch_add(1);
    path_ = scratch_root() / (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(id));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void spew(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Recurrent stub: hidden state is a single counter incremented per predict.
class CountingPolicy final : public Algorithm {
 public:
  std::string name() const override { return "counting"; }

  PredictResult predict(std::span<const double> /*observation*/,
                        const std::optional<Hidden>& hidden) override {
    double count = 0.0;
    if (hidden.has_value() && !hidden->empty()) count = hidden->front();
    PredictResult out;
    out.action = Vec2{0.1, -0.1};
    out.hidden = Hidden{count + 1.0};
    return out;
  }

  AlgorithmState state() const override {
    AlgorithmState s;
    s.kind = "counting";
    s.parameters = nlohmann::json::object();
    s.rng_state = "";
    return s;
  }

  void restore(const AlgorithmState& /*state*/) override {}
};

// Brute-force oracle: minimal-deviation point over a uniform grid on
// [-box, box]^2 subject to two half-space constraints. Grid has
// (2*n + 1)^2 nodes. Returns the best deviation from `nominal`, or
// nullopt when no node is feasible.
inline std::optional<double> grid_best_deviation(const HalfSpace& c1,
                                                 const HalfSpace& c2,
                                                 Vec2 nominal,
                                                 double box,
                                                 int n) {
  const double pitch = box / static_cast<double>(n);
  double best_sq = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int ix = -n; ix <= n; ++ix) {
    const double x = static_cast<double>(ix) * pitch;
    const double dx2 = (x - nominal.x) * (x - nominal.x);
    if (dx2 >= best_sq) continue;  // no y can beat the incumbent on this column
    const double t1 = c1.normal.x * x - c1.offset;
    const double t2 = c2.normal.x * x - c2.offset;
    for (int iy = -n; iy <= n; ++iy) {
      const double y = static_cast<double>(iy) * pitch;
      if (t1 + c1.normal.y * y < 0.0) continue;
      if (t2 + c2.normal.y * y < 0.0) continue;
      const double dy = y - nominal.y;
      const double d2 = dx2 + dy * dy;
      if (d2 < best_sq) {
        best_sq = d2;
        found = true;
      }
    }
  }
  if (!found) return std::nullopt;
  return std::sqrt(best_sq);
}

}  // namespace pcbf::testing
