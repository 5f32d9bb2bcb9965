#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "pcbf/core/vec2.hpp"

namespace pcbf {

// splitmix64 step; used to derive independent substream seeds so that
// per-attempt results never depend on execution order.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ stream);
}

constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(base, a), b);
}

// mt19937_64 with a pinned 53-bit mapping to doubles so streams are
// platform-stable (std::uniform_real_distribution is not).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double unit_interval() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + unit_interval() * (hi - lo); }

    // Inclusive integer range.
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(eng_() % span);
    }

    bool bernoulli(double p) { return unit_interval() < p; }

    Vec2 in_box(double half) { return {uniform(-half, half), uniform(-half, half)}; }

    Vec2 unit_vector() {
        const double a = uniform(0.0, 2.0 * std::numbers::pi);
        return {std::cos(a), std::sin(a)};
    }

    std::mt19937_64& engine() { return eng_; }

    std::string serialize() const {
        std::ostringstream os;
        os << eng_;
        return os.str();
    }

    void restore(const std::string& s) {
        std::istringstream is(s);
        is >> eng_;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace pcbf
