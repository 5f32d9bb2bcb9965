#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcbf/core/jsonio.hpp"
#include "pcbf/env/env.hpp"

namespace pcbf {

// Opaque per-sequence recurrent state, threaded through predict calls.
// Stateless policies return it unchanged.
using Hidden = std::vector<double>;

struct PredictResult {
    Vec2 action;
    std::optional<Hidden> hidden;
};

struct LearnReport {
    std::string algorithm;
    std::string status;
    int steps_processed = 0;
};

// Full serializable snapshot: parameter blob, RNG stream state, and any
// recurrent carryover.
struct AlgorithmState {
    std::string kind;
    json parameters;
    std::string rng_state;
    std::optional<Hidden> hidden_state;
};

class Algorithm {
  public:
    virtual ~Algorithm() = default;

    virtual std::string name() const = 0;

    virtual PredictResult predict(std::span<const double> observation,
                                  const std::optional<Hidden>& hidden) = 0;

    // Baseline policies do not train; the report says so rather than
    // pretending progress happened.
    virtual LearnReport learn(AvoidanceEnv& env) {
        (void)env;
        return {name(), "no-op: policy has no trainable parameters", 0};
    }

    virtual AlgorithmState state() const = 0;
    virtual void restore(const AlgorithmState& s) = 0;
};

}  // namespace pcbf
