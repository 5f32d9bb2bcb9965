#pragma once

#include <span>
#include <vector>

#include "pcbf/env/env.hpp"

namespace pcbf {

// N independent copies of the scalar env stepped in index order, so results
// are bit-identical to running each env alone. Sub-env i resets with
// seed + i. No auto-reset: stepping any finished sub-env is an error and the
// caller decides when to reset.
class AvoidanceVecEnv {
  public:
    AvoidanceVecEnv(const EnvConfig& base, int num_envs) {
        if (num_envs < 1) throw InvalidConfig("AvoidanceVecEnv: num_envs must be >= 1");
        envs_.reserve(static_cast<std::size_t>(num_envs));
        for (int i = 0; i < num_envs; ++i) envs_.emplace_back(base);
    }

    int size() const { return static_cast<int>(envs_.size()); }
    AvoidanceEnv& env(int i) { return envs_.at(static_cast<std::size_t>(i)); }
    const AvoidanceEnv& env(int i) const { return envs_.at(static_cast<std::size_t>(i)); }

    std::vector<ResetResult> vec_reset(std::uint64_t seed) {
        std::vector<ResetResult> out;
        out.reserve(envs_.size());
        for (std::size_t i = 0; i < envs_.size(); ++i) {
            out.push_back(envs_[i].reset(seed + i));
        }
        return out;
    }

    std::vector<StepResult> vec_step(std::span<const Vec2> actions) {
        if (actions.size() != envs_.size()) {
            throw BatchShapeMismatch("vec_step: " + std::to_string(actions.size()) + " actions for " +
                                     std::to_string(envs_.size()) + " envs");
        }
        for (std::size_t i = 0; i < envs_.size(); ++i) {
            if (envs_[i].done()) {
                throw SteppedAfterTermination("vec_step: sub-env " + std::to_string(i) +
                                              " already ended; reset before stepping");
            }
        }
        std::vector<StepResult> out;
        out.reserve(envs_.size());
        for (std::size_t i = 0; i < envs_.size(); ++i) {
            out.push_back(envs_[i].step(actions[i]));
        }
        return out;
    }

    std::vector<SafetyState> vec_safety_states() const {
        std::vector<SafetyState> out;
        out.reserve(envs_.size());
        for (const AvoidanceEnv& e : envs_) out.push_back(e.safety_state());
        return out;
    }

  private:
    std::vector<AvoidanceEnv> envs_;
};

}  // namespace pcbf
