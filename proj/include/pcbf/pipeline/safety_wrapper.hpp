#pragma once

#include <span>
#include <vector>

#include "pcbf/env/vec_env.hpp"
#include "pcbf/safety/filter.hpp"

namespace pcbf {

struct WrappedStepResult {
    StepResult env_step;
    SafetyFilterResult filter;
};

// Interposes the safety filter between a policy and the env: every nominal
// action is projected against the barrier constraints of the pre-step state
// before the env integrates it. The wrapper also installs its barrier
// parameters as the env's metric parameters so logged min_h_soft uses the
// same predictive margin the filter enforces.
class SafetyWrapper {
  public:
    SafetyWrapper(AvoidanceEnv& env, const BarrierParams& params) : env_(env), params_(params) {
        params_.validate();
        if (params_.v_max != env.config().v_max) {
            throw InvalidConfig("SafetyWrapper: filter v_max must equal env v_max");
        }
        env_.set_metric_params(params_);
    }

    ResetResult reset(std::uint64_t seed) {
        ResetResult r = env_.reset(seed);
        last_observation_ = r.observation;
        return r;
    }

    WrappedStepResult step(Vec2 nominal) {
        const SafetyState pre = env_.safety_state();
        const SafetyFilterResult f = filter_action(last_observation_, nominal, pre, params_);
        StepResult sr = env_.step(f.safe_action);
        last_observation_ = sr.observation;
        return {std::move(sr), f};
    }

    AvoidanceEnv& env() { return env_; }
    const AvoidanceEnv& env() const { return env_; }
    const BarrierParams& params() const { return params_; }

  private:
    AvoidanceEnv& env_;
    BarrierParams params_;
    std::vector<double> last_observation_;
};

// Vectorized counterpart; runs the batch filter over the pre-step states of
// all sub-envs. A geometry fault in any element aborts the whole batch by
// rethrowing the element's error, since the env's collision termination
// should make such states unreachable.
class VecSafetyWrapper {
  public:
    VecSafetyWrapper(AvoidanceVecEnv& envs, const BarrierParams& params)
        : envs_(envs), params_(params) {
        params_.validate();
        for (int i = 0; i < envs_.size(); ++i) {
            if (params_.v_max != envs_.env(i).config().v_max) {
                throw InvalidConfig("VecSafetyWrapper: filter v_max must equal env v_max");
            }
            envs_.env(i).set_metric_params(params_);
        }
    }

    std::vector<ResetResult> vec_reset(std::uint64_t seed) {
        std::vector<ResetResult> out = envs_.vec_reset(seed);
        observations_.clear();
        for (const ResetResult& r : out) observations_.push_back(r.observation);
        return out;
    }

    std::vector<WrappedStepResult> vec_step(std::span<const Vec2> nominals) {
        const std::vector<SafetyState> states = envs_.vec_safety_states();
        const std::vector<FilterBatchEntry> filtered =
            filter_action_batch(observations_, nominals, states, params_);
        std::vector<Vec2> safe;
        safe.reserve(filtered.size());
        for (std::size_t i = 0; i < filtered.size(); ++i) {
            const FilterBatchEntry& e = filtered[i];
            if (!e.ok()) {
                if (*e.fault == FilterFault::degenerate_geometry) throw DegenerateGeometry(e.message);
                throw InfeasibleConstraints(e.message);
            }
            safe.push_back(e.result->safe_action);
        }
        std::vector<StepResult> stepped = envs_.vec_step(safe);
        std::vector<WrappedStepResult> out;
        out.reserve(stepped.size());
        for (std::size_t i = 0; i < stepped.size(); ++i) {
            observations_[i] = stepped[i].observation;
            out.push_back({std::move(stepped[i]), *filtered[i].result});
        }
        return out;
    }

    AvoidanceVecEnv& envs() { return envs_; }
    const BarrierParams& params() const { return params_; }

  private:
    AvoidanceVecEnv& envs_;
    BarrierParams params_;
    std::vector<std::vector<double>> observations_;
};

}  // namespace pcbf
