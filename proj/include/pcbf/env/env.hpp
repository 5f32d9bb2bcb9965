#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcbf/env/config.hpp"
#include "pcbf/safety/barriers.hpp"

namespace pcbf {

enum class TerminationReason {
    success,
    collision,
    out_of_arena,
    timeout,
};

inline constexpr TerminationReason kAllTerminationReasons[] = {
    TerminationReason::success, TerminationReason::collision, TerminationReason::out_of_arena,
    TerminationReason::timeout};

inline const char* termination_reason_name(TerminationReason r) {
    switch (r) {
        case TerminationReason::success: return "success";
        case TerminationReason::collision: return "collision";
        case TerminationReason::out_of_arena: return "out_of_arena";
        case TerminationReason::timeout: return "timeout";
    }
    return "?";
}

inline TerminationReason parse_termination_reason(const std::string& s) {
    for (TerminationReason r : kAllTerminationReasons) {
        if (s == termination_reason_name(r)) return r;
    }
    throw InvalidConfig("unknown termination reason \"" + s + "\"");
}

struct ResetResult {
    std::vector<double> observation;
    SafetyState safety;
};

struct StepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
    std::optional<TerminationReason> reason;
    SafetyState safety;
};

// Single-integrator 2D avoidance task. The commanded velocity is clipped to
// the action box and integrated for dt; dynamic obstacles drift and reflect
// off the arena walls. Termination classes are checked in a fixed order
// (collision, out_of_arena, success, timeout) so simultaneous conditions
// resolve deterministically; timeout truncates rather than terminates.
//
// Per-step reward is goal progress (previous distance minus new distance),
// plus a terminal bonus of +10 success / -10 collision / -5 out_of_arena /
// 0 timeout; |reward| <= sqrt(2)*v_max*dt + 10.
class AvoidanceEnv {
  public:
    static constexpr int kObservationSize = 9;

    explicit AvoidanceEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

    ResetResult reset() { return reset(cfg_.seed); }

    // Deterministic per (config, seed); randomized scene families are
    // regenerated from the seed on every reset.
    ResetResult reset(std::uint64_t seed) {
        if (cfg_.scene.obstacles) {
            obstacles_ = *cfg_.scene.obstacles;
        } else {
            Rng rng(mix_seed(seed, 0x5ce9eULL));
            obstacles_ = generate_scene(cfg_.scene.type, rng, geometry());
        }
        pos_ = cfg_.spawn_position;
        vel_ = {0.0, 0.0};
        steps_ = 0;
        terminated_ = truncated_ = false;
        reason_.reset();
        violations_ = 0;
        const SafetyState st = safety_state();
        if (h_hard(st) < 0.0) throw InvalidConfig("reset: spawn overlaps an obstacle");
        min_h_hard_ = h_hard(st);
        min_h_soft_ = metric_h_soft(st);
        return {observe(st), st};
    }

    StepResult step(Vec2 action) {
        if (terminated_ || truncated_) throw SteppedAfterTermination("step: episode already ended");
        if (!is_finite(action)) throw InvalidConfig("step: action must be finite");

        const double prev_goal_dist = distance(pos_, cfg_.goal_position);
        vel_ = clamp_box(action, cfg_.v_max);
        pos_ += cfg_.dt * vel_;
        advance_obstacles();
        ++steps_;

        const SafetyState st = safety_state();
        const double h = h_hard(st);
        min_h_hard_ = std::min(min_h_hard_, h);
        min_h_soft_ = std::min(min_h_soft_, metric_h_soft(st));
        if (h < 0.0) ++violations_;

        const double goal_dist = distance(pos_, cfg_.goal_position);
        double reward = prev_goal_dist - goal_dist;

        StepResult out;
        if (h < 0.0) {
            terminated_ = true;
            reason_ = TerminationReason::collision;
            reward += -10.0;
        } else if (std::abs(pos_.x) > cfg_.arena_half_extent || std::abs(pos_.y) > cfg_.arena_half_extent) {
            terminated_ = true;
            reason_ = TerminationReason::out_of_arena;
            reward += -5.0;
        } else if (goal_dist <= cfg_.goal_radius) {
            terminated_ = true;
            reason_ = TerminationReason::success;
            reward += 10.0;
        } else if (steps_ >= cfg_.max_steps) {
            truncated_ = true;
            reason_ = TerminationReason::timeout;
        }

        out.observation = observe(st);
        out.reward = reward;
        out.terminated = terminated_;
        out.truncated = truncated_;
        out.reason = reason_;
        out.safety = st;
        return out;
    }

    // Relative state against the most critical obstacle (smallest h_hard);
    // obstacle-free scenes report the far sentinel so the filter still runs.
    SafetyState safety_state() const {
        const Obstacle& ob = critical_obstacle();
        return SafetyState{pos_ - ob.center, vel_, ob.velocity, cfg_.drone_radius, ob.radius};
    }

    std::map<std::string, double> safety_metrics() const {
        return {{"min_h_hard", min_h_hard_},
                {"min_h_soft", min_h_soft_},
                {"distance_to_goal", distance(pos_, cfg_.goal_position)}};
    }

    struct ViolationRecord {
        int count = 0;
    };

    // Steps of the current episode that ended with h_hard < 0. Nonzero only
    // when actions bypass the safety filter.
    ViolationRecord hard_constraint_violations() const { return {violations_}; }

    // Barrier parameters used only for the min_h_soft metric; installed by
    // the safety wrapper. Without them the metric degrades to plain
    // clearance (zero predictive margin).
    void set_metric_params(const BarrierParams& p) {
        p.validate();
        metric_params_ = p;
    }

    const EnvConfig& config() const { return cfg_; }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    bool done() const { return terminated_ || truncated_; }
    int step_count() const { return steps_; }
    Vec2 position() const { return pos_; }
    Vec2 velocity() const { return vel_; }

  private:
    SceneGeometry geometry() const {
        return {cfg_.spawn_position, cfg_.goal_position, cfg_.arena_half_extent, cfg_.drone_radius,
                cfg_.goal_radius};
    }

    const Obstacle& critical_obstacle() const {
        if (obstacles_.empty()) {
            static const Obstacle sentinel = sentinel_obstacle();
            return sentinel;
        }
        std::size_t best = 0;
        double best_h = obstacle_h(obstacles_[0]);
        for (std::size_t i = 1; i < obstacles_.size(); ++i) {
            const double h = obstacle_h(obstacles_[i]);
            if (h < best_h) {
                best = i;
                best_h = h;
            }
        }
        return obstacles_[best];
    }

    double obstacle_h(const Obstacle& ob) const {
        const double R = cfg_.drone_radius + ob.radius;
        return squared_norm(pos_ - ob.center) - R * R;
    }

    double metric_h_soft(const SafetyState& st) const {
        if (metric_params_) return h_soft(st, *metric_params_);
        return norm(st.rel_position) - effective_radius(st);
    }

    void advance_obstacles() {
        const double A = cfg_.arena_half_extent;
        for (Obstacle& ob : obstacles_) {
            if (ob.velocity == Vec2{0.0, 0.0}) continue;
            ob.center += cfg_.dt * ob.velocity;
            const auto reflect = [&](double& c, double& v) {
                if (c + ob.radius > A) {
                    c = 2.0 * (A - ob.radius) - c;
                    v = -v;
                } else if (c - ob.radius < -A) {
                    c = 2.0 * (-A + ob.radius) - c;
                    v = -v;
                }
            };
            reflect(ob.center.x, ob.velocity.x);
            reflect(ob.center.y, ob.velocity.y);
        }
    }

    std::vector<double> observe(const SafetyState& st) const {
        const Obstacle& ob = critical_obstacle();
        (void)st;
        return {pos_.x,
                pos_.y,
                vel_.x,
                vel_.y,
                cfg_.goal_position.x - pos_.x,
                cfg_.goal_position.y - pos_.y,
                ob.center.x - pos_.x,
                ob.center.y - pos_.y,
                ob.radius};
    }

    EnvConfig cfg_;
    std::vector<Obstacle> obstacles_;
    Vec2 pos_;
    Vec2 vel_;
    int steps_ = 0;
    bool terminated_ = false;
    bool truncated_ = false;
    std::optional<TerminationReason> reason_;
    int violations_ = 0;
    double min_h_hard_ = 0.0;
    double min_h_soft_ = 0.0;
    std::optional<BarrierParams> metric_params_;
};

}  // namespace pcbf
