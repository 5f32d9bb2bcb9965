#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "pcbf/core/errors.hpp"
#include "pcbf/core/vec2.hpp"

namespace pcbf {

// Relative kinematics of the drone against the single most critical obstacle.
// rel_position points from the obstacle center to the drone, so a growing
// norm means the drone is receding.
struct SafetyState {
    Vec2 rel_position;
    Vec2 drone_velocity;
    Vec2 obstacle_velocity;
    double drone_radius = 0.0;
    double obstacle_radius = 0.0;

    void validate() const {
        if (!is_finite(rel_position) || !is_finite(drone_velocity) || !is_finite(obstacle_velocity) ||
            !std::isfinite(drone_radius) || !std::isfinite(obstacle_radius)) {
            throw InvalidConfig("SafetyState: non-finite component");
        }
        if (drone_radius <= 0.0) throw InvalidConfig("SafetyState: drone_radius must be > 0");
        if (obstacle_radius <= 0.0) throw InvalidConfig("SafetyState: obstacle_radius must be > 0");
    }
};

struct BarrierParams {
    double alpha = 1.0;    // class-K gain on both barriers
    double tau_lag = 0.1;  // actuation lag absorbed by the predictive margin [s]
    double a_max = 2.0;    // braking deceleration bound [m/s^2]
    double v_max = 5.0;    // speed command bound; also the action-box half-extent [m/s]

    void validate() const {
        if (!std::isfinite(alpha) || !std::isfinite(tau_lag) || !std::isfinite(a_max) ||
            !std::isfinite(v_max)) {
            throw InvalidConfig("BarrierParams: non-finite component");
        }
        if (alpha <= 0.0) throw InvalidConfig("BarrierParams: alpha must be > 0");
        if (tau_lag < 0.0) throw InvalidConfig("BarrierParams: tau_lag must be >= 0");
        if (a_max <= 0.0) throw InvalidConfig("BarrierParams: a_max must be > 0");
        if (v_max <= 0.0) throw InvalidConfig("BarrierParams: v_max must be > 0");
    }
};

// Feasible set is {u : normal . u >= offset}.
struct HalfSpace {
    Vec2 normal;
    double offset = 0.0;

    double slack_at(Vec2 u) const { return dot(normal, u) - offset; }
    bool admits(Vec2 u, double slack = 0.0) const { return slack_at(u) >= -slack; }
};

struct SafetyFilterResult {
    Vec2 safe_action;
    bool modified = false;  // true iff the action moved by more than 1e-9
    double h_hard = 0.0;
    double h_soft = 0.0;
    bool active_hard = false;  // constraint tight at the returned action (1e-9)
    bool active_soft = false;
    bool box_clipped = false;  // clipping moved the projected action; the QP
                               // guarantee does not cover this step
};

enum class FilterFault {
    degenerate_geometry,
    infeasible_constraints,
};

inline const char* filter_fault_name(FilterFault f) {
    return f == FilterFault::degenerate_geometry ? "degenerate_geometry" : "infeasible_constraints";
}

// One slot of a batched filter call. Faulted elements never poison the batch.
struct FilterBatchEntry {
    std::optional<SafetyFilterResult> result;
    std::optional<FilterFault> fault;
    std::string message;

    bool ok() const { return result.has_value(); }
};

}  // namespace pcbf
