#pragma once

#include <cmath>

#include "pcbf/safety/types.hpp"

namespace pcbf {

inline double effective_radius(const SafetyState& s) { return s.drone_radius + s.obstacle_radius; }

// Hard barrier: squared clearance. Non-negative iff the disks do not overlap.
inline double h_hard(const SafetyState& s) {
    const double R = effective_radius(s);
    return squared_norm(s.rel_position) - R * R;
}

// Stopping-distance margin for a speed command v under lag tau_lag and
// braking bound a_max. Monotone in v, zero at rest.
inline double predictive_margin(double speed, const BarrierParams& p) {
    return p.tau_lag * speed + speed * speed / (2.0 * p.a_max);
}

// Soft barrier: linear clearance minus the predictive margin at the
// currently measured drone speed. Negative inside the caution band.
inline double h_soft(const SafetyState& s, const BarrierParams& p) {
    return norm(s.rel_position) - effective_radius(s) - predictive_margin(norm(s.drone_velocity), p);
}

struct ConstraintRows {
    HalfSpace hard;
    HalfSpace soft;
    double h_hard = 0.0;
    double h_soft = 0.0;
};

// Velocity-space half-spaces enforcing hdot + alpha * h >= 0 for both
// barriers under the single-integrator plant (relative degree one; no
// auxiliary regularizers). The margin is frozen at the measured speed, so
// both rows stay linear in the commanded velocity.
inline ConstraintRows constraint_rows(const SafetyState& s, const BarrierParams& p) {
    const double r_norm = norm(s.rel_position);
    if (r_norm <= kDegenerateNorm) {
        throw DegenerateGeometry("constraint_rows: drone coincides with obstacle center");
    }
    ConstraintRows rows;
    rows.h_hard = h_hard(s);
    rows.h_soft = h_soft(s, p);
    rows.hard.normal = 2.0 * s.rel_position;
    rows.hard.offset = -p.alpha * rows.h_hard + dot(rows.hard.normal, s.obstacle_velocity);
    const Vec2 r_hat = s.rel_position / r_norm;
    rows.soft.normal = r_hat;
    rows.soft.offset = -p.alpha * rows.h_soft + dot(r_hat, s.obstacle_velocity);
    return rows;
}

}  // namespace pcbf
