#pragma once

#include <cmath>
#include <optional>

#include "pcbf/safety/types.hpp"

namespace pcbf {

inline constexpr double kFeasibilitySlack = 1e-9;
inline constexpr double kTieBreak = 1e-12;
inline constexpr double kSingularDet = 1e-12;

struct ProjectionResult {
    Vec2 point;
    bool active_first = false;   // tight at the returned point (1e-9)
    bool active_second = false;
};

namespace detail {

// Euclidean projection onto the boundary hyperplane of c.
inline Vec2 project_onto_boundary(Vec2 u, const HalfSpace& c) {
    const double lambda = (c.offset - dot(c.normal, u)) / squared_norm(c.normal);
    return u + lambda * c.normal;
}

}  // namespace detail

// Exact minimal-deviation projection onto the intersection of two
// half-spaces, by active-set enumeration: the optimum is whichever of
// {u, boundary projections, corner} is feasible and closest. Deviation ties
// within 1e-12 resolve to the first (hard) constraint's projection.
inline ProjectionResult project_two_halfspaces(Vec2 u, const HalfSpace& c1, const HalfSpace& c2) {
    if (squared_norm(c1.normal) <= kDegenerateNorm * kDegenerateNorm ||
        squared_norm(c2.normal) <= kDegenerateNorm * kDegenerateNorm) {
        throw DegenerateGeometry("project_two_halfspaces: zero constraint normal");
    }

    Vec2 best{};
    double best_dev = 0.0;
    bool have_best = false;
    const auto consider = [&](Vec2 p) {
        const double dev = norm(p - u);
        if (!have_best || dev < best_dev - kTieBreak) {
            best = p;
            best_dev = dev;
            have_best = true;
        }
    };

    if (c1.admits(u, kFeasibilitySlack) && c2.admits(u, kFeasibilitySlack)) {
        best = u;  // untouched: no-shrinkage guarantee depends on this path
        have_best = true;
    } else {
        const Vec2 p1 = detail::project_onto_boundary(u, c1);
        if (c2.admits(p1, kFeasibilitySlack)) consider(p1);
        const Vec2 p2 = detail::project_onto_boundary(u, c2);
        if (c1.admits(p2, kFeasibilitySlack)) consider(p2);

        const double det = c1.normal.x * c2.normal.y - c1.normal.y * c2.normal.x;
        if (std::abs(det) > kSingularDet * norm(c1.normal) * norm(c2.normal)) {
            const Vec2 corner{(c1.offset * c2.normal.y - c2.offset * c1.normal.y) / det,
                              (c1.normal.x * c2.offset - c2.normal.x * c1.offset) / det};
            if (c1.admits(corner, kFeasibilitySlack) && c2.admits(corner, kFeasibilitySlack)) {
                consider(corner);
            }
        }
        if (!have_best) {
            throw InfeasibleConstraints("project_two_halfspaces: empty intersection");
        }
    }

    ProjectionResult res;
    res.point = best;
    res.active_first = std::abs(c1.slack_at(best)) <= kFeasibilitySlack;
    res.active_second = std::abs(c2.slack_at(best)) <= kFeasibilitySlack;
    return res;
}

}  // namespace pcbf
