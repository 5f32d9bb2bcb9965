#pragma once

#include <span>
#include <vector>

#include "pcbf/safety/barriers.hpp"
#include "pcbf/safety/projection.hpp"

namespace pcbf {

inline constexpr double kModifiedTolerance = 1e-9;

// Minimal-deviation safety filter: projects the nominal action onto the two
// barrier half-spaces, then clips componentwise to the action box. A nominal
// that already satisfies both constraints passes through bitwise-identically.
// The observation is opaque here; it is threaded through for interface
// stability with learned policies.
inline SafetyFilterResult filter_action(std::span<const double> observation, Vec2 nominal,
                                        const SafetyState& state, const BarrierParams& params) {
    (void)observation;
    state.validate();
    params.validate();
    if (!is_finite(nominal)) throw InvalidConfig("filter_action: nominal action must be finite");

    const ConstraintRows rows = constraint_rows(state, params);
    const ProjectionResult proj = project_two_halfspaces(nominal, rows.hard, rows.soft);
    const Vec2 clipped = clamp_box(proj.point, params.v_max);

    SafetyFilterResult res;
    res.safe_action = clipped;
    res.box_clipped = !(clipped == proj.point);
    res.modified = norm(clipped - nominal) > kModifiedTolerance;
    res.h_hard = rows.h_hard;
    res.h_soft = rows.h_soft;
    res.active_hard = std::abs(rows.hard.slack_at(clipped)) <= kFeasibilitySlack;
    res.active_soft = std::abs(rows.soft.slack_at(clipped)) <= kFeasibilitySlack;
    return res;
}

// Elementwise batch filter. Semantically identical to calling filter_action
// per element; geometry faults land in the element's slot instead of
// aborting the batch.
inline std::vector<FilterBatchEntry> filter_action_batch(std::span<const std::vector<double>> observations,
                                                         std::span<const Vec2> nominal_actions,
                                                         std::span<const SafetyState> states,
                                                         const BarrierParams& params) {
    if (nominal_actions.size() != states.size()) {
        throw BatchShapeMismatch("filter_action_batch: " + std::to_string(nominal_actions.size()) +
                                 " actions vs " + std::to_string(states.size()) + " states");
    }
    if (!observations.empty() && observations.size() != states.size()) {
        throw BatchShapeMismatch("filter_action_batch: observation batch size mismatch");
    }
    std::vector<FilterBatchEntry> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::span<const double> obs =
            observations.empty() ? std::span<const double>{} : std::span<const double>(observations[i]);
        try {
            out[i].result = filter_action(obs, nominal_actions[i], states[i], params);
        } catch (const DegenerateGeometry& e) {
            out[i].fault = FilterFault::degenerate_geometry;
            out[i].message = e.what();
        } catch (const InfeasibleConstraints& e) {
            out[i].fault = FilterFault::infeasible_constraints;
            out[i].message = e.what();
        }
    }
    return out;
}

}  // namespace pcbf
