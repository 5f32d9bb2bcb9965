#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pcbf/algo/algorithm.hpp"
#include "pcbf/pipeline/safety_wrapper.hpp"

namespace pcbf {

struct StepLog {
    std::vector<double> observation;
    Vec2 nominal_action;
    Vec2 safe_action;
    bool modified = false;
    double h_hard = 0.0;
    double h_soft = 0.0;
};

struct RolloutRecord {
    SceneType scene_type = SceneType::open;
    std::uint64_t seed = 0;
    int length = 0;
    TerminationReason termination_reason = TerminationReason::timeout;
    std::vector<StepLog> steps;
};

namespace detail {

// Actions may carry NaN components (e.g. fault injection in audit tests);
// JSON has no NaN literal, so those components round-trip as null.
inline json action_to_json(Vec2 a) {
    json j = json::array();
    j.push_back(std::isnan(a.x) ? json() : json(a.x));
    j.push_back(std::isnan(a.y) ? json() : json(a.y));
    return j;
}

inline Vec2 action_from_json(const json& j, const std::string& locus) {
    if (!j.is_array() || j.size() != 2) {
        throw MalformedDataset(locus + ": action must be a 2-element array");
    }
    const auto comp = [&](const json& c) -> double {
        if (c.is_null()) return std::numeric_limits<double>::quiet_NaN();
        if (!c.is_number()) throw MalformedDataset(locus + ": action component must be number or null");
        return c.get<double>();
    };
    return {comp(j[0]), comp(j[1])};
}

}  // namespace detail

inline json step_log_to_json(const StepLog& s) {
    return json{{"observation", s.observation},
                {"nominal_action", detail::action_to_json(s.nominal_action)},
                {"safe_action", detail::action_to_json(s.safe_action)},
                {"modified", s.modified},
                {"h_hard", s.h_hard},
                {"h_soft", s.h_soft}};
}

inline StepLog step_log_from_json(const json& j, const std::string& locus) {
    if (!j.is_object()) throw MalformedDataset(locus + ": step must be an object");
    for (const char* key : {"observation", "nominal_action", "safe_action", "modified", "h_hard", "h_soft"}) {
        if (!j.contains(key)) throw MalformedDataset(locus + ": step missing key \"" + key + "\"");
    }
    StepLog s;
    const json& obs = j.at("observation");
    if (!obs.is_array()) throw MalformedDataset(locus + ": observation must be an array");
    for (const json& v : obs) {
        if (!v.is_number()) throw MalformedDataset(locus + ": observation entries must be numbers");
        s.observation.push_back(v.get<double>());
    }
    s.nominal_action = detail::action_from_json(j.at("nominal_action"), locus);
    s.safe_action = detail::action_from_json(j.at("safe_action"), locus);
    if (!j.at("modified").is_boolean()) throw MalformedDataset(locus + ": modified must be boolean");
    s.modified = j.at("modified").get<bool>();
    for (const char* key : {"h_hard", "h_soft"}) {
        if (!j.at(key).is_number()) throw MalformedDataset(locus + std::string(": ") + key + " must be a number");
    }
    s.h_hard = j.at("h_hard").get<double>();
    s.h_soft = j.at("h_soft").get<double>();
    return s;
}

inline json rollout_record_to_json(const RolloutRecord& r) {
    json steps = json::array();
    for (const StepLog& s : r.steps) steps.push_back(step_log_to_json(s));
    return json{{"scene_type", scene_type_name(r.scene_type)},
                {"seed", r.seed},
                {"length", r.length},
                {"termination_reason", termination_reason_name(r.termination_reason)},
                {"steps", std::move(steps)}};
}

// The declared length is parsed as-is, not forced to steps.size(); the
// dataset audit owns that consistency check.
inline RolloutRecord rollout_record_from_json(const json& j, const std::string& locus) {
    if (!j.is_object()) throw MalformedDataset(locus + ": episode must be an object");
    for (const char* key : {"scene_type", "seed", "length", "termination_reason", "steps"}) {
        if (!j.contains(key)) throw MalformedDataset(locus + ": episode missing key \"" + key + "\"");
    }
    RolloutRecord r;
    try {
        r.scene_type = parse_scene_type(j.at("scene_type").get<std::string>());
        r.termination_reason = parse_termination_reason(j.at("termination_reason").get<std::string>());
    } catch (const json::exception&) {
        throw MalformedDataset(locus + ": scene_type and termination_reason must be strings");
    } catch (const InvalidConfig& e) {
        throw MalformedDataset(locus + ": " + e.what());
    }
    if (!j.at("seed").is_number_unsigned()) {
        throw MalformedDataset(locus + ": seed must be a non-negative integer");
    }
    r.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("length").is_number_integer()) {
        throw MalformedDataset(locus + ": length must be an integer");
    }
    r.length = j.at("length").get<int>();
    const json& steps = j.at("steps");
    if (!steps.is_array()) throw MalformedDataset(locus + ": steps must be an array");
    for (const json& s : steps) r.steps.push_back(step_log_from_json(s, locus));
    return r;
}

// Runs one episode to termination, threading recurrent state through the
// policy. With the filter enabled every nominal action passes through the
// barrier projection; without it the nominal goes to the env unchanged and
// the logged margins are computed from the same pre-step state for
// comparability.
inline RolloutRecord run_episode(AvoidanceEnv& env, Algorithm& policy, std::uint64_t seed,
                                 const BarrierParams& params, bool use_filter = true) {
    RolloutRecord rec;
    rec.scene_type = env.config().scene.type;
    rec.seed = seed;

    std::optional<Hidden> hidden;
    if (use_filter) {
        SafetyWrapper wrap(env, params);
        std::vector<double> obs = wrap.reset(seed).observation;
        while (!env.done()) {
            PredictResult pr = policy.predict(obs, hidden);
            hidden = std::move(pr.hidden);
            const WrappedStepResult ws = wrap.step(pr.action);
            rec.steps.push_back(StepLog{obs, pr.action, ws.filter.safe_action, ws.filter.modified,
                                        ws.filter.h_hard, ws.filter.h_soft});
            obs = ws.env_step.observation;
            if (ws.env_step.reason) rec.termination_reason = *ws.env_step.reason;
        }
    } else {
        env.set_metric_params(params);
        std::vector<double> obs = env.reset(seed).observation;
        while (!env.done()) {
            PredictResult pr = policy.predict(obs, hidden);
            hidden = std::move(pr.hidden);
            const SafetyState pre = env.safety_state();
            const StepResult sr = env.step(pr.action);
            rec.steps.push_back(
                StepLog{obs, pr.action, pr.action, false, h_hard(pre), h_soft(pre, params)});
            obs = sr.observation;
            if (sr.reason) rec.termination_reason = *sr.reason;
        }
    }
    rec.length = static_cast<int>(rec.steps.size());
    return rec;
}

}  // namespace pcbf
