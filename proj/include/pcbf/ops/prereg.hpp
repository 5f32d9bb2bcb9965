#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pcbf/core/jsonio.hpp"
#include "pcbf/env/scene.hpp"
#include "pcbf/ops/atomic_write.hpp"
#include "pcbf/ops/canonical.hpp"
#include "pcbf/ops/hash.hpp"

namespace pcbf {

enum class Comparator { ge, le, gt, lt };

inline const char* comparator_name(Comparator c) {
    switch (c) {
        case Comparator::ge: return ">=";
        case Comparator::le: return "<=";
        case Comparator::gt: return ">";
        case Comparator::lt: return "<";
    }
    return "?";
}

inline Comparator parse_comparator(const std::string& s) {
    if (s == ">=") return Comparator::ge;
    if (s == "<=") return Comparator::le;
    if (s == ">") return Comparator::gt;
    if (s == "<") return Comparator::lt;
    throw InvalidConfig("unknown comparator \"" + s + "\"");
}

inline bool comparator_holds(Comparator c, double observed, double threshold) {
    switch (c) {
        case Comparator::ge: return observed >= threshold;
        case Comparator::le: return observed <= threshold;
        case Comparator::gt: return observed > threshold;
        case Comparator::lt: return observed < threshold;
    }
    return false;
}

// Logical negation, used to turn success criteria into alarm conditions.
inline Comparator negate_comparator(Comparator c) {
    switch (c) {
        case Comparator::ge: return Comparator::lt;
        case Comparator::le: return Comparator::gt;
        case Comparator::gt: return Comparator::le;
        case Comparator::lt: return Comparator::ge;
    }
    return Comparator::lt;
}

struct Criterion {
    std::string metric;
    Comparator comparator = Comparator::ge;
    double threshold = 0.0;
};

// Declared-ahead experiment contract: success criteria, attempt curriculum,
// and predicted per-bucket yields. Hash-committed before any run so the
// plan cannot drift silently afterwards.
struct PreRegistration {
    std::string name;
    std::string created_at;
    std::vector<Criterion> criteria;
    std::map<SceneType, double> attempt_distribution;
    std::map<SceneType, double> predicted_yields;
    std::string notes;

    void validate() const {
        if (name.empty()) throw InvalidConfig("PreRegistration: name must be non-empty");
        if (created_at.empty()) throw InvalidConfig("PreRegistration: created_at must be non-empty");
        std::set<std::string> metrics;
        for (const Criterion& c : criteria) {
            if (c.metric.empty()) throw InvalidConfig("PreRegistration: empty criterion metric");
            if (!std::isfinite(c.threshold)) {
                throw InvalidConfig("PreRegistration: criterion threshold must be finite");
            }
            if (!metrics.insert(c.metric).second) {
                throw InvalidConfig("PreRegistration: duplicate criterion metric \"" + c.metric + "\"");
            }
        }
        double sum = 0.0;
        for (const auto& [_, f] : attempt_distribution) {
            if (!std::isfinite(f) || f < 0.0) {
                throw InvalidConfig("PreRegistration: attempt fractions must be non-negative");
            }
            sum += f;
        }
        if (!attempt_distribution.empty() && std::abs(sum - 1.0) > 1e-9) {
            throw InvalidConfig("PreRegistration: attempt fractions must sum to 1");
        }
        for (const auto& [_, y] : predicted_yields) {
            if (!std::isfinite(y) || y < 0.0 || y > 1.0) {
                throw InvalidConfig("PreRegistration: predicted yields must lie in [0, 1]");
            }
        }
        if (!predicted_yields.empty() &&
            !std::equal(predicted_yields.begin(), predicted_yields.end(), attempt_distribution.begin(),
                        attempt_distribution.end(),
                        [](const auto& a, const auto& b) { return a.first == b.first; })) {
            throw InvalidConfig("PreRegistration: predicted_yields keys must match attempt_distribution");
        }
    }

    json to_json() const {
        json criteria_j = json::array();
        for (const Criterion& c : criteria) {
            criteria_j.push_back({{"metric", c.metric},
                                  {"comparator", comparator_name(c.comparator)},
                                  {"threshold", c.threshold}});
        }
        json dist = json::object();
        for (const auto& [t, f] : attempt_distribution) dist[scene_type_name(t)] = f;
        json pred = json::object();
        for (const auto& [t, y] : predicted_yields) pred[scene_type_name(t)] = y;
        return json{{"name", name},         {"created_at", created_at},
                    {"criteria", criteria_j}, {"attempt_distribution", dist},
                    {"predicted_yields", pred}, {"notes", notes}};
    }

    static PreRegistration from_json(const json& j) {
        require_keys(j, "prereg",
                     {"name", "created_at", "criteria", "attempt_distribution", "predicted_yields",
                      "notes"});
        PreRegistration p;
        p.name = get_string(j, "prereg", "name");
        p.created_at = get_string(j, "prereg", "created_at");
        if (!j["criteria"].is_array()) throw InvalidConfig("prereg: \"criteria\" must be an array");
        for (const json& jc : j["criteria"]) {
            require_keys(jc, "criterion", {"metric", "comparator", "threshold"});
            p.criteria.push_back({get_string(jc, "criterion", "metric"),
                                  parse_comparator(get_string(jc, "criterion", "comparator")),
                                  get_number(jc, "criterion", "threshold")});
        }
        for (const auto& [key, val] : j.at("attempt_distribution").items()) {
            if (!val.is_number()) throw InvalidConfig("prereg: attempt fraction must be a number");
            p.attempt_distribution[parse_scene_type(key)] = val.get<double>();
        }
        for (const auto& [key, val] : j.at("predicted_yields").items()) {
            if (!val.is_number()) throw InvalidConfig("prereg: predicted yield must be a number");
            p.predicted_yields[parse_scene_type(key)] = val.get<double>();
        }
        p.notes = get_string(j, "prereg", "notes");
        p.validate();
        return p;
    }
};

struct Commitment {
    std::string sha256;
    std::filesystem::path artifact_path;
};

inline std::string utc_timestamp_extended() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string utc_timestamp_basic() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

inline std::filesystem::path manifest_path_for(const std::filesystem::path& artifact) {
    return artifact.string() + ".manifest.json";
}

struct ManifestRecord {
    std::string artifact;
    std::string sha256;
    std::string committed_at;
};

// Writes the canonical artifact and its sidecar manifest atomically and
// returns the content commitment. Identical pre-registrations commit to the
// identical hash.
inline Commitment commit_to_artifact(const PreRegistration& p, const std::filesystem::path& artifact) {
    p.validate();
    const std::string bytes = canonical_json(p.to_json());
    atomic_write(artifact, bytes);
    Commitment c{sha256_hex(bytes), artifact};
    const json manifest{{"artifact", artifact.filename().string()},
                        {"sha256", c.sha256},
                        {"committed_at", utc_timestamp_extended()}};
    atomic_write(manifest_path_for(artifact), canonical_json(manifest));
    return c;
}

inline ManifestRecord load_manifest(const std::filesystem::path& artifact) {
    const json j = parse_json_file(manifest_path_for(artifact));
    require_keys(j, "manifest", {"artifact", "sha256", "committed_at"});
    return {get_string(j, "manifest", "artifact"), get_string(j, "manifest", "sha256"),
            get_string(j, "manifest", "committed_at")};
}

// Recomputes the artifact hash and compares against the manifest; any edit
// to the committed bytes, however cosmetic, is tamper.
inline std::string verify_commitment(const std::filesystem::path& artifact) {
    const ManifestRecord m = load_manifest(artifact);
    const std::string actual = sha256_file(artifact);
    if (actual != m.sha256) {
        throw CorruptArtifact("commitment mismatch for " + artifact.string() + ": manifest " +
                              m.sha256 + ", recomputed " + actual);
    }
    return actual;
}

inline PreRegistration load_artifact(const std::filesystem::path& artifact) {
    return PreRegistration::from_json(parse_json_file(artifact));
}

enum class CriterionStatus { pass, fail, not_evaluated };

inline const char* criterion_status_name(CriterionStatus s) {
    switch (s) {
        case CriterionStatus::pass: return "pass";
        case CriterionStatus::fail: return "fail";
        case CriterionStatus::not_evaluated: return "not_evaluated";
    }
    return "?";
}

struct CriterionResult {
    Criterion criterion;
    CriterionStatus status = CriterionStatus::not_evaluated;
    std::optional<double> observed;
};

struct EvaluationReport {
    std::vector<CriterionResult> results;
    bool overall_pass = false;

    json to_json() const {
        json rows = json::array();
        for (const CriterionResult& r : results) {
            json row{{"metric", r.criterion.metric},
                     {"comparator", comparator_name(r.criterion.comparator)},
                     {"threshold", r.criterion.threshold},
                     {"status", criterion_status_name(r.status)}};
            row["observed"] = r.observed ? json(*r.observed) : json(nullptr);
            rows.push_back(row);
        }
        return json{{"criteria", rows}, {"overall_pass", overall_pass}};
    }
};

// A criterion whose metric is missing is reported not_evaluated and can
// never pass; overall_pass requires every criterion to evaluate and pass.
inline EvaluationReport evaluate(const PreRegistration& p, const std::map<std::string, double>& metrics) {
    EvaluationReport rep;
    rep.overall_pass = true;
    for (const Criterion& c : p.criteria) {
        CriterionResult r{c, CriterionStatus::not_evaluated, std::nullopt};
        const auto it = metrics.find(c.metric);
        if (it != metrics.end()) {
            r.observed = it->second;
            r.status = comparator_holds(c.comparator, it->second, c.threshold) ? CriterionStatus::pass
                                                                               : CriterionStatus::fail;
        }
        if (r.status != CriterionStatus::pass) rep.overall_pass = false;
        rep.results.push_back(r);
    }
    return rep;
}

}  // namespace pcbf
