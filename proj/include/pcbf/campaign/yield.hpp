#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcbf/core/jsonio.hpp"
#include "pcbf/env/scene.hpp"

namespace pcbf {

struct BucketStats {
    long attempts = 0;
    long accepted = 0;
};

// One scene family's acceptance yield against its predicted rate. sigma is
// the binomial standard error sqrt(p(1-p)/N) using the predicted p, in
// fraction units; delta_pp is the observed-minus-predicted gap in percentage
// points. delta_over_sigma is absent where sigma is zero (p of 0 or 1).
struct DeviationRow {
    SceneType scene = SceneType::open;
    long attempts = 0;
    long accepted = 0;
    double observed = 0.0;
    double predicted = 0.0;
    double delta_pp = 0.0;
    double sigma = 0.0;
    std::optional<double> delta_over_sigma;
};

inline void validate_distribution(const std::map<SceneType, double>& dist) {
    if (dist.empty()) throw InvalidDistribution("distribution is empty");
    double sum = 0.0;
    for (const auto& [type, frac] : dist) {
        if (!std::isfinite(frac) || frac < 0.0 || frac > 1.0) {
            throw InvalidDistribution(std::string("fraction for ") + scene_type_name(type) +
                                      " outside [0,1]");
        }
        sum += frac;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidDistribution("fractions sum to " + std::to_string(sum) + ", expected 1");
    }
}

// Largest-remainder apportionment: floors first, then one extra attempt per
// highest fractional remainder until the total is exact. Ties go to the
// scene enumerated first, so the split is deterministic.
inline std::map<SceneType, long> allocate_attempts(long total,
                                                   const std::map<SceneType, double>& dist) {
    if (total < 1) throw InvalidDistribution("total attempts must be >= 1");
    validate_distribution(dist);
    std::map<SceneType, long> counts;
    std::vector<std::pair<SceneType, double>> remainders;
    long allocated = 0;
    for (const auto& [type, frac] : dist) {
        const double exact = static_cast<double>(total) * frac;
        const long floor_count = static_cast<long>(std::floor(exact));
        counts[type] = floor_count;
        allocated += floor_count;
        remainders.emplace_back(type, exact - static_cast<double>(floor_count));
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (long i = 0; i < total - allocated; ++i) {
        ++counts[remainders[static_cast<std::size_t>(i)].first];
    }
    return counts;
}

template <typename A, typename B>
inline void require_same_keys(const std::map<SceneType, A>& a, const std::map<SceneType, B>& b,
                              const std::string& what) {
    const bool same = a.size() == b.size() &&
                      std::equal(a.begin(), a.end(), b.begin(),
                                 [](const auto& x, const auto& y) { return x.first == y.first; });
    if (!same) throw KeyMismatch(what + ": scene key sets differ");
}

inline double expected_aggregate_yield(const std::map<SceneType, double>& dist,
                                       const std::map<SceneType, double>& predicted) {
    validate_distribution(dist);
    require_same_keys(dist, predicted, "expected_aggregate_yield");
    double acc = 0.0;
    for (const auto& [type, frac] : dist) acc += frac * predicted.at(type);
    return acc;
}

inline DeviationRow deviation_row(SceneType scene, const BucketStats& stats, double predicted) {
    if (stats.attempts <= 0) throw InvalidConfig("deviation_row: attempts must be positive");
    if (stats.accepted < 0 || stats.accepted > stats.attempts) {
        throw InvalidConfig("deviation_row: accepted outside [0, attempts]");
    }
    if (!(predicted >= 0.0 && predicted <= 1.0)) {
        throw InvalidConfig("deviation_row: predicted yield outside [0,1]");
    }
    DeviationRow row;
    row.scene = scene;
    row.attempts = stats.attempts;
    row.accepted = stats.accepted;
    row.observed = static_cast<double>(stats.accepted) / static_cast<double>(stats.attempts);
    row.predicted = predicted;
    row.delta_pp = 100.0 * (row.observed - predicted);
    row.sigma = std::sqrt(predicted * (1.0 - predicted) / static_cast<double>(stats.attempts));
    if (row.sigma > 0.0) row.delta_over_sigma = (row.observed - predicted) / row.sigma;
    return row;
}

struct YieldAggregate {
    long attempts = 0;
    long accepted = 0;
    double observed = 0.0;
    double expected = 0.0;
    double delta_pp = 0.0;
};

struct YieldAnalysis {
    std::vector<DeviationRow> rows;
    YieldAggregate aggregate;

    // Expected aggregate uses the realized attempt counts as weights, so it
    // matches the plan exactly when attempts were allocated from it.
    static YieldAnalysis build(const std::map<SceneType, BucketStats>& stats,
                               const std::map<SceneType, double>& predicted) {
        require_same_keys(stats, predicted, "yield analysis");
        YieldAnalysis out;
        if (stats.empty()) return out;
        double expected_accepted = 0.0;
        for (const auto& [type, bucket] : stats) {
            out.rows.push_back(deviation_row(type, bucket, predicted.at(type)));
            out.aggregate.attempts += bucket.attempts;
            out.aggregate.accepted += bucket.accepted;
            expected_accepted += static_cast<double>(bucket.attempts) * predicted.at(type);
        }
        out.aggregate.observed = static_cast<double>(out.aggregate.accepted) /
                                 static_cast<double>(out.aggregate.attempts);
        out.aggregate.expected = expected_accepted / static_cast<double>(out.aggregate.attempts);
        out.aggregate.delta_pp = 100.0 * (out.aggregate.observed - out.aggregate.expected);
        return out;
    }

    json to_json() const {
        json buckets = json::array();
        for (const DeviationRow& r : rows) {
            json jr{{"scene_type", scene_type_name(r.scene)},
                    {"attempts", r.attempts},
                    {"accepted", r.accepted},
                    {"observed_yield", r.observed},
                    {"predicted_yield", r.predicted},
                    {"delta_pp", r.delta_pp},
                    {"sigma", r.sigma}};
            jr["delta_over_sigma"] = r.delta_over_sigma ? json(*r.delta_over_sigma) : json();
            buckets.push_back(std::move(jr));
        }
        return json{{"buckets", buckets},
                    {"aggregate",
                     json{{"attempts", aggregate.attempts},
                          {"accepted", aggregate.accepted},
                          {"observed_yield", aggregate.observed},
                          {"expected_yield", aggregate.expected},
                          {"delta_pp", aggregate.delta_pp}}}};
    }

    std::string text() const {
        const auto fmt = [](const char* f, double v) {
            char buf[48];
            std::snprintf(buf, sizeof buf, f, v);
            return std::string(buf);
        };
        std::string out;
        char line[160];
        std::snprintf(line, sizeof line, "%-18s%10s%10s%11s%12s%10s%13s\n", "scene", "attempts",
                      "accepted", "observed%", "predicted%", "delta_pp", "delta/sigma");
        out += line;
        const auto emit = [&](const std::string& name, long attempts, long accepted, double obs,
                              double pred, double dpp, const std::optional<double>& dos) {
            std::snprintf(line, sizeof line, "%-18s%10ld%10ld%11s%12s%10s%13s\n", name.c_str(),
                          attempts, accepted, fmt("%.2f", 100.0 * obs).c_str(),
                          fmt("%.2f", 100.0 * pred).c_str(), fmt("%+.2f", dpp).c_str(),
                          dos ? fmt("%.1f", *dos).c_str() : "---");
            out += line;
        };
        for (const DeviationRow& r : rows) {
            emit(scene_type_name(r.scene), r.attempts, r.accepted, r.observed, r.predicted,
                 r.delta_pp, r.delta_over_sigma);
        }
        if (!rows.empty()) {
            emit("aggregate", aggregate.attempts, aggregate.accepted, aggregate.observed,
                 aggregate.expected, aggregate.delta_pp, std::nullopt);
        }
        return out;
    }
};

}  // namespace pcbf
