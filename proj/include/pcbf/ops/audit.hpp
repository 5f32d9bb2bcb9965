#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "pcbf/ops/dataset.hpp"
#include "pcbf/ops/hash.hpp"

namespace pcbf {

struct AuditSpec {
    std::map<SceneType, double> target_distribution;
    double tolerance = 0.02;  // scene-mix slack, absolute fraction
    double mad_multiplier = 5.0;
    double max_outlier_fraction = 0.01;

    void validate() const {
        if (target_distribution.empty()) throw InvalidConfig("AuditSpec: target_distribution empty");
        double sum = 0.0;
        for (const auto& [type, frac] : target_distribution) {
            if (!(frac >= 0.0 && frac <= 1.0)) {
                throw InvalidConfig(std::string("AuditSpec: fraction for ") + scene_type_name(type) +
                                    " outside [0,1]");
            }
            sum += frac;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw InvalidConfig("AuditSpec: fractions must sum to 1");
        if (!(tolerance >= 0.0)) throw InvalidConfig("AuditSpec: tolerance must be >= 0");
        if (!(mad_multiplier >= 0.0)) throw InvalidConfig("AuditSpec: mad_multiplier must be >= 0");
        if (!(max_outlier_fraction >= 0.0 && max_outlier_fraction <= 1.0)) {
            throw InvalidConfig("AuditSpec: max_outlier_fraction outside [0,1]");
        }
    }
};

struct AuditCheck {
    std::string name;
    bool passed = false;
    std::string detail;

    json to_json() const { return json{{"name", name}, {"passed", passed}, {"detail", detail}}; }
};

struct AuditReport {
    std::string dataset_path;
    std::string dataset_sha256;
    std::vector<AuditCheck> checks;
    bool passed = false;

    json to_json() const {
        json cs = json::array();
        for (const AuditCheck& c : checks) cs.push_back(c.to_json());
        return json{{"dataset_path", dataset_path},
                    {"dataset_sha256", dataset_sha256},
                    {"checks", cs},
                    {"passed", passed}};
    }
};

namespace detail {

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::string frac3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace detail

// All four checks always run, so one failure does not mask another.
inline std::vector<AuditCheck> run_audit_checks(const Dataset& ds, const AuditSpec& spec) {
    spec.validate();
    std::vector<AuditCheck> checks;
    const std::size_t n = ds.episodes.size();

    {
        AuditCheck c{"scene_mix", true, ""};
        if (n == 0) {
            c.passed = false;
            c.detail = "no episodes";
        } else {
            std::map<SceneType, std::size_t> counts;
            for (const RolloutRecord& r : ds.episodes) ++counts[r.scene_type];
            std::string detail;
            for (const auto& [type, target] : spec.target_distribution) {
                const double obs = static_cast<double>(counts[type]) / static_cast<double>(n);
                if (std::abs(obs - target) > spec.tolerance) {
                    c.passed = false;
                    if (!detail.empty()) detail += "; ";
                    detail += std::string(scene_type_name(type)) + " " + detail::frac3(obs) +
                              " vs target " + detail::frac3(target);
                }
            }
            c.detail = c.passed ? "within " + detail::frac3(spec.tolerance) : detail;
        }
        checks.push_back(std::move(c));
    }

    {
        AuditCheck c{"action_sanity", true, ""};
        std::size_t bad = 0;
        const double bound = ds.header.v_max + 1e-9;
        for (const RolloutRecord& r : ds.episodes) {
            for (const StepLog& s : r.steps) {
                for (const Vec2 a : {s.nominal_action, s.safe_action}) {
                    if (!is_finite(a) || std::abs(a.x) > bound || std::abs(a.y) > bound) ++bad;
                }
            }
        }
        c.passed = bad == 0;
        c.detail = c.passed ? "all actions finite and within v_max"
                            : std::to_string(bad) + " actions non-finite or outside v_max";
        checks.push_back(std::move(c));
    }

    {
        // Robust length screen: median +/- mad_multiplier * MAD, at most
        // max_outlier_fraction of episodes outside.
        AuditCheck c{"length_outliers", true, ""};
        if (n == 0) {
            c.passed = false;
            c.detail = "no episodes";
        } else {
            std::vector<double> lengths;
            lengths.reserve(n);
            for (const RolloutRecord& r : ds.episodes) lengths.push_back(static_cast<double>(r.length));
            const double med = detail::median_of(lengths);
            std::vector<double> dev;
            dev.reserve(n);
            for (double l : lengths) dev.push_back(std::abs(l - med));
            const double mad = detail::median_of(dev);
            const double band = spec.mad_multiplier * mad;
            std::size_t outliers = 0;
            for (double l : lengths) {
                if (std::abs(l - med) > band) ++outliers;
            }
            const double frac = static_cast<double>(outliers) / static_cast<double>(n);
            c.passed = frac <= spec.max_outlier_fraction;
            c.detail = std::to_string(outliers) + "/" + std::to_string(n) + " outside median " +
                       detail::frac3(med) + " +/- " + detail::frac3(band);
        }
        checks.push_back(std::move(c));
    }

    {
        // Training consumes fixed-length contiguous chunks; every episode
        // must declare its true step count and be long enough to yield at
        // least one chunk.
        AuditCheck c{"bptt_integrity", true, ""};
        std::size_t mismatched = 0;
        std::size_t short_eps = 0;
        for (const RolloutRecord& r : ds.episodes) {
            if (r.length != static_cast<int>(r.steps.size())) ++mismatched;
            if (r.length < ds.header.chunk_length) ++short_eps;
        }
        c.passed = mismatched == 0 && short_eps == 0;
        c.detail = c.passed ? "lengths consistent and >= chunk_length " +
                                  std::to_string(ds.header.chunk_length)
                            : std::to_string(mismatched) + " length mismatches, " +
                                  std::to_string(short_eps) + " episodes shorter than chunk_length";
        checks.push_back(std::move(c));
    }

    return checks;
}

inline AuditReport audit_dataset_file(const std::string& path, const AuditSpec& spec) {
    AuditReport report;
    report.dataset_path = path;
    report.dataset_sha256 = sha256_file(path);
    const Dataset ds = read_dataset(path);
    report.checks = run_audit_checks(ds, spec);
    report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                                [](const AuditCheck& c) { return c.passed; });
    return report;
}

}  // namespace pcbf
