#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcbf/ops/prereg.hpp"

namespace pcbf {

struct Watchdog {
    std::string name;
    std::string metric;
    Comparator comparator = Comparator::lt;
    double threshold = 0.0;
    int consecutive_required = 1;  // run length of satisfied updates before firing
    bool halt = false;

    void validate() const {
        if (metric.empty()) throw InvalidConfig("Watchdog: metric must be non-empty");
        if (consecutive_required < 1) {
            throw InvalidConfig("Watchdog: consecutive_required must be >= 1");
        }
        if (!std::isfinite(threshold)) throw InvalidConfig("Watchdog: threshold must be finite");
    }
};

struct WatchdogEvent {
    std::string watchdog_name;
    std::string metric;
    Comparator comparator = Comparator::lt;
    double threshold = 0.0;
    double observed = 0.0;
    std::uint64_t step = 0;
    bool is_halt = false;
    std::string commitment_sha256;  // empty unless the registry carries one

    json to_json() const {
        return json{{"watchdog_name", watchdog_name},
                    {"metric", metric},
                    {"comparator", comparator_name(comparator)},
                    {"threshold", threshold},
                    {"observed", observed},
                    {"step", step},
                    {"is_halt", is_halt},
                    {"commitment_sha256", commitment_sha256}};
    }
};

// Evaluates alarm conditions against a metric stream. Steps must be
// non-decreasing. A watchdog fires once its condition has held for
// consecutive_required consecutive updates and keeps firing while the run
// persists; a metric absent from an update breaks the run. Halt watchdogs
// latch: once one fires, should_halt returns that first event forever after.
class WatchdogRegistry {
  public:
    void add(Watchdog wd) {
        wd.validate();
        if (wd.name.empty()) wd.name = wd.metric;
        slots_.push_back({std::move(wd), 0});
    }

    void set_commitment(std::string sha256) { commitment_sha256_ = std::move(sha256); }
    const std::string& commitment() const { return commitment_sha256_; }
    std::size_t size() const { return slots_.size(); }

    std::vector<WatchdogEvent> update(const std::map<std::string, double>& metrics, std::uint64_t step) {
        if (last_step_ && step < *last_step_) {
            throw NonMonotonicStep("watchdog update: step " + std::to_string(step) +
                                   " after step " + std::to_string(*last_step_));
        }
        last_step_ = step;
        std::vector<WatchdogEvent> fired;
        for (Slot& slot : slots_) {
            const auto it = metrics.find(slot.wd.metric);
            if (it == metrics.end() ||
                !comparator_holds(slot.wd.comparator, it->second, slot.wd.threshold)) {
                slot.run = 0;
                continue;
            }
            ++slot.run;
            if (slot.run < slot.wd.consecutive_required) continue;
            WatchdogEvent ev{slot.wd.name, slot.wd.metric,     slot.wd.comparator, slot.wd.threshold,
                             it->second,   step,               slot.wd.halt,       commitment_sha256_};
            if (slot.wd.halt && !halt_) halt_ = ev;
            fired.push_back(std::move(ev));
        }
        return fired;
    }

    std::optional<WatchdogEvent> should_halt() const { return halt_; }

    // Read-only snapshot for concurrent reporting.
    json snapshot() const {
        json out = json::array();
        for (const Slot& s : slots_) {
            out.push_back(json{{"name", s.wd.name},
                               {"metric", s.wd.metric},
                               {"comparator", comparator_name(s.wd.comparator)},
                               {"threshold", s.wd.threshold},
                               {"consecutive_required", s.wd.consecutive_required},
                               {"halt", s.wd.halt},
                               {"run", s.run}});
        }
        return out;
    }

  private:
    struct Slot {
        Watchdog wd;
        int run = 0;
    };
    std::vector<Slot> slots_;
    std::optional<std::uint64_t> last_step_;
    std::optional<WatchdogEvent> halt_;
    std::string commitment_sha256_;
};

// Derives one halt watchdog per pre-registered success criterion by negating
// its comparator: the alarm is "the committed criterion is currently
// violated". The registry carries the commitment hash so halt events cite
// the exact plan they enforce.
inline WatchdogRegistry watchdogs_from_preregistration(const PreRegistration& p, const Commitment& c) {
    WatchdogRegistry reg;
    reg.set_commitment(c.sha256);
    for (const Criterion& cr : p.criteria) {
        Watchdog wd;
        wd.name = cr.metric;
        wd.metric = cr.metric;
        wd.comparator = negate_comparator(cr.comparator);
        wd.threshold = cr.threshold;
        wd.consecutive_required = 1;
        wd.halt = true;
        reg.add(std::move(wd));
    }
    return reg;
}

}  // namespace pcbf
