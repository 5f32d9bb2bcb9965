#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>

#include "pcbf/ops/atomic_write.hpp"
#include "pcbf/ops/canonical.hpp"
#include "pcbf/ops/watchdog.hpp"

namespace pcbf {

struct ForensicsEntry {
    std::uint64_t step = 0;
    std::string ts;  // UTC, extended ISO 8601
    std::map<std::string, double> metrics;

    json to_json() const { return json{{"step", step}, {"ts", ts}, {"metrics", metrics}}; }
};

// Fixed-capacity ring of recent metric snapshots. On an alarm the buffer is
// dumped whole so the window leading up to the trigger is preserved; the
// oldest entries are evicted silently once capacity is reached.
class ForensicsBuffer {
  public:
    explicit ForensicsBuffer(std::size_t capacity = 256) : capacity_(capacity) {
        if (capacity_ == 0) throw InvalidConfig("ForensicsBuffer: capacity must be >= 1");
    }

    void record(std::uint64_t step, const std::map<std::string, double>& metrics) {
        if (entries_.size() == capacity_) entries_.pop_front();
        entries_.push_back(ForensicsEntry{step, utc_timestamp_extended(), metrics});
    }

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    const ForensicsEntry& at(std::size_t i) const { return entries_.at(i); }

    // Snapshot of the retained window; trigger context included when given.
    json to_json(const std::optional<WatchdogEvent>& trigger = std::nullopt) const {
        json entries = json::array();
        for (const ForensicsEntry& e : entries_) entries.push_back(e.to_json());
        json j{{"capacity", capacity_}, {"dumped_at", utc_timestamp_extended()}, {"entries", entries}};
        if (trigger) j["trigger"] = trigger->to_json();
        return j;
    }

    // Writes forensics_<UTC stamp>_<last step>.json into dir and returns the path.
    std::string dump(const std::string& dir,
                     const std::optional<WatchdogEvent>& trigger = std::nullopt) const {
        const std::uint64_t last = entries_.empty() ? 0 : entries_.back().step;
        const std::string path =
            dir + "/forensics_" + utc_timestamp_basic() + "_" + std::to_string(last) + ".json";
        atomic_write(path, canonical_json(to_json(trigger)));
        return path;
    }

  private:
    std::size_t capacity_;
    std::deque<ForensicsEntry> entries_;
};

}  // namespace pcbf
