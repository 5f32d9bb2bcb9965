#pragma once

#include <string>

#include "pcbf/core/jsonio.hpp"

namespace pcbf {

// Canonical serialization used for content commitments: UTF-8, object keys
// in lexicographic order, no insignificant whitespace, numbers in shortest
// round-trip decimal form. nlohmann::json provides exactly this (std::map
// key ordering plus Grisu shortest-form dtoa), so canonical bytes are stable
// across field insertion order and across runs.
inline std::string canonical_json(const json& j) { return j.dump(); }

}  // namespace pcbf
