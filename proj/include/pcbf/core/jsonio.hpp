#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pcbf/core/errors.hpp"
#include "pcbf/core/vec2.hpp"

namespace pcbf {

using json = nlohmann::json;

inline void to_json(json& j, const Vec2& v) { j = json::array({v.x, v.y}); }

inline void from_json(const json& j, Vec2& v) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InvalidConfig("expected a 2-element numeric array, got " + j.dump());
    }
    v.x = j[0].get<double>();
    v.y = j[1].get<double>();
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open for reading: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw IoFailure("read failed: " + path.string());
    return os.str();
}

inline json parse_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InvalidConfig("not valid JSON: " + path.string());
    return j;
}

// Strict object check: every required key present, no keys outside
// required+optional. Configs are rejected rather than silently defaulted.
inline void require_keys(const json& obj, const std::string& ctx,
                         std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional = {}) {
    if (!obj.is_object()) throw InvalidConfig(ctx + ": expected a JSON object");
    std::set<std::string> allowed;
    for (const char* k : required) {
        if (!obj.contains(k)) throw InvalidConfig(ctx + ": missing key \"" + k + "\"");
        allowed.insert(k);
    }
    for (const char* k : optional) allowed.insert(k);
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw InvalidConfig(ctx + ": unknown key \"" + key + "\"");
    }
}

inline double get_number(const json& obj, const std::string& ctx, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw InvalidConfig(ctx + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

inline std::string get_string(const json& obj, const std::string& ctx, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_string()) throw InvalidConfig(ctx + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

inline std::int64_t get_integer(const json& obj, const std::string& ctx, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw InvalidConfig(ctx + ": \"" + key + "\" must be an integer");
    return v.get<std::int64_t>();
}

}  // namespace pcbf
