#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "pcbf/algo/algorithm.hpp"
#include "pcbf/algo/policies.hpp"
#include "pcbf/ops/atomic_write.hpp"
#include "pcbf/ops/canonical.hpp"
#include "pcbf/ops/hash.hpp"

namespace pcbf {

// Checkpoint container layout, all integers little-endian:
//   bytes 0..7    magic "PCBFALG1"
//   bytes 8..11   u32 container version (currently 1)
//   bytes 12..19  u64 payload length in bytes
//   payload       canonical JSON of the algorithm state
//   trailer       raw 32-byte SHA-256 over every preceding byte
// The trailer makes truncation and bit rot detectable before the payload is
// interpreted.
inline constexpr char kAlgoMagic[8] = {'P', 'C', 'B', 'F', 'A', 'L', 'G', '1'};
inline constexpr std::uint32_t kAlgoContainerVersion = 1;

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace detail

inline json algorithm_state_to_json(const AlgorithmState& s) {
    json j{{"kind", s.kind}, {"parameters", s.parameters}, {"rng_state", s.rng_state}};
    if (s.hidden_state) {
        j["hidden_state"] = *s.hidden_state;
    } else {
        j["hidden_state"] = nullptr;
    }
    return j;
}

inline AlgorithmState algorithm_state_from_json(const json& j) {
    require_keys(j, "algorithm state", {"kind", "parameters", "rng_state", "hidden_state"});
    AlgorithmState s;
    s.kind = get_string(j, "algorithm state", "kind");
    s.parameters = j.at("parameters");
    s.rng_state = get_string(j, "algorithm state", "rng_state");
    const json& hs = j.at("hidden_state");
    if (!hs.is_null()) {
        if (!hs.is_array()) throw CorruptArtifact("algorithm state: hidden_state must be array or null");
        s.hidden_state = hs.get<std::vector<double>>();
    }
    return s;
}

inline std::string encode_algorithm_state(const AlgorithmState& s) {
    std::string out(kAlgoMagic, sizeof kAlgoMagic);
    detail::put_u32_le(out, kAlgoContainerVersion);
    const std::string payload = canonical_json(algorithm_state_to_json(s));
    detail::put_u64_le(out, payload.size());
    out += payload;
    const auto digest = sha256_digest(out);
    out.append(reinterpret_cast<const char*>(digest.data()), digest.size());
    return out;
}

inline AlgorithmState decode_algorithm_state(const std::string& bytes, const std::string& locus) {
    constexpr std::size_t header = sizeof kAlgoMagic + 4 + 8;
    if (bytes.size() < header + 32) {
        throw CorruptArtifact(locus + ": truncated checkpoint (" + std::to_string(bytes.size()) +
                              " bytes)");
    }
    if (std::memcmp(bytes.data(), kAlgoMagic, sizeof kAlgoMagic) != 0) {
        throw CorruptArtifact(locus + ": bad magic");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t version = detail::get_u32_le(p + sizeof kAlgoMagic);
    if (version != kAlgoContainerVersion) {
        throw CorruptArtifact(locus + ": unsupported container version " + std::to_string(version));
    }
    const std::uint64_t payload_len = detail::get_u64_le(p + sizeof kAlgoMagic + 4);
    if (bytes.size() != header + payload_len + 32) {
        throw CorruptArtifact(locus + ": size mismatch, payload length field says " +
                              std::to_string(payload_len));
    }
    const std::string body = bytes.substr(0, header + payload_len);
    const auto digest = sha256_digest(body);
    if (std::memcmp(digest.data(), bytes.data() + header + payload_len, digest.size()) != 0) {
        throw CorruptArtifact(locus + ": checksum mismatch");
    }
    json j;
    try {
        j = json::parse(body.substr(header));
    } catch (const json::parse_error& e) {
        throw CorruptArtifact(locus + ": payload is not valid JSON: " + e.what());
    }
    return algorithm_state_from_json(j);
}

inline void save_algorithm(const Algorithm& algo, const std::string& path) {
    atomic_write(path, encode_algorithm_state(algo.state()));
}

inline AlgorithmState load_algorithm_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open checkpoint: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_algorithm_state(bytes, path);
}

inline std::unique_ptr<Algorithm> load_algorithm(const std::string& path) {
    return make_algorithm(load_algorithm_state(path));
}

}  // namespace pcbf
