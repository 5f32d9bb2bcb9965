#pragma once

#include <string>

#include "pcbf/env/config.hpp"
#include "pcbf/safety/types.hpp"

namespace pcbf {

inline json barrier_params_to_json(const BarrierParams& p) {
    return json{{"alpha", p.alpha}, {"tau_lag", p.tau_lag}, {"a_max", p.a_max}, {"v_max", p.v_max}};
}

inline BarrierParams barrier_params_from_json(const json& j) {
    require_keys(j, "barrier params", {"alpha", "tau_lag", "a_max", "v_max"});
    BarrierParams p;
    p.alpha = get_number(j, "barrier params", "alpha");
    p.tau_lag = get_number(j, "barrier params", "tau_lag");
    p.a_max = get_number(j, "barrier params", "a_max");
    p.v_max = get_number(j, "barrier params", "v_max");
    p.validate();
    return p;
}

struct PolicySpec {
    std::string kind = "scripted";
    double k_p = 1.0;  // teacher gain; ignored by the random policy

    void validate() const {
        if (kind != "scripted" && kind != "random") {
            throw InvalidConfig("policy: unknown kind \"" + kind + "\"");
        }
        if (!(k_p > 0.0) || !std::isfinite(k_p)) throw InvalidConfig("policy: k_p must be > 0");
    }
};

inline json policy_spec_to_json(const PolicySpec& p) {
    return json{{"kind", p.kind}, {"k_p", p.k_p}};
}

inline PolicySpec policy_spec_from_json(const json& j) {
    require_keys(j, "policy", {"kind"}, {"k_p"});
    PolicySpec p;
    p.kind = get_string(j, "policy", "kind");
    if (j.contains("k_p")) p.k_p = get_number(j, "policy", "k_p");
    p.validate();
    return p;
}

// Top-level config for batched rollout runs. The filter's action bound must
// equal the env's, otherwise the filter would certify actions the env then
// re-clips behind its back.
struct RunConfig {
    EnvConfig env;
    BarrierParams barrier;
    PolicySpec policy;
    int num_envs = 1;
    int episodes = 1;
    std::uint64_t seed = 0;
    std::string output_dir;

    void validate() const {
        env.validate();
        barrier.validate();
        policy.validate();
        if (num_envs < 1) throw InvalidConfig("run config: num_envs must be >= 1");
        if (episodes < 1) throw InvalidConfig("run config: episodes must be >= 1");
        if (barrier.v_max != env.v_max) {
            throw InvalidConfig("run config: barrier.v_max must equal env.v_max");
        }
    }
};

inline json run_config_to_json(const RunConfig& c) {
    return json{{"env", env_config_to_json(c.env)},
                {"barrier", barrier_params_to_json(c.barrier)},
                {"policy", policy_spec_to_json(c.policy)},
                {"num_envs", c.num_envs},
                {"episodes", c.episodes},
                {"seed", c.seed},
                {"output_dir", c.output_dir}};
}

inline RunConfig run_config_from_json(const json& j) {
    require_keys(j, "run config",
                 {"env", "barrier", "policy", "num_envs", "episodes", "seed", "output_dir"});
    RunConfig c;
    c.env = env_config_from_json(j.at("env"));
    c.barrier = barrier_params_from_json(j.at("barrier"));
    c.policy = policy_spec_from_json(j.at("policy"));
    c.num_envs = static_cast<int>(get_integer(j, "run config", "num_envs"));
    c.episodes = static_cast<int>(get_integer(j, "run config", "episodes"));
    const std::int64_t seed = get_integer(j, "run config", "seed");
    if (seed < 0) throw InvalidConfig("run config: seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.output_dir = get_string(j, "run config", "output_dir");
    c.validate();
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    return run_config_from_json(parse_json_file(path));
}

}  // namespace pcbf
