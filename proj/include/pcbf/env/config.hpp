#pragma once

#include <cmath>
#include <cstdint>

#include "pcbf/core/jsonio.hpp"
#include "pcbf/env/scene.hpp"

namespace pcbf {

struct EnvConfig {
    double arena_half_extent = 50.0;
    double dt = 0.05;
    int max_steps = 400;
    Vec2 spawn_position{-20.0, 0.0};
    Vec2 goal_position{20.0, 0.0};
    double goal_radius = 1.0;
    double drone_radius = 0.3;
    double v_max = 5.0;
    SceneDescriptor scene;
    std::uint64_t seed = 0;

    void validate() const {
        const bool finite = std::isfinite(arena_half_extent) && std::isfinite(dt) &&
                            std::isfinite(goal_radius) && std::isfinite(drone_radius) &&
                            std::isfinite(v_max) && is_finite(spawn_position) && is_finite(goal_position);
        if (!finite) throw InvalidConfig("EnvConfig: non-finite field");
        if (arena_half_extent <= 0.0) throw InvalidConfig("EnvConfig: arena_half_extent must be > 0");
        if (dt <= 0.0) throw InvalidConfig("EnvConfig: dt must be > 0");
        if (max_steps < 1) throw InvalidConfig("EnvConfig: max_steps must be >= 1");
        if (goal_radius <= 0.0) throw InvalidConfig("EnvConfig: goal_radius must be > 0");
        if (drone_radius <= 0.0) throw InvalidConfig("EnvConfig: drone_radius must be > 0");
        if (v_max <= 0.0) throw InvalidConfig("EnvConfig: v_max must be > 0");
        const auto inside = [&](Vec2 p) {
            return std::abs(p.x) <= arena_half_extent && std::abs(p.y) <= arena_half_extent;
        };
        if (!inside(spawn_position)) throw InvalidConfig("EnvConfig: spawn outside arena");
        if (!inside(goal_position)) throw InvalidConfig("EnvConfig: goal outside arena");
        if (scene.obstacles) {
            for (const Obstacle& ob : *scene.obstacles) {
                if (!is_finite(ob.center) || !is_finite(ob.velocity) || !std::isfinite(ob.radius)) {
                    throw InvalidConfig("EnvConfig: non-finite obstacle");
                }
                if (ob.radius <= 0.0) throw InvalidConfig("EnvConfig: obstacle radius must be > 0");
                // Spawn clearance keeps h_hard >= 0 at reset.
                if (distance(spawn_position, ob.center) < drone_radius + ob.radius) {
                    throw InvalidConfig("EnvConfig: obstacle overlaps the spawn region");
                }
            }
        }
    }
};

inline json scene_to_json(const SceneDescriptor& s) {
    json j{{"type", scene_type_name(s.type)}};
    if (s.obstacles) {
        json arr = json::array();
        for (const Obstacle& ob : *s.obstacles) {
            arr.push_back({{"center", ob.center}, {"radius", ob.radius}, {"velocity", ob.velocity}});
        }
        j["obstacles"] = arr;
    }
    return j;
}

inline SceneDescriptor scene_from_json(const json& j) {
    require_keys(j, "scene", {"type"}, {"obstacles"});
    SceneDescriptor s;
    s.type = parse_scene_type(get_string(j, "scene", "type"));
    if (j.contains("obstacles")) {
        if (!j["obstacles"].is_array()) throw InvalidConfig("scene: \"obstacles\" must be an array");
        std::vector<Obstacle> obs;
        for (const json& jo : j["obstacles"]) {
            require_keys(jo, "obstacle", {"center", "radius", "velocity"});
            Obstacle ob;
            ob.center = jo["center"].get<Vec2>();
            ob.radius = get_number(jo, "obstacle", "radius");
            ob.velocity = jo["velocity"].get<Vec2>();
            obs.push_back(ob);
        }
        s.obstacles = std::move(obs);
    }
    return s;
}

inline json env_config_to_json(const EnvConfig& c) {
    return json{{"arena_half_extent", c.arena_half_extent},
                {"dt", c.dt},
                {"max_steps", c.max_steps},
                {"spawn_position", c.spawn_position},
                {"goal_position", c.goal_position},
                {"goal_radius", c.goal_radius},
                {"drone_radius", c.drone_radius},
                {"v_max", c.v_max},
                {"scene", scene_to_json(c.scene)},
                {"seed", c.seed}};
}

inline EnvConfig env_config_from_json(const json& j) {
    require_keys(j, "env",
                 {"arena_half_extent", "dt", "max_steps", "spawn_position", "goal_position",
                  "goal_radius", "drone_radius", "v_max", "scene", "seed"});
    EnvConfig c;
    c.arena_half_extent = get_number(j, "env", "arena_half_extent");
    c.dt = get_number(j, "env", "dt");
    c.max_steps = static_cast<int>(get_integer(j, "env", "max_steps"));
    c.spawn_position = j["spawn_position"].get<Vec2>();
    c.goal_position = j["goal_position"].get<Vec2>();
    c.goal_radius = get_number(j, "env", "goal_radius");
    c.drone_radius = get_number(j, "env", "drone_radius");
    c.v_max = get_number(j, "env", "v_max");
    c.scene = scene_from_json(j["scene"]);
    const auto seed = get_integer(j, "env", "seed");
    if (seed < 0) throw InvalidConfig("env: \"seed\" must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.validate();
    return c;
}

}  // namespace pcbf
