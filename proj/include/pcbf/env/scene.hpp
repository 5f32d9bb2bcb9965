#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcbf/core/errors.hpp"
#include "pcbf/core/rng.hpp"
#include "pcbf/core/vec2.hpp"

namespace pcbf {

enum class SceneType {
    open,
    single_static,
    multi_obstacle,
    dynamic_obstacle,
};

inline constexpr SceneType kAllSceneTypes[] = {SceneType::open, SceneType::single_static,
                                               SceneType::multi_obstacle, SceneType::dynamic_obstacle};

inline const char* scene_type_name(SceneType t) {
    switch (t) {
        case SceneType::open: return "open";
        case SceneType::single_static: return "single_static";
        case SceneType::multi_obstacle: return "multi_obstacle";
        case SceneType::dynamic_obstacle: return "dynamic_obstacle";
    }
    return "?";
}

inline SceneType parse_scene_type(const std::string& s) {
    for (SceneType t : kAllSceneTypes) {
        if (s == scene_type_name(t)) return t;
    }
    throw InvalidConfig("unknown scene type \"" + s + "\"");
}

struct Obstacle {
    Vec2 center;
    double radius = 1.0;
    Vec2 velocity;
};

// A scene is either an explicit obstacle list or, when obstacles is absent,
// a family regenerated from the reset seed on every reset.
struct SceneDescriptor {
    SceneType type = SceneType::open;
    std::optional<std::vector<Obstacle>> obstacles;
};

struct SceneGeometry {
    Vec2 spawn;
    Vec2 goal;
    double arena_half_extent = 50.0;
    double drone_radius = 0.3;
    double goal_radius = 1.0;
};

// Placement sentinel for obstacle-free scenes: far enough that both barriers
// are inert, yet a valid SafetyState so the filter runs unconditionally.
inline constexpr double kSentinelDistance = 1e6;
inline constexpr double kSentinelRadius = 1e-3;

inline Obstacle sentinel_obstacle() { return {{kSentinelDistance, 0.0}, kSentinelRadius, {0.0, 0.0}}; }

namespace detail {

inline bool obstacle_inside_arena(const Obstacle& o, double arena) {
    return std::abs(o.center.x) + o.radius <= arena && std::abs(o.center.y) + o.radius <= arena;
}

inline bool clears(const Obstacle& o, Vec2 point, double point_radius, double margin) {
    return distance(o.center, point) >= point_radius + o.radius + margin;
}

}  // namespace detail

// Randomized obstacle placement for the requested family. Placement is
// rejection-sampled inside the spawn-goal corridor with clearance margins so
// that the spawn never starts in violation and the goal stays reachable.
// Throws InvalidConfig when the corridor is too cramped to place anything.
inline std::vector<Obstacle> generate_scene(SceneType type, Rng& rng, const SceneGeometry& geom) {
    if (type == SceneType::open) return {};

    const Vec2 corridor = geom.goal - geom.spawn;
    const double len = norm(corridor);
    if (len <= kDegenerateNorm) throw InvalidConfig("generate_scene: spawn and goal coincide");
    const Vec2 along = corridor / len;
    const Vec2 across{-along.y, along.x};
    const auto point_at = [&](double t, double lateral) {
        return geom.spawn + t * corridor + lateral * across;
    };

    constexpr int kMaxTries = 1000;

    if (type == SceneType::single_static) {
        const double r_hi = std::min(2.5, 0.2 * len);
        const double r_lo = std::min(0.8, r_hi);
        const double lat = std::min(1.5, 0.3 * len);
        for (int i = 0; i < kMaxTries; ++i) {
            Obstacle ob;
            ob.radius = rng.uniform(r_lo, r_hi);
            ob.center = point_at(rng.uniform(0.3, 0.7), rng.uniform(-lat, lat));
            if (detail::clears(ob, geom.spawn, geom.drone_radius, 0.5) &&
                detail::clears(ob, geom.goal, geom.goal_radius, 0.5) &&
                detail::obstacle_inside_arena(ob, geom.arena_half_extent)) {
                return {ob};
            }
        }
        throw InvalidConfig("generate_scene: no valid single_static placement");
    }

    if (type == SceneType::multi_obstacle) {
        const double r_hi = std::min(1.8, 0.15 * len);
        const double r_lo = std::min(0.8, r_hi);
        const double lat = std::min(4.0, 0.3 * len);
        const int wanted = rng.uniform_int(3, 5);
        std::vector<Obstacle> out;
        for (int i = 0; i < 2 * kMaxTries && static_cast<int>(out.size()) < wanted; ++i) {
            Obstacle ob;
            ob.radius = rng.uniform(r_lo, r_hi);
            ob.center = point_at(rng.uniform(0.15, 0.85), rng.uniform(-lat, lat));
            if (!detail::clears(ob, geom.spawn, geom.drone_radius, 0.5) ||
                !detail::clears(ob, geom.goal, geom.goal_radius, 0.5) ||
                !detail::obstacle_inside_arena(ob, geom.arena_half_extent)) {
                continue;
            }
            bool overlaps = false;
            for (const Obstacle& other : out) {
                if (distance(ob.center, other.center) < ob.radius + other.radius + 0.3) {
                    overlaps = true;
                    break;
                }
            }
            if (!overlaps) out.push_back(ob);
        }
        if (static_cast<int>(out.size()) < wanted) {
            throw InvalidConfig("generate_scene: no valid multi_obstacle placement");
        }
        return out;
    }

    // dynamic_obstacle: starts off-corridor and drifts across it, so the
    // crossing happens mid-flight rather than at spawn.
    const double r_hi = std::min(2.0, 0.2 * len);
    const double r_lo = std::min(1.0, r_hi);
    for (int i = 0; i < kMaxTries; ++i) {
        Obstacle ob;
        ob.radius = rng.uniform(r_lo, r_hi);
        const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const double offset = rng.uniform(0.15 * len, 0.25 * len);
        ob.center = point_at(rng.uniform(0.35, 0.65), side * offset);
        const double speed = rng.uniform(0.5, 1.5);
        ob.velocity = speed * (-side * across) + rng.uniform(-0.3, 0.3) * along;
        if (detail::clears(ob, geom.spawn, geom.drone_radius, 1.0) &&
            detail::obstacle_inside_arena(ob, geom.arena_half_extent)) {
            return {ob};
        }
    }
    throw InvalidConfig("generate_scene: no valid dynamic_obstacle placement");
}

}  // namespace pcbf
