#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "pcbf/env/env.hpp"
#include "pcbf/env/vec_env.hpp"
#include "support.hpp"

using namespace pcbf;
using Catch::Approx;

namespace {

EnvConfig corridor_config() {
    EnvConfig cfg;  // defaults already describe the 40 m corridor
    return cfg;
}

EnvConfig explicit_obstacle_config(std::vector<Obstacle> obs) {
    EnvConfig cfg = corridor_config();
    cfg.scene.type = SceneType::single_static;
    cfg.scene.obstacles = std::move(obs);
    return cfg;
}

}  // namespace

TEST_CASE("env config validation rejects bad fields") {
    CHECK_NOTHROW(corridor_config().validate());

    EnvConfig c = corridor_config();
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);

    c = corridor_config();
    c.max_steps = 0;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);

    c = corridor_config();
    c.goal_position = {60.0, 0.0};
    CHECK_THROWS_AS(c.validate(), InvalidConfig);

    c = corridor_config();
    c.drone_radius = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);

    c = corridor_config();
    c.v_max = -1.0;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);

    c = explicit_obstacle_config({{{0.0, 0.0}, 0.0, {}}});
    CHECK_THROWS_AS(c.validate(), InvalidConfig);  // zero radius

    // Obstacle sitting on the spawn point.
    c = explicit_obstacle_config({{{-20.0, 0.0}, 1.0, {}}});
    CHECK_THROWS_AS(c.validate(), InvalidConfig);

    c = explicit_obstacle_config({{{0.0, std::numeric_limits<double>::infinity()}, 1.0, {}}});
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
}

TEST_CASE("env config JSON round trip is exact and strict") {
    EnvConfig c = explicit_obstacle_config({{{1.5, -2.0}, 1.25, {0.1, -0.2}}});
    c.seed = 77;
    c.dt = 0.025;

    const json j = env_config_to_json(c);
    const EnvConfig back = env_config_from_json(j);
    CHECK(back.dt == c.dt);
    CHECK(back.seed == c.seed);
    CHECK(back.spawn_position == c.spawn_position);
    REQUIRE(back.scene.obstacles.has_value());
    CHECK(back.scene.obstacles->at(0).center == Vec2{1.5, -2.0});
    CHECK(back.scene.obstacles->at(0).radius == 1.25);

    json extra = j;
    extra["bogus"] = 1;
    CHECK_THROWS_AS(env_config_from_json(extra), InvalidConfig);

    json missing = j;
    missing.erase("dt");
    CHECK_THROWS_AS(env_config_from_json(missing), InvalidConfig);

    json negative_seed = j;
    negative_seed["seed"] = -1;
    CHECK_THROWS_AS(env_config_from_json(negative_seed), InvalidConfig);

    json bad_vec = j;
    bad_vec["spawn_position"] = json::array({1.0});
    CHECK_THROWS_AS(env_config_from_json(bad_vec), InvalidConfig);
}

TEST_CASE("reset is deterministic per seed and sensitive to it") {
    EnvConfig cfg = corridor_config();
    cfg.scene.type = SceneType::single_static;  // regenerated from the seed

    AvoidanceEnv a(cfg);
    AvoidanceEnv b(cfg);
    const ResetResult r1 = a.reset(7);
    const ResetResult r2 = a.reset(7);
    const ResetResult r3 = b.reset(7);
    CHECK(r1.observation == r2.observation);
    CHECK(r1.observation == r3.observation);
    CHECK(a.obstacles().at(0).center == b.obstacles().at(0).center);

    const ResetResult r4 = b.reset(8);
    CHECK(r1.observation != r4.observation);
}

TEST_CASE("observation layout: position, velocity, goal offset, obstacle offset, radius") {
    const EnvConfig cfg = explicit_obstacle_config({{{0.0, 1.0}, 1.5, {}}});
    AvoidanceEnv env(cfg);
    const ResetResult r = env.reset(0);
    REQUIRE(r.observation.size() == AvoidanceEnv::kObservationSize);
    CHECK(r.observation[0] == -20.0);
    CHECK(r.observation[1] == 0.0);
    CHECK(r.observation[2] == 0.0);
    CHECK(r.observation[3] == 0.0);
    CHECK(r.observation[4] == 40.0);
    CHECK(r.observation[5] == 0.0);
    CHECK(r.observation[6] == 20.0);
    CHECK(r.observation[7] == 1.0);
    CHECK(r.observation[8] == 1.5);

    // Obstacle-free scene reports the far sentinel.
    AvoidanceEnv open_env(corridor_config());
    const ResetResult ro = open_env.reset(0);
    CHECK(ro.observation[6] == Approx(1e6 + 20.0));
    CHECK(ro.observation[8] == 1e-3);
    CHECK(h_hard(ro.safety) > 1e9);
}

TEST_CASE("collision outranks leaving the arena on the same step") {
    EnvConfig cfg = corridor_config();
    cfg.spawn_position = {49.9, 0.0};
    cfg.goal_position = {0.0, 0.0};
    cfg.scene.type = SceneType::single_static;
    cfg.scene.obstacles = {{{51.5, 0.0}, 1.2, {}}};
    AvoidanceEnv env(cfg);
    env.reset(0);
    const StepResult s = env.step({5.0, 0.0});  // lands at 50.15: outside AND overlapping
    REQUIRE(s.terminated);
    REQUIRE(s.reason.has_value());
    CHECK(*s.reason == TerminationReason::collision);
    CHECK(env.hard_constraint_violations().count == 1);
    CHECK(s.reward == Approx(-0.25 - 10.0));
}

TEST_CASE("straight run reaches the goal with terminal bonus") {
    AvoidanceEnv env(corridor_config());
    env.reset(0);
    StepResult s;
    int steps = 0;
    do {
        s = env.step({5.0, 0.0});
        ++steps;
    } while (!s.terminated && !s.truncated);
    CHECK(steps == 156);  // 39 m of progress at 0.25 m per step
    REQUIRE(s.reason.has_value());
    CHECK(*s.reason == TerminationReason::success);
    CHECK(s.terminated);
    CHECK_FALSE(s.truncated);
    CHECK(s.reward == 10.25);
    CHECK(env.safety_metrics().at("distance_to_goal") == Approx(1.0));
}

TEST_CASE("timeout truncates without terminating and further steps throw") {
    EnvConfig cfg = corridor_config();
    cfg.max_steps = 5;
    AvoidanceEnv env(cfg);
    env.reset(0);
    StepResult s;
    for (int i = 0; i < 5; ++i) s = env.step({0.0, 0.0});
    CHECK_FALSE(s.terminated);
    CHECK(s.truncated);
    REQUIRE(s.reason.has_value());
    CHECK(*s.reason == TerminationReason::timeout);
    CHECK(s.reward == 0.0);
    CHECK_THROWS_AS(env.step({0.0, 0.0}), SteppedAfterTermination);
}

TEST_CASE("leaving the arena terminates with the -5 penalty") {
    EnvConfig cfg = corridor_config();
    cfg.spawn_position = {49.9, 0.0};
    cfg.goal_position = {0.0, 0.0};
    AvoidanceEnv env(cfg);
    env.reset(0);
    const StepResult s = env.step({5.0, 0.0});
    REQUIRE(s.reason.has_value());
    CHECK(*s.reason == TerminationReason::out_of_arena);
    CHECK(s.reward == Approx(-0.25 - 5.0));
}

TEST_CASE("rewards are bounded and live episodes stay inside the arena") {
    EnvConfig cfg = corridor_config();
    cfg.scene.type = SceneType::multi_obstacle;
    cfg.max_steps = 200;
    const double bound = std::sqrt(2.0) * cfg.v_max * cfg.dt + 10.0 + 1e-12;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        AvoidanceEnv env(cfg);
        env.reset(seed);
        Rng rng(mix_seed(seed, 1));
        while (!env.done()) {
            const StepResult s = env.step(rng.in_box(cfg.v_max));
            INFO("seed " << seed << " step " << env.step_count());
            REQUIRE(std::abs(s.reward) <= bound);
            if (!s.terminated && !s.truncated) {
                REQUIRE(std::abs(s.observation[0]) <= cfg.arena_half_extent);
                REQUIRE(std::abs(s.observation[1]) <= cfg.arena_half_extent);
            }
        }
    }
}

TEST_CASE("generated scene families satisfy their placement contracts") {
    const SceneGeometry geom{{-20.0, 0.0}, {20.0, 0.0}, 50.0, 0.3, 1.0};

    SECTION("open is empty") {
        Rng rng(0);
        CHECK(generate_scene(SceneType::open, rng, geom).empty());
    }

    SECTION("single_static") {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            Rng rng(seed);
            const auto obs = generate_scene(SceneType::single_static, rng, geom);
            INFO("seed " << seed);
            REQUIRE(obs.size() == 1);
            const Obstacle& ob = obs[0];
            REQUIRE(ob.radius >= 0.8);
            REQUIRE(ob.radius <= 2.5);
            REQUIRE(ob.center.x >= -8.0);  // t in [0.3, 0.7] of the 40 m corridor
            REQUIRE(ob.center.x <= 8.0);
            REQUIRE(std::abs(ob.center.y) <= 1.5);
            REQUIRE(distance(ob.center, geom.spawn) >= 0.3 + ob.radius + 0.5);
            REQUIRE(distance(ob.center, geom.goal) >= 1.0 + ob.radius + 0.5);
            REQUIRE(ob.velocity == Vec2{0.0, 0.0});
        }
    }

    SECTION("multi_obstacle") {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            Rng rng(seed);
            const auto obs = generate_scene(SceneType::multi_obstacle, rng, geom);
            INFO("seed " << seed);
            REQUIRE(obs.size() >= 3);
            REQUIRE(obs.size() <= 5);
            for (std::size_t i = 0; i < obs.size(); ++i) {
                REQUIRE(obs[i].radius >= 0.8);
                REQUIRE(obs[i].radius <= 1.8);
                REQUIRE(std::abs(obs[i].center.y) <= 4.0);
                REQUIRE(distance(obs[i].center, geom.spawn) >= 0.3 + obs[i].radius + 0.5);
                REQUIRE(distance(obs[i].center, geom.goal) >= 1.0 + obs[i].radius + 0.5);
                for (std::size_t k = i + 1; k < obs.size(); ++k) {
                    REQUIRE(distance(obs[i].center, obs[k].center) >=
                            obs[i].radius + obs[k].radius + 0.3 - 1e-12);
                }
            }
        }
    }

    SECTION("dynamic_obstacle crosses the corridor from off to the side") {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            Rng rng(seed);
            const auto obs = generate_scene(SceneType::dynamic_obstacle, rng, geom);
            INFO("seed " << seed);
            REQUIRE(obs.size() == 1);
            const Obstacle& ob = obs[0];
            REQUIRE(ob.radius >= 1.0);
            REQUIRE(ob.radius <= 2.0);
            REQUIRE(std::abs(ob.center.y) >= 6.0);   // 0.15 * corridor length
            REQUIRE(std::abs(ob.center.y) <= 10.0);  // 0.25 * corridor length
            REQUIRE(std::abs(ob.center.x) <= 6.0);
            // Lateral velocity points back toward the corridor.
            REQUIRE(ob.center.y * ob.velocity.y < 0.0);
            REQUIRE(std::abs(ob.velocity.y) >= 0.5);
            REQUIRE(std::abs(ob.velocity.y) <= 1.5);
            REQUIRE(std::abs(ob.velocity.x) <= 0.3);
            REQUIRE(distance(ob.center, geom.spawn) >= 0.3 + ob.radius + 1.0);
        }
    }

    SECTION("same seed reproduces, different seed varies") {
        Rng r1(5), r2(5), r3(6);
        const auto a = generate_scene(SceneType::single_static, r1, geom);
        const auto b = generate_scene(SceneType::single_static, r2, geom);
        const auto c = generate_scene(SceneType::single_static, r3, geom);
        CHECK(a[0].center == b[0].center);
        CHECK(a[0].radius == b[0].radius);
        CHECK(!(a[0].center == c[0].center));
    }
}

TEST_CASE("moving obstacles drift each step and reflect off the walls") {
    EnvConfig cfg = corridor_config();
    cfg.scene.type = SceneType::dynamic_obstacle;
    cfg.scene.obstacles = {{{0.0, 5.0}, 1.0, {0.0, -1.0}}};
    cfg.max_steps = 1500;
    AvoidanceEnv env(cfg);
    env.reset(0);
    for (int i = 0; i < 10; ++i) env.step({0.0, 0.0});
    CHECK(env.obstacles()[0].center.y == Approx(4.5));
    CHECK(env.obstacles()[0].center.x == 0.0);

    // Run long enough to hit the bottom wall; the disk must never poke out.
    bool flipped = false;
    while (!env.done()) {
        env.step({0.0, 0.0});
        const Obstacle& ob = env.obstacles()[0];
        REQUIRE(std::abs(ob.center.y) + ob.radius <= cfg.arena_half_extent + 1e-9);
        if (ob.velocity.y > 0.0) flipped = true;
    }
    CHECK(flipped);
}

TEST_CASE("safety state tracks the most critical obstacle") {
    EnvConfig cfg = corridor_config();
    cfg.scene.type = SceneType::multi_obstacle;
    // Nearer disk (h = 4 - 0.64) beats the bigger one (h = 16 - 5.29).
    cfg.scene.obstacles = {{{-18.0, 0.0}, 0.5, {}}, {{-16.0, 0.0}, 2.0, {}}};
    AvoidanceEnv env(cfg);
    const ResetResult r = env.reset(0);
    CHECK(r.safety.rel_position == Vec2{-2.0, 0.0});
    CHECK(r.safety.obstacle_radius == 0.5);
    CHECK(r.observation[6] == 2.0);
    CHECK(r.observation[8] == 0.5);
}

TEST_CASE("violation counter and metric params") {
    EnvConfig cfg = explicit_obstacle_config({{{-15.0, 0.0}, 1.5, {}}});
    cfg.goal_position = {0.0, 0.0};

    const auto run = [&](std::optional<BarrierParams> metric_params) {
        AvoidanceEnv env(cfg);
        if (metric_params) env.set_metric_params(*metric_params);
        env.reset(0);
        while (!env.done()) env.step({5.0, 0.0});  // drives straight through the disk
        return std::pair{env.safety_metrics(), env.hard_constraint_violations().count};
    };

    const auto [plain_metrics, violations] = run(std::nullopt);
    CHECK(violations >= 1);
    CHECK(plain_metrics.at("min_h_hard") < 0.0);

    BarrierParams slow_brakes;
    slow_brakes.tau_lag = 0.5;
    slow_brakes.a_max = 1.0;
    const auto [margin_metrics, violations2] = run(slow_brakes);
    CHECK(violations2 == violations);
    CHECK(margin_metrics.at("min_h_hard") == plain_metrics.at("min_h_hard"));
    CHECK(margin_metrics.at("min_h_soft") < plain_metrics.at("min_h_soft"));
}

TEST_CASE("vector env matches scalar envs stepped in sequence") {
    EnvConfig cfg = corridor_config();
    cfg.scene.type = SceneType::single_static;
    cfg.max_steps = 80;

    AvoidanceVecEnv vec(cfg, 3);
    const auto first = vec.vec_reset(11);
    REQUIRE(first.size() == 3);

    std::vector<AvoidanceEnv> scalars;
    std::vector<std::vector<double>> scalar_obs;
    for (std::uint64_t i = 0; i < 3; ++i) {
        scalars.emplace_back(cfg);
        scalar_obs.push_back(scalars.back().reset(11 + i).observation);
    }
    for (std::size_t i = 0; i < 3; ++i) CHECK(first[i].observation == scalar_obs[i]);

    Rng rng(99);
    for (int step = 0; step < 80; ++step) {
        std::vector<Vec2> actions;
        for (int i = 0; i < 3; ++i) actions.push_back(rng.in_box(2.0));
        bool any_done = false;
        for (const auto& env : scalars) any_done |= env.done();
        if (any_done) break;
        const auto vec_out = vec.vec_step(actions);
        for (std::size_t i = 0; i < 3; ++i) {
            const StepResult s = scalars[i].step(actions[i]);
            INFO("step " << step << " env " << i);
            REQUIRE(vec_out[i].observation == s.observation);
            REQUIRE(vec_out[i].reward == s.reward);
            REQUIRE(vec_out[i].terminated == s.terminated);
            REQUIRE(vec_out[i].truncated == s.truncated);
        }
    }
}

TEST_CASE("vector env rejects bad batches and finished episodes") {
    EnvConfig cfg = corridor_config();
    cfg.max_steps = 2;
    AvoidanceVecEnv vec(cfg, 2);
    vec.vec_reset(0);
    CHECK_THROWS_AS(vec.vec_step(std::vector<Vec2>{{0.0, 0.0}}), BatchShapeMismatch);

    const std::vector<Vec2> zeros = {{0.0, 0.0}, {0.0, 0.0}};
    vec.vec_step(zeros);
    vec.vec_step(zeros);  // both envs hit the 2-step timeout together
    CHECK_THROWS_AS(vec.vec_step(zeros), SteppedAfterTermination);

    CHECK_THROWS_AS(AvoidanceVecEnv(cfg, 0), InvalidConfig);
}
