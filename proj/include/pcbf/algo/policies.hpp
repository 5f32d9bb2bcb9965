#pragma once

#include "pcbf/algo/algorithm.hpp"
#include "pcbf/core/rng.hpp"

namespace pcbf {

// Uniform random actions over the full action box. The seeded stream is part
// of the serialized state, so save/load resumes the exact action sequence.
class RandomPolicy final : public Algorithm {
  public:
    RandomPolicy(double v_max, std::uint64_t seed) : v_max_(v_max), rng_(seed) {
        if (v_max <= 0.0) throw InvalidConfig("RandomPolicy: v_max must be > 0");
    }

    std::string name() const override { return "random"; }

    PredictResult predict(std::span<const double> observation,
                          const std::optional<Hidden>& hidden) override {
        (void)observation;
        return {rng_.in_box(v_max_), hidden};
    }

    AlgorithmState state() const override {
        return {"random", json{{"v_max", v_max_}}, rng_.serialize(), std::nullopt};
    }

    void restore(const AlgorithmState& s) override {
        if (s.kind != "random") throw InvalidConfig("RandomPolicy: state kind \"" + s.kind + "\"");
        v_max_ = get_number(s.parameters, "random policy state", "v_max");
        rng_.restore(s.rng_state);
    }

  private:
    double v_max_;
    Rng rng_;
};

inline constexpr int kTeacherObservationSize = 9;
inline constexpr int kTeacherGoalOffsetIndex = 4;  // goal offset occupies slots 4..5

// Proportional drive toward the goal offset found in the observation,
// clipped to the action box. Intentionally obstacle-blind: collision
// avoidance is the filter's job, which makes this a clean reference teacher.
class ScriptedTeacher final : public Algorithm {
  public:
    explicit ScriptedTeacher(double v_max, double k_p = 1.0) : v_max_(v_max), k_p_(k_p) {
        if (v_max <= 0.0) throw InvalidConfig("ScriptedTeacher: v_max must be > 0");
        if (k_p <= 0.0) throw InvalidConfig("ScriptedTeacher: k_p must be > 0");
    }

    std::string name() const override { return "scripted_teacher"; }

    PredictResult predict(std::span<const double> observation,
                          const std::optional<Hidden>& hidden) override {
        if (observation.size() != kTeacherObservationSize) {
            throw ShapeMismatch("ScriptedTeacher: observation arity " +
                                std::to_string(observation.size()) + ", expected " +
                                std::to_string(kTeacherObservationSize));
        }
        const Vec2 goal_offset{observation[kTeacherGoalOffsetIndex],
                               observation[kTeacherGoalOffsetIndex + 1]};
        return {clamp_box(k_p_ * goal_offset, v_max_), hidden};
    }

    AlgorithmState state() const override {
        return {"scripted_teacher", json{{"v_max", v_max_}, {"k_p", k_p_}}, "", std::nullopt};
    }

    void restore(const AlgorithmState& s) override {
        if (s.kind != "scripted_teacher") {
            throw InvalidConfig("ScriptedTeacher: state kind \"" + s.kind + "\"");
        }
        v_max_ = get_number(s.parameters, "teacher state", "v_max");
        k_p_ = get_number(s.parameters, "teacher state", "k_p");
    }

  private:
    double v_max_;
    double k_p_;
};

inline std::unique_ptr<Algorithm> make_algorithm(const AlgorithmState& s) {
    std::unique_ptr<Algorithm> a;
    if (s.kind == "random") {
        a = std::make_unique<RandomPolicy>(1.0, 0);
    } else if (s.kind == "scripted_teacher") {
        a = std::make_unique<ScriptedTeacher>(1.0);
    } else {
        throw InvalidConfig("make_algorithm: unknown kind \"" + s.kind + "\"");
    }
    a->restore(s);
    return a;
}

}  // namespace pcbf
