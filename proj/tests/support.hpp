// Shared fixtures for the unit and property tests.

#pragma once

#include <cmath>
#include <numbers>

#include "contactnav/benchmark.hpp"
#include "contactnav/rng.hpp"

namespace testing {

using namespace contactnav;

inline constexpr double kDeg = std::numbers::pi / 180.0;

inline GridSpec small_grid(int nx = 16, int ny = 16, double res = 0.05) {
    GridSpec s;
    s.dims = {nx, ny};
    s.resolution = res;
    s.origin = Vec2::Zero();
    return s;
}

inline ArmModel two_link_arm() {
    ArmModel a;
    a.base = Vec2(0.4, 0.4);
    a.link_lengths = {0.3, 0.25};
    a.link_masses = {1.0, 0.7};
    a.link_radius = 0.036;  // just over half a cell diagonal, so the footprint never vanishes
    a.steps_per_joint = 8;
    a.joint_range = {{-std::numbers::pi, std::numbers::pi * 0.75}, {-150 * kDeg, 150 * kDeg}};
    return a;
}

inline ArmModel three_link_arm() {
    return reference_template(Domain::Pipe).arm;
}

inline VecX random_angles(const ArmModel& arm, Rng& rng) {
    VecX q(arm.links());
    for (int j = 0; j < arm.links(); ++j) q[j] = rng.uniform(arm.joint_range[j].min, arm.joint_range[j].max);
    return q;
}

inline Config random_config(const ArmModel& arm, Rng& rng) {
    Config q;
    for (int j = 0; j < arm.links(); ++j) q.steps.push_back(static_cast<int>(rng.uniform_int(0, arm.steps_per_joint - 1)));
    return q;
}

inline Config config_of(std::initializer_list<int> steps) { return Config{std::vector<int>(steps)}; }

/// Brute-force capsule test, written independently of the library.
inline bool near_segment(const Vec2& p, const Vec2& a, const Vec2& b, double r) {
    const double abx = b.x() - a.x(), aby = b.y() - a.y();
    const double len2 = abx * abx + aby * aby;
    double t = len2 > 0 ? ((p.x() - a.x()) * abx + (p.y() - a.y()) * aby) / len2 : 0.0;
    t = t < 0 ? 0 : (t > 1 ? 1 : t);
    const double dx = p.x() - (a.x() + t * abx), dy = p.y() - (a.y() + t * aby);
    return dx * dx + dy * dy <= r * r;
}

/// Scenario on an empty or hand-built world with the 2-link test arm.
inline Scenario small_scenario(const GroundTruthGrid& world, const Config& start, const Config& goal) {
    Scenario sc;
    sc.arm = two_link_arm();
    sc.world = world;
    sc.start = start;
    sc.goal = goal;
    sc.cost_model.beta = 0.0;
    return sc;
}

}  // namespace testing
