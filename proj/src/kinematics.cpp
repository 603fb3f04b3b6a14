#include "contactnav/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace contactnav {

namespace {

Vec2 unit(double phi) { return {std::cos(phi), std::sin(phi)}; }
Vec2 left_normal(const Vec2& u) { return {-u.y(), u.x()}; }

std::vector<double> absolute_angles(const VecX& angles) {
    std::vector<double> phi(static_cast<std::size_t>(angles.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < angles.size(); ++i) {
        acc += angles[i];
        phi[static_cast<std::size_t>(i)] = acc;
    }
    return phi;
}

}  // namespace

void ArmModel::validate() const {
    const auto n = link_lengths.size();
    if (n < 1) throw std::invalid_argument("arm needs at least one link");
    if (link_masses.size() != n || joint_range.size() != n)
        throw std::invalid_argument("arm link_masses/joint_range must have one entry per link");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(link_lengths[i] > 0.0) || !(link_masses[i] > 0.0))
            throw std::invalid_argument("arm link lengths and masses must be > 0");
        if (!(joint_range[i].max > joint_range[i].min)) throw std::invalid_argument("empty joint range");
    }
    if (!(link_radius > 0.0)) throw std::invalid_argument("link radius must be > 0");
    if (steps_per_joint < 2) throw std::invalid_argument("steps_per_joint must be >= 2");
    if (surface_samples_per_link < 2) throw std::invalid_argument("surface_samples_per_link must be >= 2");
}

double ArmModel::step_size(int joint) const noexcept {
    const auto& r = joint_range[static_cast<std::size_t>(joint)];
    return (r.max - r.min) / (steps_per_joint - 1);
}

double ArmModel::joint_angle(int joint, double step) const noexcept {
    return joint_range[static_cast<std::size_t>(joint)].min + step * step_size(joint);
}

bool valid_config(const ArmModel& arm, const Config& q) noexcept {
    if (static_cast<int>(q.steps.size()) != arm.links()) return false;
    return std::all_of(q.steps.begin(), q.steps.end(),
                       [&](int s) { return s >= 0 && s < arm.steps_per_joint; });
}

VecX joint_angles(const ArmModel& arm, const Config& q) {
    VecX a(arm.links());
    for (int j = 0; j < arm.links(); ++j) a[j] = arm.joint_angle(j, q.steps[static_cast<std::size_t>(j)]);
    return a;
}

VecX interpolate_angles(const ArmModel& arm, const Config& from, const Config& to, double s) {
    VecX a(arm.links());
    for (int j = 0; j < arm.links(); ++j) {
        const auto k = static_cast<std::size_t>(j);
        a[j] = arm.joint_angle(j, (1.0 - s) * from.steps[k] + s * to.steps[k]);
    }
    return a;
}

std::vector<Vec2> forward_kinematics(const ArmModel& arm, const VecX& angles) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(arm.links()) + 1);
    pts.push_back(arm.base);
    double phi = 0.0;
    for (int i = 0; i < arm.links(); ++i) {
        phi += angles[i];
        pts.push_back(pts.back() + arm.link_lengths[static_cast<std::size_t>(i)] * unit(phi));
    }
    return pts;
}

std::vector<Vec2> forward_kinematics(const ArmModel& arm, const Config& q) {
    return forward_kinematics(arm, joint_angles(arm, q));
}

CellSet robot_cells(const ArmModel& arm, const VecX& angles, const GridSpec& spec) {
    const auto pts = forward_kinematics(arm, angles);
    std::vector<CellIndex> all;
    for (int i = 0; i < arm.links(); ++i) {
        const auto seg = rasterize_capsule(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(i) + 1],
                                           arm.link_radius, spec);
        all.insert(all.end(), seg.begin(), seg.end());
    }
    return CellSet(std::move(all));
}

CellSet robot_cells(const ArmModel& arm, const Config& q, const GridSpec& spec) {
    return robot_cells(arm, joint_angles(arm, q), spec);
}

void check_primitive(const Config& from, const Config& to) {
    if (from.steps.size() != to.steps.size()) throw InvalidPrimitive("configs have different joint counts");
    int changed = 0;
    for (std::size_t j = 0; j < from.steps.size(); ++j) {
        const int d = std::abs(from.steps[j] - to.steps[j]);
        if (d > 1) throw InvalidPrimitive("primitive moves a joint by more than one step");
        changed += d;
    }
    if (changed > 1) throw InvalidPrimitive("primitive moves more than one joint");
}

CellSet swept_cells(const ArmModel& arm, const Config& from, const Config& to, const GridSpec& spec,
                    int substeps, bool include_start) {
    check_primitive(from, to);
    substeps = std::max(substeps, 1);
    std::vector<CellIndex> all;
    for (int k = include_start ? 0 : 1; k <= substeps; ++k) {
        const auto cells =
            robot_cells(arm, interpolate_angles(arm, from, to, static_cast<double>(k) / substeps), spec);
        all.insert(all.end(), cells.begin(), cells.end());
    }
    return CellSet(std::move(all));
}

SurfacePoint surface_point(const ArmModel& arm, const VecX& angles, const SurfaceCoord& where) {
    const auto pts = forward_kinematics(arm, angles);
    const auto phi = absolute_angles(angles);
    const auto i = static_cast<std::size_t>(where.link);
    const Vec2 u = unit(phi[i]);
    const Vec2 nl = left_normal(u);
    SurfacePoint sp;
    sp.where = where;
    switch (where.side) {
    case Side::A:
    case Side::B: {
        const Vec2 n = where.side == Side::A ? nl : Vec2(-nl);
        sp.point = pts[i] + where.param * arm.link_lengths[i] * u + arm.link_radius * n;
        sp.normal = n;
        break;
    }
    case Side::Tip: {
        const double theta = (where.param - 0.5) * std::numbers::pi;
        const Vec2 dir = std::cos(theta) * u + std::sin(theta) * nl;
        sp.point = pts[i + 1] + arm.link_radius * dir;
        sp.normal = dir;
        break;
    }
    }
    return sp;
}

std::vector<SurfacePoint> surface_points(const ArmModel& arm, const VecX& angles) {
    std::vector<SurfacePoint> out;
    const int per_side = std::max(1, arm.surface_samples_per_link / 2);
    for (int link = 0; link < arm.links(); ++link) {
        for (Side side : {Side::A, Side::B}) {
            for (int k = 0; k < per_side; ++k) {
                const double t = per_side == 1 ? 0.5 : static_cast<double>(k) / (per_side - 1);
                out.push_back(surface_point(arm, angles, {link, side, t}));
            }
        }
    }
    for (int k = 0; k < kTipCapSamples; ++k) {
        const double t = static_cast<double>(k + 1) / (kTipCapSamples + 1);
        out.push_back(surface_point(arm, angles, {arm.links() - 1, Side::Tip, t}));
    }
    return out;
}

std::vector<SurfacePoint> surface_points(const ArmModel& arm, const Config& q) {
    return surface_points(arm, joint_angles(arm, q));
}

SurfaceCoord clamp_coord(const ArmModel& arm, SurfaceCoord c) {
    c.link = std::clamp(c.link, 0, arm.links() - 1);
    if (c.side == Side::Tip) c.link = arm.links() - 1;
    c.param = std::clamp(c.param, 0.0, 1.0);
    return c;
}

SurfacePoint project_to_surface(const ArmModel& arm, const VecX& angles, const Vec2& p) {
    const auto pts = forward_kinematics(arm, angles);
    const auto phi = absolute_angles(angles);
    double best = std::numeric_limits<double>::infinity();
    SurfaceCoord best_coord;
    for (int link = 0; link < arm.links(); ++link) {
        const auto i = static_cast<std::size_t>(link);
        const double len = arm.link_lengths[i];
        const Vec2 u = unit(phi[i]);
        const Vec2 nl = left_normal(u);
        for (Side side : {Side::A, Side::B}) {
            const Vec2 n = side == Side::A ? nl : Vec2(-nl);
            const Vec2 a = pts[i] + arm.link_radius * n;
            const double t = std::clamp((p - a).dot(u) / len, 0.0, 1.0);
            const double d = (p - (a + t * len * u)).norm();
            if (d < best) {
                best = d;
                best_coord = {link, side, t};
            }
        }
        if (link == arm.links() - 1) {
            const Vec2 rel = p - pts[i + 1];
            double theta = std::atan2(rel.dot(nl), rel.dot(u));
            theta = std::clamp(theta, -std::numbers::pi / 2, std::numbers::pi / 2);
            const Vec2 q = pts[i + 1] + arm.link_radius * (std::cos(theta) * u + std::sin(theta) * nl);
            const double d = (p - q).norm();
            if (d < best) {
                best = d;
                best_coord = {link, Side::Tip, theta / std::numbers::pi + 0.5};
            }
        }
    }
    return surface_point(arm, angles, best_coord);
}

Jacobian point_jacobian(const ArmModel& arm, const VecX& angles, int link, const Vec2& point) {
    const auto pts = forward_kinematics(arm, angles);
    Jacobian J = Jacobian::Zero(kAxes, arm.links());
    for (int j = 0; j <= link; ++j) {
        const Vec2 r = point - pts[static_cast<std::size_t>(j)];
        J.col(j) = Vec2(-r.y(), r.x());
    }
    return J;
}

Jacobian point_jacobian(const ArmModel& arm, const VecX& angles, const SurfacePoint& sp) {
    return point_jacobian(arm, angles, sp.where.link, sp.point);
}

}  // namespace contactnav
