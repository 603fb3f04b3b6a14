// Planar N-link arm: forward kinematics, cell footprints, swept volumes,
// capsule surface points and point Jacobians.
//
// Joint angles are relative: link i points along the absolute angle
// phi_i = q_0 + ... + q_i. Each link is a capsule (segment plus radius).

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "contactnav/grid.hpp"

namespace contactnav {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Jacobian = Eigen::Matrix<double, kAxes, Eigen::Dynamic>;

class InvalidPrimitive : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct JointRange {
    double min = 0.0;
    double max = 0.0;
};

struct ArmModel {
    Vec2 base = Vec2::Zero();
    std::vector<double> link_lengths;
    double link_radius = 0.02;
    std::vector<double> link_masses;
    int steps_per_joint = 2;
    std::vector<JointRange> joint_range;
    int surface_samples_per_link = 16;

    [[nodiscard]] int links() const noexcept { return static_cast<int>(link_lengths.size()); }
    void validate() const;
    /// Lattice step k of joint j mapped to radians.
    [[nodiscard]] double joint_angle(int joint, double step) const noexcept;
    [[nodiscard]] double step_size(int joint) const noexcept;
};

/// Lattice configuration: integer step per joint.
struct Config {
    std::vector<int> steps;

    bool operator==(const Config&) const = default;
    auto operator<=>(const Config&) const = default;
};

[[nodiscard]] bool valid_config(const ArmModel& arm, const Config& q) noexcept;

/// Joint angles of a lattice configuration.
VecX joint_angles(const ArmModel& arm, const Config& q);
/// Joint angles at fraction s of the way from `from` to `to` (linear in angle).
VecX interpolate_angles(const ArmModel& arm, const Config& from, const Config& to, double s);

/// Joint (segment start) positions plus the tip: L + 1 points.
std::vector<Vec2> forward_kinematics(const ArmModel& arm, const VecX& angles);
std::vector<Vec2> forward_kinematics(const ArmModel& arm, const Config& q);

CellSet robot_cells(const ArmModel& arm, const VecX& angles, const GridSpec& spec);
CellSet robot_cells(const ArmModel& arm, const Config& q, const GridSpec& spec);

/// Throws InvalidPrimitive unless `from` and `to` differ by at most one step
/// in at most one joint.
void check_primitive(const Config& from, const Config& to);

inline constexpr int kDefaultSubsteps = 8;

/// Union of footprints at s = k / substeps for k = 1..substeps (k = 0 too when
/// `include_start` is set, which makes the sweep symmetric in from/to).
CellSet swept_cells(const ArmModel& arm, const Config& from, const Config& to, const GridSpec& spec,
                    int substeps = kDefaultSubsteps, bool include_start = false);

enum class Side : std::uint8_t { A, B, Tip };

/// Intrinsic coordinates of a point on the capsule boundary. For sides A/B,
/// `param` is the arc-length fraction from the link's proximal end; side A
/// carries the left normal (+90 deg from the link direction). For the tip cap
/// of the last link, `param` maps [0, 1] to angles [-90, +90] deg about the
/// link direction.
struct SurfaceCoord {
    int link = 0;
    Side side = Side::A;
    double param = 0.0;

    bool operator==(const SurfaceCoord&) const = default;
};

struct SurfacePoint {
    SurfaceCoord where;
    Vec2 point = Vec2::Zero();
    Vec2 normal = Vec2::UnitY();
};

SurfacePoint surface_point(const ArmModel& arm, const VecX& angles, const SurfaceCoord& where);

/// Evenly spaced samples: surface_samples_per_link / 2 per side on every
/// link, plus kTipCapSamples on the distal cap of the last link.
inline constexpr int kTipCapSamples = 3;
std::vector<SurfacePoint> surface_points(const ArmModel& arm, const VecX& angles);
std::vector<SurfacePoint> surface_points(const ArmModel& arm, const Config& q);

/// Nearest boundary point of the arm to `p` (over all link capsules).
SurfacePoint project_to_surface(const ArmModel& arm, const VecX& angles, const Vec2& p);

/// Clamps an intrinsic coordinate to its valid range; identity on valid input.
SurfaceCoord clamp_coord(const ArmModel& arm, SurfaceCoord c);

/// d(point)/d(angle_j) for a point rigidly attached to link `link`.
Jacobian point_jacobian(const ArmModel& arm, const VecX& angles, int link, const Vec2& point);
Jacobian point_jacobian(const ArmModel& arm, const VecX& angles, const SurfacePoint& sp);

}  // namespace contactnav
