// Rigid-body dynamics of the planar arm with uniform-rod links.
//
//   H(q) a + C(q, v) v + g(q) = tau + tau_ext
//
// C is built from Christoffel symbols of H, so dH/dt - 2C is skew-symmetric.

#pragma once

#include <vector>

#include "contactnav/kinematics.hpp"

namespace contactnav {

MatX inertia_matrix(const ArmModel& arm, const VecX& q);
/// dH/dq_c for c = 0..L-1.
std::vector<MatX> inertia_derivatives(const ArmModel& arm, const VecX& q);
MatX coriolis_matrix(const ArmModel& arm, const VecX& q, const VecX& v);
VecX gravity_torque(const ArmModel& arm, const VecX& q, const Vec2& gravity);
VecX inverse_dynamics(const ArmModel& arm, const VecX& q, const VecX& v, const VecX& a, const Vec2& gravity);

/// The terms the momentum observer needs from a robot model.
class DynamicsModel {
public:
    virtual ~DynamicsModel() = default;
    [[nodiscard]] virtual MatX inertia(const VecX& q) const = 0;
    [[nodiscard]] virtual MatX coriolis(const VecX& q, const VecX& v) const = 0;
    [[nodiscard]] virtual VecX gravity(const VecX& q) const = 0;
};

class PlanarArmDynamics final : public DynamicsModel {
public:
    PlanarArmDynamics(ArmModel arm, Vec2 gravity) : arm_(std::move(arm)), gravity_(gravity) {}

    [[nodiscard]] MatX inertia(const VecX& q) const override { return inertia_matrix(arm_, q); }
    [[nodiscard]] MatX coriolis(const VecX& q, const VecX& v) const override { return coriolis_matrix(arm_, q, v); }
    [[nodiscard]] VecX gravity(const VecX& q) const override { return gravity_torque(arm_, q, gravity_); }

private:
    ArmModel arm_;
    Vec2 gravity_;
};

}  // namespace contactnav
