// Scalar frozen-dynamics observer stream and cone-QP grid oracle, shared by
// the unit tests and the acceptance binary.

#pragma once

#include <cmath>
#include <limits>

#include "contactnav/cpf.hpp"
#include "contactnav/observer.hpp"
#include "support.hpp"

namespace testing {

/// Constant inertia, no Coriolis, no gravity.
class FrozenModel final : public DynamicsModel {
public:
    explicit FrozenModel(MatX H) : H_(std::move(H)) {}
    [[nodiscard]] MatX inertia(const VecX&) const override { return H_; }
    [[nodiscard]] MatX coriolis(const VecX& q, const VecX&) const override {
        return MatX::Zero(q.size(), q.size());
    }
    [[nodiscard]] VecX gravity(const VecX& q) const override { return VecX::Zero(q.size()); }

private:
    MatX H_;
};

/// Arm held still under a constant external torque from t = 0: the applied
/// torque is -tau_ext, so p stays zero while the observer must see tau_ext.
inline std::vector<ProprioSample> frozen_stream(const VecX& tau_ext, double dt, double t_end) {
    std::vector<ProprioSample> out;
    const auto n = static_cast<int>(std::llround(t_end / dt));
    for (int k = 0; k <= n; ++k) {
        ProprioSample s;
        s.t = k * dt;
        s.q = VecX::Zero(tau_ext.size());
        s.v = VecX::Zero(tau_ext.size());
        s.tau = -tau_ext;
        out.push_back(s);
    }
    return out;
}

inline double scalar_observer_error(double K, double tau, double dt, double t_end) {
    VecX te(1);
    te << tau;
    VecX gain(1);
    gain << K;
    const FrozenModel model(MatX::Identity(1, 1));
    const auto samples = frozen_stream(te, dt, t_end);
    const auto r = run_observer(samples, model, gain);
    double worst = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
        worst = std::max(worst, std::abs(r[i][0] - tau * (1.0 - std::exp(-K * samples[i].t))));
    return worst;
}

struct ConeInstance {
    Jacobian J;
    Vec2 normal;
    VecX r;
    VecX inv_sigma;
    double mu;
};

/// Random arm pose, surface point and residual (either explainable by a
/// planted cone force plus noise, or arbitrary).
inline ConeInstance random_cone_instance(Rng& rng) {
    const ArmModel arm = three_link_arm();
    const VecX q = random_angles(arm, rng);
    const SurfaceCoord c{static_cast<int>(rng.uniform_int(0, arm.links() - 1)),
                         rng.uniform() < 0.5 ? Side::A : Side::B, rng.uniform()};
    const SurfacePoint sp = surface_point(arm, q, c);
    ConeInstance in;
    in.J = point_jacobian(arm, q, sp);
    in.normal = sp.normal;
    in.mu = rng.uniform(0.0, 1.0);
    in.inv_sigma = VecX(arm.links());
    for (int i = 0; i < arm.links(); ++i) in.inv_sigma[i] = 1.0 / rng.uniform(0.001, 0.01);
    in.r = VecX(arm.links());
    if (rng.uniform() < 0.5) {
        const double ang = rng.uniform(-1.2, 1.2);
        const Vec2 F = rng.uniform(1.0, 15.0) * Vec2(-std::cos(ang) * in.normal.x() + std::sin(ang) * in.normal.y(),
                                                     -std::sin(ang) * in.normal.x() - std::cos(ang) * in.normal.y());
        in.r = in.J.transpose() * F;
        for (int i = 0; i < arm.links(); ++i) in.r[i] += rng.normal(0.0, 0.05);
    } else {
        for (int i = 0; i < arm.links(); ++i) in.r[i] = rng.uniform(-3.0, 3.0);
    }
    return in;
}

inline double weighted_cost(const ConeInstance& in, const Vec2& F) {
    const VecX e = in.r - in.J.transpose() * F;
    return (e.array().square() * in.inv_sigma.array()).sum();
}

/// Brute force over `directions` cone-feasible unit directions, each with its
/// best nonnegative magnitude, plus the apex.
inline double grid_oracle_cost(const ConeInstance& in, int directions) {
    const double half = std::atan(in.mu);
    const Vec2 axis = -in.normal;
    const VecX& w = in.inv_sigma;
    double best = weighted_cost(in, Vec2::Zero());
    for (int k = 0; k < directions; ++k) {
        const double ang = directions == 1 ? 0.0 : -half + 2 * half * k / (directions - 1);
        const Vec2 d(std::cos(ang) * axis.x() - std::sin(ang) * axis.y(),
                     std::sin(ang) * axis.x() + std::cos(ang) * axis.y());
        const VecX a = in.J.transpose() * d;
        const double den = (a.array().square() * w.array()).sum();
        if (den <= 0) continue;
        const double t = std::max(0.0, (a.array() * in.r.array() * w.array()).sum() / den);
        best = std::min(best, weighted_cost(in, t * d));
    }
    return best;
}

}  // namespace testing
