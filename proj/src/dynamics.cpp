#include "contactnav/dynamics.hpp"

#include <cmath>

namespace contactnav {

namespace {

// Lever of segment k in the center-of-mass position of link i (k <= i).
double lever(const ArmModel& arm, int i, int k) {
    const double len = arm.link_lengths[static_cast<std::size_t>(k)];
    return k < i ? len : 0.5 * len;
}

double rod_inertia(const ArmModel& arm, int i) {
    const auto k = static_cast<std::size_t>(i);
    return arm.link_masses[k] * arm.link_lengths[k] * arm.link_lengths[k] / 12.0;
}

std::vector<double> cumulative(const VecX& q) {
    std::vector<double> phi(static_cast<std::size_t>(q.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) phi[static_cast<std::size_t>(i)] = acc += q[i];
    return phi;
}

// Translational Jacobian of link i's center of mass.
Jacobian com_jacobian(const ArmModel& arm, const std::vector<double>& phi, int i) {
    const int n = arm.links();
    Jacobian J = Jacobian::Zero(kAxes, n);
    for (int j = 0; j <= i; ++j) {
        for (int k = j; k <= i; ++k) {
            const double p = phi[static_cast<std::size_t>(k)];
            J.col(j) += lever(arm, i, k) * Vec2(-std::sin(p), std::cos(p));
        }
    }
    return J;
}

}  // namespace

MatX inertia_matrix(const ArmModel& arm, const VecX& q) {
    const int n = arm.links();
    const auto phi = cumulative(q);
    MatX H = MatX::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const Jacobian Jv = com_jacobian(arm, phi, i);
        H += arm.link_masses[static_cast<std::size_t>(i)] * Jv.transpose() * Jv;
        H.topLeftCorner(i + 1, i + 1).array() += rod_inertia(arm, i);
    }
    return H;
}

std::vector<MatX> inertia_derivatives(const ArmModel& arm, const VecX& q) {
    const int n = arm.links();
    const auto phi = cumulative(q);
    std::vector<MatX> dH(static_cast<std::size_t>(n), MatX::Zero(n, n));
    // H_ab = sum_i m_i sum_{k>=a, k'>=b, k,k'<=i} lever_ik lever_ik' cos(phi_k - phi_k') + rotational terms,
    // and d(phi_k)/d(q_c) = [c <= k].
    for (int i = 0; i < n; ++i) {
        const double m = arm.link_masses[static_cast<std::size_t>(i)];
        for (int k = 0; k <= i; ++k) {
            for (int kp = 0; kp <= i; ++kp) {
                if (k == kp) continue;
                const double w = -m * lever(arm, i, k) * lever(arm, i, kp) *
                                 std::sin(phi[static_cast<std::size_t>(k)] - phi[static_cast<std::size_t>(kp)]);
                for (int c = 0; c < n; ++c) {
                    const int dphi = (c <= k ? 1 : 0) - (c <= kp ? 1 : 0);
                    if (dphi == 0) continue;
                    // The (k, k') term contributes to every H_ab with a <= k, b <= k'.
                    dH[static_cast<std::size_t>(c)].topLeftCorner(k + 1, kp + 1).array() += w * dphi;
                }
            }
        }
    }
    return dH;
}

MatX coriolis_matrix(const ArmModel& arm, const VecX& q, const VecX& v) {
    const int n = arm.links();
    const auto dH = inertia_derivatives(arm, q);
    MatX C = MatX::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                s += 0.5 * (dH[ui](k, j) + dH[static_cast<std::size_t>(j)](k, i) - dH[static_cast<std::size_t>(k)](i, j)) * v[i];
            }
            C(k, j) = s;
        }
    }
    return C;
}

VecX gravity_torque(const ArmModel& arm, const VecX& q, const Vec2& gravity) {
    const int n = arm.links();
    const auto phi = cumulative(q);
    VecX g = VecX::Zero(n);
    for (int i = 0; i < n; ++i)
        g -= arm.link_masses[static_cast<std::size_t>(i)] * com_jacobian(arm, phi, i).transpose() * gravity;
    return g;
}

VecX inverse_dynamics(const ArmModel& arm, const VecX& q, const VecX& v, const VecX& a, const Vec2& gravity) {
    return inertia_matrix(arm, q) * a + coriolis_matrix(arm, q, v) * v + gravity_torque(arm, q, gravity);
}

}  // namespace contactnav
