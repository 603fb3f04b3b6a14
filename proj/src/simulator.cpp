#include "contactnav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>

#include "contactnav/dynamics.hpp"
#include "contactnav/rng.hpp"

namespace contactnav {

void DynParams::validate() const {
    if (observer_gain.empty()) throw std::invalid_argument("observer_gain must not be empty");
    for (double k : observer_gain)
        if (!(k > 0.0)) throw std::invalid_argument("observer_gain entries must be > 0");
    if (torque_noise_std < 0.0) throw std::invalid_argument("torque_noise_std must be >= 0");
    if (force_min < 0.0 || force_min > force_max) throw std::invalid_argument("need 0 <= force_min <= force_max");
    if (friction_mu < 0.0) throw std::invalid_argument("friction_mu must be >= 0");
    if (!(edge_duration > 0.0) || !(sample_rate > 0.0)) throw std::invalid_argument("edge timing must be positive");
    if (!(accel_fraction > 0.0) || accel_fraction > 0.5) throw std::invalid_argument("accel_fraction must be in (0, 0.5]");
    if (dwell_substeps < 1 || substeps < 1) throw std::invalid_argument("substeps/dwell_substeps must be >= 1");
}

VecX DynParams::gain(int joints) const {
    if (observer_gain.size() == 1) return VecX::Constant(joints, observer_gain[0]);
    if (static_cast<int>(observer_gain.size()) != joints)
        throw std::invalid_argument("observer_gain length must be 1 or the joint count");
    return Eigen::Map<const VecX>(observer_gain.data(), joints);
}

ProfilePoint trapezoid(double tau, double ta) noexcept {
    const double vc = 1.0 / (1.0 - ta);
    const double acc = vc / ta;
    if (tau <= 0.0) return {0.0, 0.0, 0.0};
    if (tau >= 1.0) return {1.0, 0.0, 0.0};
    if (tau < ta) return {0.5 * acc * tau * tau, acc * tau, acc};
    if (tau <= 1.0 - ta) return {0.5 * vc * ta + vc * (tau - ta), vc, 0.0};
    const double r = 1.0 - tau;
    return {1.0 - 0.5 * acc * r * r, acc * r, -acc};
}

bool in_friction_cone(const Vec2& force, const Vec2& normal, double mu, double tol) noexcept {
    const double f = force.norm();
    if (f <= tol) return true;
    const Vec2 axis = -normal.normalized();
    const double along = force.dot(axis);
    const double across = std::abs(axis.x() * force.y() - axis.y() * force.x());
    return along >= -tol && across <= mu * along + tol * (1.0 + f);
}

namespace {

bool hits(const GroundTruthGrid& world, const ArmModel& arm, const VecX& angles) {
    return world.intersects(robot_cells(arm, angles, world.spec()));
}

VecX lerp(const VecX& a, const VecX& b, double s) { return a + s * (b - a); }

// Smallest penetrating path parameter in (lo, hi], where lo is free and hi is not.
double refine_onset(const GroundTruthGrid& world, const ArmModel& arm, const VecX& qa, const VecX& qb, double lo,
                    double hi) {
    for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hits(world, arm, lerp(qa, qb, mid)))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

CellIndex first_cell(const GroundTruthGrid& world, const ArmModel& arm, const VecX& angles) {
    const CellSet cells = robot_cells(arm, angles, world.spec());
    const auto pts = forward_kinematics(arm, angles);
    CellIndex best = -1;
    double best_d = 0.0;
    for (CellIndex c : cells) {
        if (!world.occupied(c)) continue;
        const Vec2 ctr = world.spec().center(c);
        double d = 1e300;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) d = std::min(d, point_segment_distance(ctr, pts[i], pts[i + 1]));
        // Barely-entered cells sit near the capsule boundary, i.e. farthest from the links.
        if (best < 0 || d > best_d) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

// Duration of a move covering path fraction `s`, snapped so the profile
// breakpoints land on whole sample periods.
double move_duration(const DynParams& dyn, double s) {
    const double dt = dyn.dt();
    const double unit = dt / dyn.accel_fraction;
    const double raw = dyn.edge_duration * s;
    return std::max(1.0, std::round(raw / unit)) * unit;
}

}  // namespace

ExecutionTrace simulate_edge(const GroundTruthGrid& world, const ArmModel& arm, const DynParams& dyn,
                             const Config& from, const Config& to, std::uint64_t seed, const SimOptions& opts) {
    check_primitive(from, to);
    dyn.validate();
    if (!valid_config(arm, from) || !valid_config(arm, to)) throw std::invalid_argument("configuration out of range");
    const GridSpec& spec = world.spec();
    const int n = arm.links();
    const int K = dyn.substeps;
    const VecX qa = joint_angles(arm, from);
    const VecX qb = joint_angles(arm, to);

    ExecutionTrace trace;
    const double vc = 1.0 / (1.0 - dyn.accel_fraction);
    trace.approach_velocity = (qb - qa) * (vc / dyn.edge_duration);

    // Geometric outcome.
    int hit = 0;
    const bool maybe_hit = opts.swept_hint ? world.intersects(*opts.swept_hint) : true;
    if (maybe_hit) {
        for (int k = 1; k <= K; ++k) {
            if (hits(world, arm, lerp(qa, qb, static_cast<double>(k) / K))) {
                hit = k;
                break;
            }
        }
    }

    Rng rng(seed, mix64(0x5e7a11));
    Rng force_rng = rng.fork(1);
    Rng noise_rng = rng.fork(2);

    double s_stop = 1.0;
    double t_move = move_duration(dyn, 1.0);
    if (hit == 0) {
        trace.certified_cells = opts.swept_hint ? *opts.swept_hint : swept_cells(arm, from, to, spec, K);
    } else {
        s_stop = static_cast<double>(hit) / K;
        t_move = move_duration(dyn, s_stop);
        ContactTruth ct;
        ct.substep = hit;
        ct.config = lerp(qa, qb, s_stop);
        ct.last_free_config = lerp(qa, qb, static_cast<double>(hit - 1) / K);
        const double onset = refine_onset(world, arm, qa, qb, static_cast<double>(hit - 1) / K, s_stop);
        ct.cell = first_cell(world, arm, lerp(qa, qb, onset));
        if (ct.cell < 0) ct.cell = first_cell(world, arm, ct.config);
        ct.point = project_to_surface(arm, ct.config, spec.center(ct.cell));
        const double half = std::atan(dyn.friction_mu);
        const double theta = half > 0.0 ? force_rng.uniform(-half, half) : 0.0;
        const double mag = force_rng.uniform(dyn.force_min, dyn.force_max);
        const Eigen::Rotation2Dd rot(theta);
        ct.force = mag * (rot * (-ct.point.normal));
        ct.onset_time = t_move;
        for (int k = 0; k < hit; ++k) trace.certified_cells.unite(robot_cells(arm, lerp(qa, qb, static_cast<double>(k) / K), spec));
        trace.contact = ct;
    }

    if (!opts.proprioception) return trace;

    const double dt = dyn.dt();
    const double t_end = hit == 0 ? t_move : t_move + dyn.dwell_substeps * dyn.edge_duration / K;
    const auto count = static_cast<int>(std::llround(t_end / dt));
    VecX tau_ext = VecX::Zero(n);
    if (trace.contact) {
        const Jacobian J = point_jacobian(arm, trace.contact->config, trace.contact->point);
        tau_ext = J.transpose() * trace.contact->force;
    }
    const VecX dq = (qb - qa) * s_stop;
    trace.samples.reserve(static_cast<std::size_t>(count));
    trace.truth.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        // Samples sit mid-period so no profile breakpoint coincides with one.
        const double t = (i + 0.5) * dt;
        const ProfilePoint pp = trapezoid(t / t_move, dyn.accel_fraction);
        ProprioSample smp;
        smp.t = t;
        smp.q = qa + pp.s * dq;
        smp.v = pp.ds / t_move * dq;
        const VecX a = pp.dds / (t_move * t_move) * dq;
        smp.tau = inverse_dynamics(arm, smp.q, smp.v, a, dyn.gravity);
        SampleTruth st;
        st.in_contact = trace.contact.has_value() && t >= t_move;
        st.tau_ext = st.in_contact ? tau_ext : VecX::Zero(n);
        smp.tau -= st.tau_ext;
        if (dyn.torque_noise_std > 0.0)
            for (int j = 0; j < n; ++j) smp.tau[j] += noise_rng.normal(0.0, dyn.torque_noise_std);
        trace.samples.push_back(std::move(smp));
        trace.truth.push_back(std::move(st));
    }
    return trace;
}

}  // namespace contactnav
