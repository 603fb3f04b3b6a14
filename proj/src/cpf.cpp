#include "contactnav/cpf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include <Eigen/Geometry>

#include "contactnav/rng.hpp"
#include "contactnav/simulator.hpp"

namespace contactnav {

void CpfParams::validate() const {
    if (num_particles < 1 || iterations < 0) throw std::invalid_argument("need num_particles >= 1, iterations >= 0");
    if (!(motion_noise_std > 0.0)) throw std::invalid_argument("motion_noise_std must be > 0");
    if (sigma_meas.empty() || detect_threshold.empty()) throw std::invalid_argument("sigma_meas/detect_threshold empty");
    for (double s : sigma_meas)
        if (!(s > 0.0)) throw std::invalid_argument("sigma_meas entries must be > 0");
    for (double t : detect_threshold)
        if (!(t > 0.0)) throw std::invalid_argument("detect_threshold entries must be > 0");
    if (!(cluster_radius > 0.0) || mu < 0.0) throw std::invalid_argument("cluster_radius must be > 0, mu >= 0");
}

namespace {

VecX inverse_sigma(const CpfParams& p, int n) {
    VecX w(n);
    for (int i = 0; i < n; ++i)
        w[i] = 1.0 / (p.sigma_meas.size() == 1 ? p.sigma_meas[0] : p.sigma_meas.at(static_cast<std::size_t>(i)));
    return w;
}

double weighted_sq(const VecX& e, const VecX& w) { return (e.array().square() * w.array()).sum(); }

}  // namespace

MeasurementFit cone_least_squares(const Jacobian& J, const Vec2& normal, const VecX& r, const VecX& w, double mu) {
    const MatX A = J.transpose();
    const auto cost = [&](const Vec2& F) { return weighted_sq(r - A * F, w); };
    if (A.cwiseAbs().maxCoeff() <= 1e-14) return {weighted_sq(r, w), Vec2::Zero()};

    const Eigen::Matrix2d M = A.transpose() * w.asDiagonal() * A;
    const Vec2 b = A.transpose() * w.asDiagonal() * r;
    const double scale = M.trace();
    if (M.determinant() > 1e-12 * scale * scale) {
        const Vec2 F = M.ldlt().solve(b);
        if (in_friction_cone(F, normal, mu)) return {cost(F), F};
    }
    // The optimum lies on the cone boundary: one of the two edge rays (the
    // apex is t = 0 on either). Each ray is a 1-D nonnegative least squares.
    const Vec2 axis = -normal.normalized();
    const double half = std::atan(mu);
    MeasurementFit best{cost(Vec2::Zero()), Vec2::Zero()};
    for (double ang : {half, -half}) {
        const Vec2 d = Eigen::Rotation2Dd(ang) * axis;
        const double dMd = d.dot(M * d);
        if (dMd <= 1e-300) continue;
        const double t = std::max(0.0, d.dot(b) / dMd);
        const Vec2 F = t * d;
        const double c = cost(F);
        if (c < best.cost) best = {c, F};
    }
    return best;
}

MeasurementFit measurement_cost(const SurfacePoint& sp, const VecX& r, const VecX& angles, const ArmModel& arm,
                                const CpfParams& params) {
    const Jacobian J = point_jacobian(arm, angles, sp);
    return cone_least_squares(J, sp.normal, r, inverse_sigma(params, arm.links()), params.mu);
}

bool admissible(const ArmModel& arm, const VecX& angles, const VecX& v, const OccupancyEstimate& est,
                const SurfacePoint& sp, ActiveCriteria criteria) {
    if (criteria == ActiveCriteria::Both || criteria == ActiveCriteria::MotionOnly) {
        const Vec2 xdot = point_jacobian(arm, angles, sp) * v;
        if (!(sp.normal.dot(xdot) > 1e-12)) return false;
    }
    if (criteria == ActiveCriteria::Both || criteria == ActiveCriteria::NotFreeOnly) {
        const CellCoord c = est.spec().locate(sp.point);
        if (!est.spec().in_bounds(c)) return false;  // outside the workspace grid: free space
        if (est.known_free(est.spec().index(c))) return false;
    }
    return true;
}

std::vector<SurfacePoint> active_surface(const ArmModel& arm, const VecX& angles, const VecX& v,
                                         const OccupancyEstimate& est) {
    std::vector<SurfacePoint> out;
    for (auto& sp : surface_points(arm, angles))
        if (admissible(arm, angles, v, est, sp, ActiveCriteria::Both)) out.push_back(sp);
    if (out.empty()) throw EmptyActiveSet("no surface point is moving into unexplored space");
    return out;
}

std::vector<SurfacePoint> active_surface_with_fallback(const ArmModel& arm, const VecX& angles, const VecX& v,
                                                       const OccupancyEstimate& est, ActiveCriteria* used) {
    const auto all = surface_points(arm, angles);
    for (ActiveCriteria c : {ActiveCriteria::Both, ActiveCriteria::NotFreeOnly, ActiveCriteria::MotionOnly}) {
        std::vector<SurfacePoint> out;
        for (const auto& sp : all)
            if (admissible(arm, angles, v, est, sp, c)) out.push_back(sp);
        if (!out.empty()) {
            if (used) *used = c;
            return out;
        }
    }
    if (used) *used = ActiveCriteria::None;
    return all;
}

VecX average_residual(const std::vector<VecX>& residuals, std::size_t begin, std::size_t end) {
    if (begin >= end || end > residuals.size()) throw std::invalid_argument("empty residual window");
    VecX acc = VecX::Zero(residuals[begin].size());
    for (std::size_t i = begin; i < end; ++i) acc += residuals[i];
    return acc / static_cast<double>(end - begin);
}

void particle_weights(const std::vector<double>& logw, const std::vector<char>& admissible_mask,
                      std::vector<double>& out) {
    const std::size_t n = logw.size();
    out.assign(n, 0.0);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        if (admissible_mask[i]) top = std::max(top, logw[i]);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = admissible_mask[i] ? std::max(std::exp(logw[i] - top), 1e-300) : 0.0;
        any |= out[i] > 0.0;
    }
    // Nothing admissible: fall back to uniform weights rather than stall.
    if (!any) std::fill(out.begin(), out.end(), 1.0);
}

std::vector<int> systematic_resample(const std::vector<double>& weights, double u0) {
    const auto n = static_cast<int>(weights.size());
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<int> out(static_cast<std::size_t>(n));
    double cum = weights.empty() ? 0.0 : weights[0] / total;
    int j = 0;
    for (int i = 0; i < n; ++i) {
        const double u = u0 + static_cast<double>(i) / n;
        while (u > cum && j < n - 1) cum += weights[static_cast<std::size_t>(++j)] / total;
        out[static_cast<std::size_t>(i)] = j;
    }
    return out;
}

namespace {

SurfaceCoord perturb(const ArmModel& arm, SurfaceCoord c, double ds) {
    const double len = c.side == Side::Tip ? std::numbers::pi * arm.link_radius
                                           : arm.link_lengths[static_cast<std::size_t>(c.link)];
    c.param += ds / len;
    return clamp_coord(arm, c);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    }
    void join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

}  // namespace

ContactEstimate cpf_localize(const CpfInput& in, const ArmModel& arm, const OccupancyEstimate& est,
                             const CpfParams& params, std::uint64_t seed, const LinkWeights& link_weights,
                             CpfDebug* debug) {
    params.validate();
    const int L = arm.links();
    if (in.residual.size() != L || in.angles.size() != L || in.velocity.size() != L)
        throw std::invalid_argument("cpf input length mismatch");
    if (link_weights && static_cast<int>(link_weights->size()) != L)
        throw std::invalid_argument("link weight vector must have one entry per link");
    const VecX w_meas = inverse_sigma(params, L);

    ActiveCriteria criteria = ActiveCriteria::Both;
    const auto active = active_surface_with_fallback(arm, in.angles, in.velocity, est, &criteria);

    Rng rng(seed, mix64(0xc9f));
    const int N = params.num_particles;
    std::vector<SurfacePoint> particles(static_cast<std::size_t>(N));
    for (auto& p : particles)
        p = active[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(active.size()) - 1))];

    std::vector<double> logw(static_cast<std::size_t>(N));
    std::vector<double> weights(static_cast<std::size_t>(N));
    std::vector<char> ok(static_cast<std::size_t>(N));
    for (int it = 0; it < params.iterations; ++it) {
        for (int i = 0; i < N; ++i) {
            auto& p = particles[static_cast<std::size_t>(i)];
            p = surface_point(arm, in.angles, perturb(arm, p.where, rng.normal(0.0, params.motion_noise_std)));
            const auto ui = static_cast<std::size_t>(i);
            ok[ui] = admissible(arm, in.angles, in.velocity, est, p, criteria) ? 1 : 0;
            const double l = cone_least_squares(point_jacobian(arm, in.angles, p), p.normal, in.residual, w_meas,
                                                params.mu).cost;
            logw[ui] = -0.5 * l;
            if (link_weights) logw[ui] += std::log(std::max((*link_weights)[static_cast<std::size_t>(p.where.link)], 1e-300));
        }
        particle_weights(logw, ok, weights);
        const auto idx = systematic_resample(weights, rng.uniform() / N);
        std::vector<SurfacePoint> next(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) next[static_cast<std::size_t>(i)] = particles[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        particles = std::move(next);
    }

    UnionFind uf(N);
    const double r2 = params.cluster_radius * params.cluster_radius;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
            if ((particles[static_cast<std::size_t>(i)].point - particles[static_cast<std::size_t>(j)].point).squaredNorm() <= r2)
                uf.join(i, j);
    std::vector<int> size(static_cast<std::size_t>(N), 0);
    for (int i = 0; i < N; ++i) ++size[static_cast<std::size_t>(uf.find(i))];
    int best = 0;
    for (int i = 0; i < N; ++i)
        if (size[static_cast<std::size_t>(i)] > size[static_cast<std::size_t>(best)]) best = i;

    Vec2 centroid = Vec2::Zero();
    for (int i = 0; i < N; ++i)
        if (uf.find(i) == best) centroid += particles[static_cast<std::size_t>(i)].point;
    centroid /= size[static_cast<std::size_t>(best)];

    ContactEstimate out;
    out.surface = project_to_surface(arm, in.angles, centroid);
    out.point = out.surface.point;
    out.force = cone_least_squares(point_jacobian(arm, in.angles, out.surface), out.surface.normal, in.residual,
                                   w_meas, params.mu).force;
    out.confidence = static_cast<double>(size[static_cast<std::size_t>(best)]) / N;
    if (debug) {
        debug->particles = particles;
        debug->cluster_of.resize(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) debug->cluster_of[static_cast<std::size_t>(i)] = uf.find(i);
    }
    return out;
}

}  // namespace contactnav
