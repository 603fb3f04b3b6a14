// Contact particle filter: localizes a single contact on the arm surface from
// the settled momentum-observer residual.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "contactnav/kinematics.hpp"
#include "contactnav/occupancy.hpp"

namespace contactnav {

class EmptyActiveSet : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CpfParams {
    int num_particles = 250;
    int iterations = 10;
    /// Arc-length perturbation per iteration, meters.
    double motion_noise_std = 0.01;
    /// Diagonal of the measurement covariance (N.m)^2; one entry is broadcast.
    std::vector<double> sigma_meas{0.05 * 0.05};
    /// Per-joint residual threshold (N.m); one entry is broadcast.
    std::vector<double> detect_threshold{0.1};
    /// Single-linkage clustering distance, meters.
    double cluster_radius = 0.04;
    double mu = 0.5;

    void validate() const;
};

struct ContactEstimate {
    Vec2 point = Vec2::Zero();
    SurfacePoint surface;
    Vec2 force = Vec2::Zero();
    double confidence = 0.0;
};

struct MeasurementFit {
    double cost = 0.0;
    Vec2 force = Vec2::Zero();
};

/// min over F in the friction cone about -normal of ||r - J^T F||^2 weighted
/// by the inverse measurement covariance.
MeasurementFit measurement_cost(const SurfacePoint& sp, const VecX& r, const VecX& angles, const ArmModel& arm,
                                const CpfParams& params);
/// Same problem for an explicit Jacobian and normal.
MeasurementFit cone_least_squares(const Jacobian& J, const Vec2& normal, const VecX& r, const VecX& inv_sigma,
                                  double mu);

/// Surface points moving into the environment, <n, J v> > 0, whose cell is
/// not KnownFree. Points outside the grid count as free space. Throws
/// EmptyActiveSet when nothing survives.
std::vector<SurfacePoint> active_surface(const ArmModel& arm, const VecX& angles, const VecX& v,
                                         const OccupancyEstimate& est);

/// Which admissibility tests a point must pass.
enum class ActiveCriteria { Both, NotFreeOnly, MotionOnly, None };

[[nodiscard]] bool admissible(const ArmModel& arm, const VecX& angles, const VecX& v, const OccupancyEstimate& est,
                              const SurfacePoint& sp, ActiveCriteria criteria);

/// active_surface with fallbacks: both criteria, then the not-free test
/// alone, then the motion test alone, then every surface point.
std::vector<SurfacePoint> active_surface_with_fallback(const ArmModel& arm, const VecX& angles, const VecX& v,
                                                       const OccupancyEstimate& est, ActiveCriteria* used = nullptr);

/// Mean of the residual samples, typically the settled part of the contact dwell.
VecX average_residual(const std::vector<VecX>& residuals, std::size_t begin, std::size_t end);

struct CpfInput {
    VecX residual;   // settled (averaged) residual
    VecX angles;     // arm configuration during contact
    VecX velocity;   // joint velocity at contact time
};

struct CpfDebug {
    std::vector<SurfacePoint> particles;
    std::vector<int> cluster_of;
};

/// Optional per-link multipliers on particle weights (size = links).
using LinkWeights = std::optional<std::vector<double>>;

ContactEstimate cpf_localize(const CpfInput& in, const ArmModel& arm, const OccupancyEstimate& est,
                             const CpfParams& params, std::uint64_t seed, const LinkWeights& link_weights = {},
                             CpfDebug* debug = nullptr);

/// Normalized particle weights from log-likelihoods: exp(logw - max) with a
/// 1e-300 floor on admissible particles, zero on the rest, uniform if none
/// is admissible.
void particle_weights(const std::vector<double>& logw, const std::vector<char>& admissible_mask,
                      std::vector<double>& out);

/// Low-variance systematic resampling; returns indices into the weight vector.
std::vector<int> systematic_resample(const std::vector<double>& weights, double u0);

}  // namespace contactnav
