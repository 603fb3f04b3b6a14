// Simulator-side truth: executes one lattice edge against the ground-truth
// grid and synthesizes the proprioceptive stream (q, v, tau).
//
// The arm tracks the commanded trajectory exactly; the applied torque is
// the model feed-forward minus the external contact torque, so a matching
// momentum observer converges to J^T F_c.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "contactnav/grid.hpp"
#include "contactnav/kinematics.hpp"

namespace contactnav {

struct DynParams {
    Vec2 gravity{0.0, -9.81};
    /// Observer gain K_O diagonal; a single entry is broadcast to every joint.
    std::vector<double> observer_gain{100.0};
    double torque_noise_std = 0.02;
    double force_min = 5.0;
    double force_max = 15.0;
    double friction_mu = 0.5;
    double edge_duration = 1.0;
    double sample_rate = 1000.0;
    /// Fraction of the edge spent accelerating (and again decelerating).
    double accel_fraction = 0.25;
    /// Substeps the arm dwells in contact before the halt is complete.
    int dwell_substeps = 2;
    int substeps = kDefaultSubsteps;

    void validate() const;
    [[nodiscard]] VecX gain(int joints) const;
    [[nodiscard]] double dt() const noexcept { return 1.0 / sample_rate; }
};

struct ProprioSample {
    double t = 0.0;
    VecX q;
    VecX v;
    VecX tau;
};

/// Simulator-only truth for one sample (never shown to estimators).
struct SampleTruth {
    bool in_contact = false;
    VecX tau_ext;
};

struct ContactTruth {
    int substep = 0;         // first penetrating substep, 1-based
    VecX config;             // joint angles at that substep (where the arm halts)
    VecX last_free_config;   // joint angles at substep - 1
    SurfacePoint point;      // true contact point at `config`
    Vec2 force = Vec2::Zero();
    CellIndex cell = -1;     // penetrated cell the contact point was taken from
    double onset_time = 0.0;
};

struct ExecutionTrace {
    std::vector<ProprioSample> samples;
    std::vector<SampleTruth> truth;
    std::optional<ContactTruth> contact;  // empty: edge completed
    CellSet certified_cells;
    /// Joint velocity direction of the commanded motion (rad/s at cruise).
    VecX approach_velocity;

    [[nodiscard]] bool completed() const noexcept { return !contact.has_value(); }
};

struct SimOptions {
    /// Synthesize the (q, v, tau) stream; geometry-only runs skip it.
    bool proprioception = true;
    /// Precomputed swept cells of the edge, used as a fast path.
    const CellSet* swept_hint = nullptr;
};

/// Trapezoidal time scaling on [0, 1]: position, velocity and acceleration of
/// the path parameter at normalized time tau.
struct ProfilePoint {
    double s, ds, dds;
};
ProfilePoint trapezoid(double tau, double accel_fraction) noexcept;

ExecutionTrace simulate_edge(const GroundTruthGrid& world, const ArmModel& arm, const DynParams& dyn,
                             const Config& from, const Config& to, std::uint64_t seed, const SimOptions& opts = {});

/// True when a force lies in the friction cone of half-angle atan(mu) about -normal.
bool in_friction_cone(const Vec2& force, const Vec2& normal, double mu, double tol = 1e-9) noexcept;

}  // namespace contactnav
