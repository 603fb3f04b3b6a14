// Generalized-momentum observer and residual-threshold contact detection.
//
//   r = K_O (p(t) - p(t0) - integral(tau + C^T v - g + r))     p = H(q) v
//
// so that dr/dt = K_O (tau_ext - r). Per sample step the driver
// dp/dt - (tau + C^T v - g) is taken from the momentum difference and the
// trapezoidal mean of the known torques, and the first-order lag is then
// advanced exactly (exp(-K_O dt)), so a constant external torque is tracked
// without discretization error.

#pragma once

#include <stdexcept>
#include <vector>

#include "contactnav/dynamics.hpp"
#include "contactnav/simulator.hpp"

namespace contactnav {

class NonMonotonicTime : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ObserverState {
    VecX r;
    /// Momentum at the last sample.
    VecX last_p;
    /// tau + C^T v - g at the last sample.
    VecX last_beta;
    double last_t = 0.0;
    bool started = false;

    static ObserverState reset(int joints);
};

/// Advances the observer by one sample and returns the new residual.
const VecX& observer_step(ObserverState& state, const ProprioSample& sample, const DynamicsModel& model,
                          const VecX& gain);
const VecX& observer_step(ObserverState& state, const ProprioSample& sample, const ArmModel& arm,
                          const DynParams& dyn);

/// Residual after every sample of a stream.
std::vector<VecX> run_observer(const std::vector<ProprioSample>& samples, const DynamicsModel& model,
                               const VecX& gain);
std::vector<VecX> run_observer(const std::vector<ProprioSample>& samples, const ArmModel& arm, const DynParams& dyn);

/// Single-sample test: |r_i| > threshold_i for some joint. A threshold with
/// one entry applies to every joint.
bool exceeds(const VecX& r, const std::vector<double>& threshold);

inline constexpr int kDebounceSamples = 3;

/// True iff the last kDebounceSamples residuals all exceed the threshold.
bool detect_contact(const std::vector<VecX>& recent, const std::vector<double>& threshold);

/// Streaming form of detect_contact.
class ContactDetector {
public:
    explicit ContactDetector(std::vector<double> threshold) : threshold_(std::move(threshold)) {}
    bool update(const VecX& r);
    [[nodiscard]] bool fired() const noexcept { return run_ >= kDebounceSamples; }

private:
    std::vector<double> threshold_;
    int run_ = 0;
};

/// Index of the sample at which detection fires, or -1.
int first_detection(const std::vector<VecX>& residuals, const std::vector<double>& threshold);

}  // namespace contactnav
