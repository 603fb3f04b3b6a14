#include "contactnav/observer.hpp"

#include <cmath>

namespace contactnav {

ObserverState ObserverState::reset(int joints) {
    ObserverState s;
    s.r = VecX::Zero(joints);
    s.last_p = VecX::Zero(joints);
    s.last_beta = VecX::Zero(joints);
    return s;
}

const VecX& observer_step(ObserverState& state, const ProprioSample& sample, const DynamicsModel& model,
                          const VecX& gain) {
    const Eigen::Index n = sample.q.size();
    if (sample.v.size() != n || sample.tau.size() != n || gain.size() != n)
        throw std::invalid_argument("observer sample/gain length mismatch");
    if (state.r.size() != n) state = ObserverState::reset(static_cast<int>(n));
    if (state.started && !(sample.t > state.last_t)) throw NonMonotonicTime("observer samples must have increasing t");

    const VecX p = model.inertia(sample.q) * sample.v;
    const VecX beta = sample.tau + model.coriolis(sample.q, sample.v).transpose() * sample.v - model.gravity(sample.q);
    if (!state.started) {
        state.r.setZero();
        state.started = true;
    } else {
        const double dt = sample.t - state.last_t;
        const VecX drive = (p - state.last_p) / dt - 0.5 * (state.last_beta + beta);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double decay = std::exp(-gain[i] * dt);
            state.r[i] = decay * state.r[i] + (1.0 - decay) * drive[i];
        }
    }
    state.last_p = p;
    state.last_beta = beta;
    state.last_t = sample.t;
    return state.r;
}

const VecX& observer_step(ObserverState& state, const ProprioSample& sample, const ArmModel& arm,
                          const DynParams& dyn) {
    const PlanarArmDynamics model(arm, dyn.gravity);
    return observer_step(state, sample, model, dyn.gain(arm.links()));
}

std::vector<VecX> run_observer(const std::vector<ProprioSample>& samples, const DynamicsModel& model,
                               const VecX& gain) {
    std::vector<VecX> out;
    out.reserve(samples.size());
    ObserverState st = ObserverState::reset(static_cast<int>(gain.size()));
    for (const auto& s : samples) out.push_back(observer_step(st, s, model, gain));
    return out;
}

std::vector<VecX> run_observer(const std::vector<ProprioSample>& samples, const ArmModel& arm, const DynParams& dyn) {
    const PlanarArmDynamics model(arm, dyn.gravity);
    return run_observer(samples, model, dyn.gain(arm.links()));
}

bool exceeds(const VecX& r, const std::vector<double>& threshold) {
    if (threshold.empty()) throw std::invalid_argument("empty detection threshold");
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double th = threshold.size() == 1 ? threshold[0] : threshold.at(static_cast<std::size_t>(i));
        if (std::abs(r[i]) > th) return true;
    }
    return false;
}

bool detect_contact(const std::vector<VecX>& recent, const std::vector<double>& threshold) {
    if (recent.size() < static_cast<std::size_t>(kDebounceSamples)) return false;
    for (std::size_t i = recent.size() - kDebounceSamples; i < recent.size(); ++i)
        if (!exceeds(recent[i], threshold)) return false;
    return true;
}

bool ContactDetector::update(const VecX& r) {
    run_ = exceeds(r, threshold_) ? run_ + 1 : 0;
    return fired();
}

int first_detection(const std::vector<VecX>& residuals, const std::vector<double>& threshold) {
    ContactDetector det(threshold);
    for (std::size_t i = 0; i < residuals.size(); ++i)
        if (det.update(residuals[i])) return static_cast<int>(i);
    return -1;
}

}  // namespace contactnav
