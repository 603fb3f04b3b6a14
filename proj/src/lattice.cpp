#include "contactnav/lattice.hpp"

#include <limits>
#include <stdexcept>

namespace contactnav {

Action action_between(const Config& from, const Config& to) {
    check_primitive(from, to);
    for (std::size_t j = 0; j < from.steps.size(); ++j) {
        const int d = to.steps[j] - from.steps[j];
        if (d != 0) return {static_cast<int>(j), d};
    }
    throw InvalidPrimitive("zero motion has no action");
}

Config apply(const Config& q, const Action& a) {
    Config out = q;
    out.steps[static_cast<std::size_t>(a.joint)] += a.dir;
    return out;
}

Lattice::Lattice(const ArmModel& arm) : joints_(arm.links()), steps_(arm.steps_per_joint) {
    stride_.assign(static_cast<std::size_t>(joints_), 1);
    std::int64_t total = 1;
    for (int j = joints_ - 1; j >= 0; --j) {
        stride_[static_cast<std::size_t>(j)] = static_cast<StateIndex>(total);
        total *= steps_;
        if (total > std::numeric_limits<StateIndex>::max()) throw std::invalid_argument("lattice too large");
    }
    size_ = static_cast<StateIndex>(total);
}

StateIndex Lattice::index(const Config& q) const noexcept {
    StateIndex s = 0;
    for (int j = 0; j < joints_; ++j) s += q.steps[static_cast<std::size_t>(j)] * stride_[static_cast<std::size_t>(j)];
    return s;
}

Config Lattice::config(StateIndex s) const {
    Config q;
    q.steps.resize(static_cast<std::size_t>(joints_));
    for (int j = 0; j < joints_; ++j) {
        const auto k = static_cast<std::size_t>(j);
        q.steps[k] = s / stride_[k];
        s %= stride_[k];
    }
    return q;
}

StateIndex Lattice::neighbor(StateIndex s, int a) const noexcept {
    const Action act = Action::from_code(a);
    const auto k = static_cast<std::size_t>(act.joint);
    const int digit = (s / stride_[k]) % steps_;
    const int next = digit + act.dir;
    if (next < 0 || next >= steps_) return -1;
    return s + act.dir * stride_[k];
}

SweepTable::SweepTable(ArmModel arm, GridSpec spec, int substeps)
    : arm_(std::move(arm)), spec_(spec), substeps_(substeps), lattice_(arm_) {
    footprints_.resize(static_cast<std::size_t>(lattice_.size()));
    sweeps_.resize(static_cast<std::size_t>(lattice_.size()) * static_cast<std::size_t>(lattice_.actions()));
}

const CellSet& SweepTable::footprint(StateIndex s) {
    auto& slot = footprints_[static_cast<std::size_t>(s)];
    if (!slot) slot = robot_cells(arm_, lattice_.config(s), spec_);
    return *slot;
}

const CellSet& SweepTable::swept(StateIndex s, int a) {
    auto& slot = sweeps_[static_cast<std::size_t>(s) * static_cast<std::size_t>(lattice_.actions()) +
                         static_cast<std::size_t>(a)];
    if (!slot) {
        const StateIndex t = lattice_.neighbor(s, a);
        if (t < 0) throw InvalidPrimitive("edge leaves the lattice");
        slot = swept_cells(arm_, lattice_.config(s), lattice_.config(t), spec_, substeps_);
    }
    return *slot;
}

bool footprints_adjacent(const ArmModel& arm, const Config& from, const Config& to, const GridSpec& spec,
                         int substeps) {
    // One cell of margin so that entering the grid from outside still counts
    // as adjacent to the footprint just beyond the border.
    const GridSpec pad = padded(spec, 1);
    CellSet prev = robot_cells(arm, from, pad);
    for (int k = 1; k <= substeps; ++k) {
        CellSet next = robot_cells(arm, interpolate_angles(arm, from, to, static_cast<double>(k) / substeps), pad);
        if (!unpad(next, spec, 1).subset_of(unpad(dilate(prev, pad), spec, 1))) return false;
        prev = std::move(next);
    }
    return true;
}

}  // namespace contactnav
