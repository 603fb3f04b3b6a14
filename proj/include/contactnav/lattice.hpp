// Configuration lattice indexing and a lazily filled footprint/sweep cache.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "contactnav/grid.hpp"
#include "contactnav/kinematics.hpp"

namespace contactnav {

using StateIndex = std::int32_t;

/// Unit move of one joint by one step.
struct Action {
    int joint = 0;
    int dir = 1;  // +1 or -1

    bool operator==(const Action&) const = default;
    [[nodiscard]] int code() const noexcept { return 2 * joint + (dir > 0 ? 1 : 0); }
    static Action from_code(int code) noexcept { return {code / 2, (code % 2) ? 1 : -1}; }
};

/// The action that moves `from` to `to`; throws InvalidPrimitive for non-unit moves.
Action action_between(const Config& from, const Config& to);
Config apply(const Config& q, const Action& a);

/// Mixed-radix indexing of all configurations; joint 0 is the most
/// significant digit, so index order equals lexicographic config order.
class Lattice {
public:
    explicit Lattice(const ArmModel& arm);

    [[nodiscard]] int joints() const noexcept { return joints_; }
    [[nodiscard]] int steps() const noexcept { return steps_; }
    [[nodiscard]] int actions() const noexcept { return 2 * joints_; }
    [[nodiscard]] StateIndex size() const noexcept { return size_; }
    [[nodiscard]] StateIndex index(const Config& q) const noexcept;
    [[nodiscard]] Config config(StateIndex s) const;
    /// Neighbor index along action code `a`, or -1 if it leaves the lattice.
    [[nodiscard]] StateIndex neighbor(StateIndex s, int a) const noexcept;

private:
    int joints_;
    int steps_;
    StateIndex size_;
    std::vector<StateIndex> stride_;
};

/// Caches robot footprints per lattice state and swept cells per directed
/// edge for one (arm, grid, substeps) triple. Not thread-safe; give each
/// worker its own instance.
class SweepTable {
public:
    SweepTable(ArmModel arm, GridSpec spec, int substeps = kDefaultSubsteps);

    [[nodiscard]] const ArmModel& arm() const noexcept { return arm_; }
    [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const Lattice& lattice() const noexcept { return lattice_; }
    [[nodiscard]] int substeps() const noexcept { return substeps_; }

    const CellSet& footprint(StateIndex s);
    /// Swept cells of the edge leaving `s` along action code `a`.
    const CellSet& swept(StateIndex s, int a);

private:
    ArmModel arm_;
    GridSpec spec_;
    int substeps_;
    Lattice lattice_;
    std::vector<std::optional<CellSet>> footprints_;
    std::vector<std::optional<CellSet>> sweeps_;
};

/// True when every consecutive pair of substep footprints along the edge
/// satisfies next ⊆ dilate(prev). The collision-hypothesis construction relies
/// on this to contain the first penetrated cell.
bool footprints_adjacent(const ArmModel& arm, const Config& from, const Config& to, const GridSpec& spec,
                         int substeps = kDefaultSubsteps);

}  // namespace contactnav
