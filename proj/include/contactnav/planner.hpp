// Lattice planning under contact evidence: collision hypothesis sets,
// discrepancy penalties, occupancy costs and Weighted A*.

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "contactnav/lattice.hpp"
#include "contactnav/occupancy.hpp"

namespace contactnav {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Cells of which at least one is occupied, learned from one collision.
struct ChsSet {
    CellSet cells;
    Config origin_from;
    Config origin_to;
    int created_iter = 0;
};

struct Discrepancy {
    Config state;
    Action action;

    bool operator==(const Discrepancy&) const = default;
};

struct DiscrepancySet {
    std::vector<Discrepancy> entries;
    /// Hypersphere radius in lattice steps.
    double delta = 2.0;
    double zeta = 5.0;

    /// Adds (s, a) unless already present.
    void add(const Config& s, const Action& a);
    [[nodiscard]] bool contains(const Config& s, const Action& a) const;
};

enum class CostMode { Chs, Cmax, EstimateOnly };

std::string to_string(CostMode m);
CostMode cost_mode_from_string(const std::string& s);

struct CostModel {
    CostMode mode = CostMode::Chs;
    double alpha = 10.0;
    double beta = 1.0;
    double prune_threshold = 0.8;
    double heuristic_weight = 5.0;
    long expansion_budget = 200000;
    double delta = 2.0;
    double zeta = 5.0;

    void validate() const;
};

/// Directed lattice edges known to have collided.
class EdgeSet {
public:
    void add(StateIndex s, int action) { edges_.insert(key(s, action)); }
    [[nodiscard]] bool contains(StateIndex s, int action) const { return edges_.count(key(s, action)) != 0; }
    [[nodiscard]] std::size_t size() const noexcept { return edges_.size(); }

private:
    static std::uint64_t key(StateIndex s, int a) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 8) | static_cast<std::uint8_t>(a);
    }
    std::unordered_set<std::uint64_t> edges_;
};

/// Ring of cells around the footprint at `q_col` (one-cell dilation minus the
/// footprint), without KnownFree cells. Falls back to the unfiltered ring if
/// the filter empties it. The footprint is taken on a padded grid so that
/// parts of the arm just outside the grid still contribute their neighbours.
ChsSet chs_from_collision(const ArmModel& arm, const VecX& q_col, const OccupancyEstimate& est);

/// prod_i (1 - |swept ∩ κ_i| / |κ_i|); exactly 0 when some κ_i ⊆ swept.
double edge_validity(const CellSet& swept, const std::vector<ChsSet>& chs);

/// Lattice-step Euclidean distance between configurations.
double lattice_distance(const Config& a, const Config& b);

double cmax_penalty(const Config& s, const Action& a, const DiscrepancySet& disc);

/// Normalized predicted occupancy of the non-free swept cells.
double occupancy_cost(const CellSet& swept, const OccupancyEstimate& est, const Prediction& pred);

/// Everything the planner reads; a snapshot owned by the caller.
struct PlanContext {
    SweepTable* sweeps = nullptr;
    const OccupancyEstimate* estimate = nullptr;
    const Prediction* prediction = nullptr;
    const std::vector<ChsSet>* chs = nullptr;
    const DiscrepancySet* disc = nullptr;
    const EdgeSet* invalid = nullptr;
};

double edge_cost(StateIndex s, int action, const CostModel& model, const PlanContext& ctx);

enum class PlanStatus { Path, Infeasible, BudgetExhausted };

std::string to_string(PlanStatus s);

struct PlanResult {
    PlanStatus status = PlanStatus::Infeasible;
    std::vector<Config> path;  // start .. goal inclusive
    double cost = 0.0;
    long expansions = 0;
};

PlanResult plan(const Config& start, const Config& goal, const CostModel& model, const PlanContext& ctx);

/// Removes newly free cells from every κ, never emptying one. A κ reduced to
/// a single cell has that cell marked KnownOccupied in `est`.
void prune_chs(std::vector<ChsSet>& chs, const CellSet& newly_free, OccupancyEstimate& est);

}  // namespace contactnav
