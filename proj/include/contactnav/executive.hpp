// The iterative plan-execute loop: predict, plan, execute until contact,
// update beliefs, retract, replan.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "contactnav/cpf.hpp"
#include "contactnav/lattice.hpp"
#include "contactnav/occupancy.hpp"
#include "contactnav/planner.hpp"
#include "contactnav/simulator.hpp"

namespace contactnav {

class PathDiscontinuity : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidScenario : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class NoiseMode { Observer, Direct };

std::string to_string(NoiseMode m);
NoiseMode noise_mode_from_string(const std::string& s);

struct Scenario {
    ArmModel arm;
    GroundTruthGrid world;
    Config start;
    Config goal;
    DynParams dyn;
    CpfParams cpf;
    PredictorConfig predictor;
    CostModel cost_model;
    int max_iterations = 20;
    NoiseMode noise_mode = NoiseMode::Direct;
    /// Localization noise of the direct mode, in cells.
    double direct_sigma_cells = 1.5;
    /// Radius of the probability bump around a contact mark, cells.
    int spread_radius = 1;
    /// Measure wall-clock component times. Off by default so reports are
    /// reproducible byte for byte.
    bool measure_wall_time = false;

    void validate() const;
};

enum class FailureKind { None, PlanFail, IterationCap };

std::string to_string(FailureKind k);

struct ContactEvent {
    int iteration = 0;
    Config from;
    Config to;
    int substep = 0;
    bool detected = true;
    /// Seconds between true onset and detection (observer mode).
    double detection_delay = 0.0;
    Vec2 true_point = Vec2::Zero();
    Vec2 estimated_point = Vec2::Zero();
    double error = 0.0;
    double confidence = 0.0;
    std::size_t chs_size = 0;
};

struct IterationLog {
    int iteration = 0;
    std::string plan_status;
    std::size_t path_edges = 0;
    long expansions = 0;
    int edges_completed = 0;
    std::optional<ContactEvent> contact;
};

struct EpisodeReport {
    bool success = false;
    FailureKind failure_kind = FailureKind::None;
    int num_iters = 0;
    double plan_time = 0.0;
    double exec_time = 0.0;
    double predict_time = 0.0;
    double contact_time = 0.0;
    double total_time = 0.0;
    int edges_executed = 0;
    int contacts = 0;
    std::vector<IterationLog> log;
};

nlohmann::json to_json(const EpisodeReport& r);

/// Mutable belief and constraint state of one episode.
struct EpisodeState {
    OccupancyEstimate estimate;
    std::vector<ChsSet> chs;
    DiscrepancySet disc;
    EdgeSet invalid;
    Config current;
    CellSet certified;  // union of every certified-free cell
    std::uint64_t edge_counter = 0;
};

EpisodeState initial_state(const Scenario& sc);

struct ExecResult {
    Config reached;
    int cost = 0;  // unit steps; an interrupted edge counts as one
    int edges_completed = 0;
    std::optional<ContactEvent> contact;
    double contact_time = 0.0;
};

struct PlanSnapshot {
    int iteration;
    const CostModel& model;
    const PlanContext& context;
    const EpisodeState& state;
};

/// Optional observation points for tests and debug dumps.
struct EpisodeHooks {
    std::function<void(const PlanSnapshot&)> on_plan;
    std::function<void(const ChsSet&, const ExecutionTrace&)> on_collision;
    std::function<void(const ExecutionTrace&, const Config&, const Config&)> on_trace;
};

/// Executes `path` (starting at state.current) edge by edge, stopping at the
/// first contact and folding its evidence into `state`.
ExecResult execute_path(const Scenario& sc, const std::vector<Config>& path, EpisodeState& state,
                        SweepTable& sweeps, std::uint64_t seed, int iteration, const EpisodeHooks* hooks = nullptr);

EpisodeReport run_episode(const Scenario& sc, std::uint64_t seed, const EpisodeHooks* hooks = nullptr);
/// Same, reusing a sweep cache built for sc.arm and sc.world.spec().
EpisodeReport run_episode(const Scenario& sc, std::uint64_t seed, SweepTable& sweeps,
                          const EpisodeHooks* hooks = nullptr);

}  // namespace contactnav
