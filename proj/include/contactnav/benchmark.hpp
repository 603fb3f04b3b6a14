// Scenario templates, benchmark campaigns and dataset export.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "contactnav/executive.hpp"
#include "contactnav/scene.hpp"
#include "contactnav/wire.hpp"

namespace contactnav {

/// Everything of a Scenario except the world, which is generated per seed.
struct ScenarioTemplate {
    Domain domain = Domain::Pipe;
    ArmModel arm;
    GridSpec spec;
    Config start;
    Config goal;
    DynParams dyn;
    CpfParams cpf;
    PredictorConfig predictor;
    CostModel cost_model;
    SceneParams scene;
    int max_iterations = 20;
    NoiseMode noise_mode = NoiseMode::Direct;
    double direct_sigma_cells = 1.5;
    int spread_radius = 1;
    bool measure_wall_time = false;
    bool empty_world = false;
};

/// The desk-scale reference setup of a domain: a 3-link arm reaching into a
/// 40 x 30 cell workspace from outside its left edge.
ScenarioTemplate reference_template(Domain d);

/// Scene seed actually used for episode `seed` (retries past infeasible
/// scenes deterministically).
Scenario instantiate(const ScenarioTemplate& t, std::uint64_t seed);

struct Variant {
    std::string name;
    CostMode mode = CostMode::Chs;
    PredictorKind predictor = PredictorKind::None;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> decay;
};

/// Applies a variant's overrides to a template.
ScenarioTemplate with_variant(ScenarioTemplate t, const Variant& v);

struct BenchmarkConfig {
    std::vector<Domain> domains{Domain::Pipe};
    std::vector<Variant> variants;
    int episodes_per_cell = 200;
    std::uint64_t base_seed = 0;
    std::filesystem::path output_dir = "bench_out";
    int threads = 1;
    /// Template per domain (reference_template plus config overrides).
    std::vector<ScenarioTemplate> templates;

    void validate() const;
    [[nodiscard]] const ScenarioTemplate& template_for(Domain d) const;
};

struct EpisodeRecord {
    Domain domain;
    std::string variant;
    std::uint64_t seed;
    EpisodeReport report;
};

struct CellSummary {
    Domain domain;
    std::string variant;
    int episodes = 0;
    double success_rate = 0.0;
    double num_iters = 0.0;
    double plan_s = 0.0;
    double exec_s = 0.0;
    double pred_s = 0.0;
    double contact_s = 0.0;
    double total_s = 0.0;
    int plan_failures = 0;
};

/// Runs one (domain, variant) cell; records are in seed order.
std::vector<EpisodeRecord> run_cell(const ScenarioTemplate& t, const Variant& v, int episodes, std::uint64_t base_seed,
                                    int threads = 1);
CellSummary summarize(const std::vector<EpisodeRecord>& records);

inline constexpr const char* kCsvHeader = "domain,variant,success_rate,num_iters,plan_s,exec_s,pred_s,contact_s,total_s";

std::string episode_json_line(const EpisodeRecord& r);
std::string csv_row(const CellSummary& s);

struct BenchmarkOutputs {
    std::filesystem::path episodes_jsonl;
    std::filesystem::path summary_csv;
    std::vector<CellSummary> cells;
};

/// Writes <output_dir>/episodes.jsonl and <output_dir>/summary.csv.
BenchmarkOutputs run_benchmark(const BenchmarkConfig& cfg);

/// Writes `count` framed training records to `out`.
void export_dataset(const ScenarioTemplate& t, int count, std::uint64_t seed, const std::filesystem::path& out);
/// In-memory form of export_dataset.
std::vector<DatasetRecord> make_dataset(const ScenarioTemplate& t, int count, std::uint64_t seed);

}  // namespace contactnav
