#include "contactnav/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "contactnav/grid_io.hpp"
#include "contactnav/rng.hpp"
#include "contactnav/wire.hpp"

namespace contactnav {

ScenarioTemplate reference_template(Domain d) {
    ScenarioTemplate t;
    t.domain = d;
    t.spec.dims = {40, 30};
    t.spec.resolution = 0.02;
    t.spec.origin = Vec2::Zero();

    const double deg = std::numbers::pi / 180.0;
    t.arm.base = Vec2(-0.06, 0.30);
    t.arm.link_lengths = {0.32, 0.28, 0.22};
    t.arm.link_masses = {1.2, 0.9, 0.6};
    t.arm.link_radius = 0.015;
    t.arm.steps_per_joint = 21;
    t.arm.joint_range = {{-40 * deg, 40 * deg}, {-100 * deg, 100 * deg}, {-100 * deg, 100 * deg}};
    t.start = Config{{7, 13, 14}};
    t.goal = Config{{16, 7, 6}};

    t.scene.domain = d;
    t.predictor.kind = PredictorKind::None;
    t.cost_model.mode = CostMode::Chs;
    return t;
}

Scenario instantiate(const ScenarioTemplate& t, std::uint64_t seed) {
    if (!valid_config(t.arm, t.start) || !valid_config(t.arm, t.goal))
        throw InvalidScenario("start/goal outside the lattice");
    Scenario sc;
    sc.arm = t.arm;
    sc.start = t.start;
    sc.goal = t.goal;
    sc.dyn = t.dyn;
    sc.cpf = t.cpf;
    sc.predictor = t.predictor;
    sc.cost_model = t.cost_model;
    sc.max_iterations = t.max_iterations;
    sc.noise_mode = t.noise_mode;
    sc.direct_sigma_cells = t.direct_sigma_cells;
    sc.spread_radius = t.spread_radius;
    sc.measure_wall_time = t.measure_wall_time;
    if (t.empty_world) {
        sc.world = GroundTruthGrid(t.spec);
        return sc;
    }
    SceneParams params = t.scene;
    params.domain = t.domain;
    params.keep_free = robot_cells(t.arm, t.start, t.spec).united(robot_cells(t.arm, t.goal, t.spec));
    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        try {
            sc.world = generate_scene(params, t.spec, attempt == 0 ? seed : mix64(seed ^ mix64(attempt)));
            return sc;
        } catch (const InfeasibleScene&) {
        }
    }
    throw InfeasibleScene("no feasible scene for seed " + std::to_string(seed));
}

ScenarioTemplate with_variant(ScenarioTemplate t, const Variant& v) {
    t.cost_model.mode = v.mode;
    t.predictor.kind = v.predictor;
    if (v.alpha) t.cost_model.alpha = *v.alpha;
    if (v.beta) t.cost_model.beta = *v.beta;
    if (v.decay) t.predictor.decay = *v.decay;
    return t;
}

void BenchmarkConfig::validate() const {
    if (episodes_per_cell < 1) throw std::invalid_argument("episodes_per_cell must be >= 1");
    if (variants.empty()) throw std::invalid_argument("at least one planner variant is required");
    if (domains.empty()) throw std::invalid_argument("at least one domain is required");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    for (Domain d : domains) (void)template_for(d);
}

const ScenarioTemplate& BenchmarkConfig::template_for(Domain d) const {
    for (const auto& t : templates)
        if (t.domain == d) return t;
    throw std::invalid_argument("no scenario template for domain " + to_string(d));
}

std::vector<EpisodeRecord> run_cell(const ScenarioTemplate& base, const Variant& v, int episodes,
                                    std::uint64_t base_seed, int threads) {
    const ScenarioTemplate t = with_variant(base, v);
    std::vector<EpisodeRecord> out(static_cast<std::size_t>(episodes));
    std::atomic<int> next{0};
    auto worker = [&] {
        SweepTable sweeps(t.arm, t.spec, t.dyn.substeps);
        for (int i = next++; i < episodes; i = next++) {
            const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
            const Scenario sc = instantiate(t, seed);
            out[static_cast<std::size_t>(i)] = {t.domain, v.name, seed, run_episode(sc, seed, sweeps)};
        }
    };
    const int n = std::max(1, std::min(threads, episodes));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < n; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

CellSummary summarize(const std::vector<EpisodeRecord>& records) {
    if (records.empty()) throw std::invalid_argument("cannot summarize an empty cell");
    CellSummary s{records.front().domain, records.front().variant};
    s.episodes = static_cast<int>(records.size());
    for (const auto& r : records) {
        s.success_rate += r.report.success ? 1.0 : 0.0;
        s.num_iters += r.report.num_iters;
        s.plan_s += r.report.plan_time;
        s.exec_s += r.report.exec_time;
        s.pred_s += r.report.predict_time;
        s.contact_s += r.report.contact_time;
        s.total_s += r.report.total_time;
        s.plan_failures += r.report.failure_kind == FailureKind::PlanFail ? 1 : 0;
    }
    const double n = s.episodes;
    for (double* f : {&s.success_rate, &s.num_iters, &s.plan_s, &s.exec_s, &s.pred_s, &s.contact_s, &s.total_s}) *f /= n;
    return s;
}

std::string episode_json_line(const EpisodeRecord& r) {
    nlohmann::json j = to_json(r.report);
    j["domain"] = to_string(r.domain);
    j["variant"] = r.variant;
    j["seed"] = r.seed;
    return j.dump();
}

std::string csv_row(const CellSummary& s) {
    std::string row = to_string(s.domain) + "," + s.variant;
    char buf[64];
    for (double v : {s.success_rate, s.num_iters, s.plan_s, s.exec_s, s.pred_s, s.contact_s, s.total_s}) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        row += buf;
    }
    return row;
}

BenchmarkOutputs run_benchmark(const BenchmarkConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    BenchmarkOutputs out;
    out.episodes_jsonl = cfg.output_dir / "episodes.jsonl";
    out.summary_csv = cfg.output_dir / "summary.csv";
    std::ofstream jl(out.episodes_jsonl, std::ios::binary);
    std::ofstream csv(out.summary_csv, std::ios::binary);
    if (!jl || !csv) throw std::runtime_error("cannot write to " + cfg.output_dir.string());
    csv << kCsvHeader << '\n';
    for (Domain d : cfg.domains) {
        for (const auto& v : cfg.variants) {
            const auto records = run_cell(cfg.template_for(d), v, cfg.episodes_per_cell, cfg.base_seed, cfg.threads);
            for (const auto& r : records) jl << episode_json_line(r) << '\n';
            out.cells.push_back(summarize(records));
            csv << csv_row(out.cells.back()) << '\n';
        }
    }
    return out;
}

namespace {

std::optional<Config> random_free_config(const ScenarioTemplate& t, const GroundTruthGrid& world, Rng& rng) {
    Config q;
    q.steps.resize(static_cast<std::size_t>(t.arm.links()));
    for (int attempt = 0; attempt < 1000; ++attempt) {
        for (auto& s : q.steps) s = static_cast<int>(rng.uniform_int(0, t.arm.steps_per_joint - 1));
        if (!world.intersects(robot_cells(t.arm, q, t.spec))) return q;
    }
    return std::nullopt;
}

}  // namespace

std::vector<DatasetRecord> make_dataset(const ScenarioTemplate& t, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    std::vector<DatasetRecord> out;
    const Lattice lat(t.arm);
    SimOptions geometry_only;
    geometry_only.proprioception = false;
    for (int i = 0; i < count; ++i) {
        Rng rng(seed, mix64(0xda7a + static_cast<std::uint64_t>(i)));
        SceneParams params = t.scene;
        params.domain = t.domain;
        GroundTruthGrid world;
        std::optional<Config> start;
        std::uint64_t scene_seed = 0;
        for (int attempt = 0; attempt < 16 && !start; ++attempt) {
            scene_seed = rng.next_u64();
            try {
                world = generate_scene(params, t.spec, scene_seed);
            } catch (const InfeasibleScene&) {
                continue;
            }
            start = random_free_config(t, world, rng);
        }
        if (!start) throw std::runtime_error("could not sample a collision-free start configuration");

        OccupancyEstimate est(t.spec);
        est.certify_free(robot_cells(t.arm, *start, t.spec));
        std::vector<std::int32_t> touched;
        const int actions = static_cast<int>(rng.uniform_int(1, 7));
        Config cur = *start;
        for (int k = 0; k < actions; ++k) {
            std::vector<int> moves;
            const StateIndex s = lat.index(cur);
            for (int a = 0; a < lat.actions(); ++a)
                if (lat.neighbor(s, a) >= 0) moves.push_back(a);
            const Action act =
                Action::from_code(moves[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(moves.size()) - 1))]);
            const Config to = apply(cur, act);
            const ExecutionTrace tr = simulate_edge(world, t.arm, t.dyn, cur, to, rng.next_u64(), geometry_only);
            est.certify_free(tr.certified_cells);
            if (tr.completed()) {
                cur = to;
                continue;
            }
            const std::int32_t id = world.object_id(tr.contact->cell);
            if (id != 0) touched.push_back(id);
            const CellCoord cc = t.spec.locate(tr.contact->point.point);
            if (t.spec.in_bounds(cc)) est.mark_contact(tr.contact->point.point, 1.0, 0);
        }

        DatasetRecord rec;
        rec.spec = t.spec;
        rec.domain = to_string(t.domain);
        rec.scene_seed = scene_seed;
        rec.actions = actions;
        rec.input = encode_states(est);
        rec.label.assign(static_cast<std::size_t>(t.spec.cell_count()), kCodeFree);
        for (CellIndex c = 0; c < t.spec.cell_count(); ++c) {
            const std::int32_t id = world.object_id(c);
            if (id != 0 && std::find(touched.begin(), touched.end(), id) != touched.end()) rec.label[c] = kCodeOccupied;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

void export_dataset(const ScenarioTemplate& t, int count, std::uint64_t seed, const std::filesystem::path& out) {
    Bytes bytes;
    for (const auto& rec : make_dataset(t, count, seed)) {
        const Bytes f = encode_frame(encode_record(rec));
        bytes.insert(bytes.end(), f.begin(), f.end());
    }
    write_file(out, bytes);
}

}  // namespace contactnav
