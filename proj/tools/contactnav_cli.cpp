// contactnav: benchmark campaigns, single episodes, scene generation and
// dataset export.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "contactnav/benchmark.hpp"
#include "contactnav/config_io.hpp"
#include "contactnav/grid_io.hpp"

using namespace contactnav;

namespace {

int cmd_bench(const std::string& config_path) {
    const BenchmarkConfig cfg = benchmark_from_json(load_json(config_path));
    const BenchmarkOutputs out = run_benchmark(cfg);
    std::cout << kCsvHeader << '\n';
    for (const auto& c : out.cells) std::cout << csv_row(c) << '\n';
    std::cerr << "wrote " << out.episodes_jsonl.string() << " and " << out.summary_csv.string() << '\n';
    return 0;
}

int cmd_episode(const std::string& scenario_path, std::uint64_t seed, const std::string& dump_path) {
    const std::filesystem::path p(scenario_path);
    const Scenario sc = scenario_from_json(load_json(p), seed, p.parent_path());
    EpisodeHooks hooks;
    std::ofstream dump;
    if (!dump_path.empty()) {
        dump.open(dump_path);
        if (!dump) throw std::runtime_error("cannot open " + dump_path);
        hooks.on_trace = [&](const ExecutionTrace& tr, const Config& from, const Config& to) {
            for (std::size_t i = 0; i < tr.samples.size(); ++i) {
                const auto& s = tr.samples[i];
                nlohmann::json j{{"from", from.steps},
                                 {"to", to.steps},
                                 {"t", s.t},
                                 {"q", std::vector<double>(s.q.data(), s.q.data() + s.q.size())},
                                 {"v", std::vector<double>(s.v.data(), s.v.data() + s.v.size())},
                                 {"tau", std::vector<double>(s.tau.data(), s.tau.data() + s.tau.size())},
                                 {"in_contact", tr.truth[i].in_contact}};
                dump << j.dump() << '\n';
            }
            if (tr.samples.empty()) {
                nlohmann::json j{{"from", from.steps}, {"to", to.steps}, {"completed", tr.completed()}};
                dump << j.dump() << '\n';
            }
        };
    }
    const EpisodeReport rep = run_episode(sc, seed, &hooks);
    std::cout << to_json(rep).dump(2) << '\n';
    return 0;
}

int cmd_export(const std::string& domain, int count, std::uint64_t seed, const std::string& out) {
    export_dataset(reference_template(domain_from_string(domain)), count, seed, out);
    std::cerr << "wrote " << count << " records to " << out << '\n';
    return 0;
}

int cmd_gen_scene(const std::string& domain, std::uint64_t seed, const std::string& out, bool ascii) {
    const ScenarioTemplate t = reference_template(domain_from_string(domain));
    const Scenario sc = instantiate(t, seed);
    write_file(out, encode_grid(sc.world, domain, seed));
    if (ascii) {
        const GridSpec& s = sc.world.spec();
        const CellSet start = robot_cells(sc.arm, sc.start, s);
        const CellSet goal = robot_cells(sc.arm, sc.goal, s);
        for (int j = s.dims[1] - 1; j >= 0; --j) {
            for (int i = 0; i < s.dims[0]; ++i) {
                const CellIndex c = s.index({i, j});
                char ch = '.';
                if (sc.world.occupied(c)) ch = '#';
                if (start.contains(c)) ch = 's';
                if (goal.contains(c)) ch = start.contains(c) ? 'b' : 'g';
                std::cout << ch;
            }
            std::cout << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contact-feedback manipulation planning in unknown grid workspaces"};
    app.require_subcommand(1);

    std::string config;
    auto* bench = app.add_subcommand("bench", "Run a benchmark campaign from a JSON config");
    bench->add_option("--config", config, "Benchmark config file")->required()->check(CLI::ExistingFile);

    std::string scenario, dump;
    std::uint64_t seed = 0;
    auto* episode = app.add_subcommand("episode", "Run one episode and print its report");
    episode->add_option("--scenario", scenario, "Scenario config file")->required()->check(CLI::ExistingFile);
    episode->add_option("--seed", seed, "Episode seed")->required();
    auto* dump_opt = episode
                         ->add_option("--debug-dump", dump,
                                      "Write the proprioceptive traces as JSON lines (default file debug_dump.jsonl)")
                         ->expected(0, 1);

    std::string domain, out;
    int count = 1;
    auto* exp = app.add_subcommand("export-dataset", "Write framed training records for external predictors");
    exp->add_option("--domain", domain, "pipe|shelf")->required()->check(CLI::IsMember({"pipe", "shelf"}));
    exp->add_option("--count", count, "Number of records")->required()->check(CLI::PositiveNumber);
    exp->add_option("--seed", seed, "Seed")->required();
    exp->add_option("--out", out, "Output file")->required();

    bool ascii = false;
    auto* gen = app.add_subcommand("gen-scene", "Generate a reference scene and write it in grid format");
    gen->add_option("--domain", domain, "pipe|shelf")->required()->check(CLI::IsMember({"pipe", "shelf"}));
    gen->add_option("--seed", seed, "Scene seed")->required();
    gen->add_option("--out", out, "Output file")->required();
    gen->add_flag("--ascii", ascii, "Also print the scene with start/goal footprints");

    CLI11_PARSE(app, argc, argv);
    if (dump_opt->count() > 0 && dump.empty()) dump = "debug_dump.jsonl";
    try {
        if (*bench) return cmd_bench(config);
        if (*episode) return cmd_episode(scenario, seed, dump);
        if (*exp) return cmd_export(domain, count, seed, out);
        if (*gen) return cmd_gen_scene(domain, seed, out, ascii);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
