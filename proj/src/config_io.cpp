#include "contactnav/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "contactnav/grid_io.hpp"

namespace contactnav {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok |= it.key() == a;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
void take(const json& j, const char* key, T& field) {
    if (!j.contains(key)) return;
    try {
        field = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

Vec2 vec2(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(key) + " must be a 2-element array");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

void take_range(const json& j, const char* key, IntRange& r) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw ConfigError(std::string(key) + " must be [lo, hi]");
    r = {v.at(0).get<int>(), v.at(1).get<int>()};
}

Config config_from(const json& j, const char* key) {
    Config q;
    try {
        q.steps = j.get<std::vector<int>>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(key) + " must be an array of integer joint steps");
    }
    return q;
}

}  // namespace

void apply_json(ArmModel& arm, const json& j) {
    check_keys(j, {"base", "link_lengths", "link_radius", "link_masses", "steps_per_joint", "joint_range",
                   "surface_samples_per_link"},
               "arm");
    if (j.contains("base")) arm.base = vec2(j.at("base"), "base");
    take(j, "link_lengths", arm.link_lengths);
    take(j, "link_radius", arm.link_radius);
    take(j, "link_masses", arm.link_masses);
    take(j, "steps_per_joint", arm.steps_per_joint);
    take(j, "surface_samples_per_link", arm.surface_samples_per_link);
    if (j.contains("joint_range")) {
        arm.joint_range.clear();
        for (const auto& r : j.at("joint_range")) {
            const Vec2 v = vec2(r, "joint_range entry");
            arm.joint_range.push_back({v.x(), v.y()});
        }
    }
}

void apply_json(GridSpec& spec, const json& j) {
    check_keys(j, {"dims", "resolution", "origin"}, "grid");
    if (j.contains("dims")) {
        const auto d = j.at("dims").get<std::vector<int>>();
        if (d.size() != kAxes) throw ConfigError("grid.dims must have one entry per axis");
        spec.dims = {d[0], d[1]};
    }
    take(j, "resolution", spec.resolution);
    if (j.contains("origin")) spec.origin = vec2(j.at("origin"), "origin");
}

void apply_json(DynParams& dyn, const json& j) {
    check_keys(j, {"gravity", "observer_gain", "torque_noise_std", "contact_force_range", "friction_mu",
                   "edge_duration", "sample_rate", "accel_fraction", "dwell_substeps", "substeps"},
               "dyn");
    if (j.contains("gravity")) dyn.gravity = vec2(j.at("gravity"), "gravity");
    take(j, "observer_gain", dyn.observer_gain);
    take(j, "torque_noise_std", dyn.torque_noise_std);
    if (j.contains("contact_force_range")) {
        const Vec2 f = vec2(j.at("contact_force_range"), "contact_force_range");
        dyn.force_min = f.x();
        dyn.force_max = f.y();
    }
    take(j, "friction_mu", dyn.friction_mu);
    take(j, "edge_duration", dyn.edge_duration);
    take(j, "sample_rate", dyn.sample_rate);
    take(j, "accel_fraction", dyn.accel_fraction);
    take(j, "dwell_substeps", dyn.dwell_substeps);
    take(j, "substeps", dyn.substeps);
}

void apply_json(CpfParams& cpf, const json& j) {
    check_keys(j, {"num_particles", "iterations", "motion_noise_std", "sigma_meas", "detect_threshold",
                   "cluster_radius", "mu"},
               "cpf");
    take(j, "num_particles", cpf.num_particles);
    take(j, "iterations", cpf.iterations);
    take(j, "motion_noise_std", cpf.motion_noise_std);
    take(j, "sigma_meas", cpf.sigma_meas);
    take(j, "detect_threshold", cpf.detect_threshold);
    take(j, "cluster_radius", cpf.cluster_radius);
    take(j, "mu", cpf.mu);
}

void apply_json(PredictorConfig& pred, const json& j) {
    check_keys(j, {"kind", "decay", "axes", "external_cmd", "timeout_ms", "prob_floor", "prob_ceiling"}, "predictor");
    if (j.contains("kind")) pred.kind = predictor_kind_from_string(j.at("kind").get<std::string>());
    take(j, "decay", pred.decay);
    take(j, "axes", pred.axes);
    take(j, "external_cmd", pred.external_cmd);
    take(j, "timeout_ms", pred.timeout_ms);
    take(j, "prob_floor", pred.prob_floor);
    take(j, "prob_ceiling", pred.prob_ceiling);
}

void apply_json(CostModel& cm, const json& j) {
    check_keys(j, {"mode", "alpha", "beta", "prune_threshold", "heuristic_weight", "expansion_budget", "delta", "zeta"},
               "cost_model");
    if (j.contains("mode")) cm.mode = cost_mode_from_string(j.at("mode").get<std::string>());
    take(j, "alpha", cm.alpha);
    take(j, "beta", cm.beta);
    take(j, "prune_threshold", cm.prune_threshold);
    take(j, "heuristic_weight", cm.heuristic_weight);
    take(j, "expansion_budget", cm.expansion_budget);
    take(j, "delta", cm.delta);
    take(j, "zeta", cm.zeta);
}

void apply_json(SceneParams& sp, const json& j) {
    check_keys(j, {"pipe_count_range", "partition_count_range", "object_count_range", "pipe_thickness", "max_tilt_deg",
                   "span_axis", "clearance", "max_retries"},
               "scene");
    take_range(j, "pipe_count_range", sp.pipe_count);
    take_range(j, "partition_count_range", sp.partition_count);
    take_range(j, "object_count_range", sp.object_count);
    take(j, "pipe_thickness", sp.pipe_thickness);
    take(j, "max_tilt_deg", sp.max_tilt_deg);
    take(j, "span_axis", sp.span_axis);
    take(j, "clearance", sp.clearance);
    take(j, "max_retries", sp.max_retries);
}

void apply_json(ScenarioTemplate& t, const json& j) {
    check_keys(j, {"domain", "arm", "grid", "start", "goal", "dyn", "cpf", "predictor", "cost_model", "scene",
                   "max_iterations", "noise_mode", "direct_sigma_cells", "spread_radius", "measure_wall_time",
                   "empty_world", "world"},
               "scenario");
    if (j.contains("arm")) apply_json(t.arm, j.at("arm"));
    if (j.contains("grid")) apply_json(t.spec, j.at("grid"));
    if (j.contains("start")) t.start = config_from(j.at("start"), "start");
    if (j.contains("goal")) t.goal = config_from(j.at("goal"), "goal");
    if (j.contains("dyn")) apply_json(t.dyn, j.at("dyn"));
    if (j.contains("cpf")) apply_json(t.cpf, j.at("cpf"));
    if (j.contains("predictor")) apply_json(t.predictor, j.at("predictor"));
    if (j.contains("cost_model")) apply_json(t.cost_model, j.at("cost_model"));
    if (j.contains("scene")) apply_json(t.scene, j.at("scene"));
    take(j, "max_iterations", t.max_iterations);
    if (j.contains("noise_mode")) t.noise_mode = noise_mode_from_string(j.at("noise_mode").get<std::string>());
    take(j, "direct_sigma_cells", t.direct_sigma_cells);
    take(j, "spread_radius", t.spread_radius);
    take(j, "measure_wall_time", t.measure_wall_time);
    take(j, "empty_world", t.empty_world);
    if (!valid_config(t.arm, t.start) || !valid_config(t.arm, t.goal))
        throw ConfigError("start/goal must give one in-range step per arm joint");
}

Variant variant_from_json(const json& j) {
    check_keys(j, {"name", "mode", "predictor", "alpha", "beta", "decay"}, "variant");
    Variant v;
    v.mode = cost_mode_from_string(j.value("mode", std::string("chs")));
    v.predictor = predictor_kind_from_string(j.value("predictor", std::string("none")));
    v.name = j.value("name", to_string(v.mode) + (v.predictor == PredictorKind::None ? "" : "+" + to_string(v.predictor)));
    if (j.contains("alpha")) v.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) v.beta = j.at("beta").get<double>();
    if (j.contains("decay")) v.decay = j.at("decay").get<double>();
    return v;
}

Scenario scenario_from_json(const json& j, std::uint64_t seed, const std::filesystem::path& base_dir) {
    const Domain d = domain_from_string(j.value("domain", std::string("pipe")));
    ScenarioTemplate t = reference_template(d);
    apply_json(t, j);
    std::uint64_t scene_seed = seed;
    if (j.contains("world")) {
        const auto& w = j.at("world");
        check_keys(w, {"file", "empty", "seed"}, "world");
        if (w.value("empty", false)) t.empty_world = true;
        if (w.contains("seed")) scene_seed = w.at("seed").get<std::uint64_t>();
        if (w.contains("file")) {
            std::filesystem::path p = w.at("file").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            const StoredGrid g = decode_grid(read_file(p));
            ScenarioTemplate shell = t;
            shell.empty_world = true;
            Scenario sc = instantiate(shell, 0);
            if (!(g.grid.spec() == t.spec)) throw ConfigError("world file grid does not match the scenario grid");
            sc.world = g.grid;
            return sc;
        }
    }
    return instantiate(t, scene_seed);
}

BenchmarkConfig benchmark_from_json(const json& j) {
    check_keys(j, {"domains", "variants", "episodes_per_cell", "base_seed", "output_dir", "threads", "scenario",
                   "overrides"},
               "benchmark");
    BenchmarkConfig cfg;
    if (j.contains("domains")) {
        cfg.domains.clear();
        for (const auto& d : j.at("domains")) cfg.domains.push_back(domain_from_string(d.get<std::string>()));
    }
    if (j.contains("variants"))
        for (const auto& v : j.at("variants")) cfg.variants.push_back(variant_from_json(v));
    take(j, "episodes_per_cell", cfg.episodes_per_cell);
    take(j, "base_seed", cfg.base_seed);
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    take(j, "threads", cfg.threads);
    for (Domain d : cfg.domains) {
        ScenarioTemplate t = reference_template(d);
        // "scenario" applies to every domain; "overrides": {"pipe": {...}} to one.
        if (j.contains("scenario")) apply_json(t, j.at("scenario"));
        if (j.contains("overrides") && j.at("overrides").contains(to_string(d)))
            apply_json(t, j.at("overrides").at(to_string(d)));
        cfg.templates.push_back(std::move(t));
    }
    cfg.validate();
    return cfg;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace contactnav
