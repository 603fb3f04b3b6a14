#include "contactnav/executive.hpp"

#include <chrono>
#include <cmath>

#include "contactnav/observer.hpp"
#include "contactnav/rng.hpp"

namespace contactnav {

std::string to_string(NoiseMode m) { return m == NoiseMode::Observer ? "observer" : "direct"; }

NoiseMode noise_mode_from_string(const std::string& s) {
    if (s == "observer") return NoiseMode::Observer;
    if (s == "direct") return NoiseMode::Direct;
    throw std::invalid_argument("unknown noise mode '" + s + "' (expected observer|direct)");
}

std::string to_string(FailureKind k) {
    switch (k) {
        case FailureKind::None: return "none";
        case FailureKind::PlanFail: return "plan_fail";
        case FailureKind::IterationCap: return "iteration_cap";
    }
    return "none";
}

void Scenario::validate() const {
    arm.validate();
    dyn.validate();
    cpf.validate();
    predictor.validate();
    cost_model.validate();
    if (max_iterations < 1) throw InvalidScenario("max_iterations must be >= 1");
    if (direct_sigma_cells < 0.0 || spread_radius < 0) throw InvalidScenario("noise/spread settings must be >= 0");
    if (!valid_config(arm, start) || !valid_config(arm, goal)) throw InvalidScenario("start/goal outside the lattice");
    if (world.intersects(robot_cells(arm, start, world.spec()))) throw InvalidScenario("start configuration collides");
    if (world.intersects(robot_cells(arm, goal, world.spec()))) throw InvalidScenario("goal configuration collides");
}

namespace {

nlohmann::json config_json(const Config& q) { return q.steps; }

class Stopwatch {
public:
    explicit Stopwatch(bool on) : on_(on) {
        if (on_) t0_ = std::chrono::steady_clock::now();
    }
    [[nodiscard]] double seconds() const {
        if (!on_) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    bool on_;
    std::chrono::steady_clock::time_point t0_;
};

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t k) {
    return mix64(seed ^ mix64(tag ^ mix64(k + 1)));
}

ContactEstimate localize(const Scenario& sc, const ExecutionTrace& trace, const EpisodeState& state,
                         std::uint64_t seed, ContactEvent& ev) {
    const ContactTruth& truth = *trace.contact;
    if (sc.noise_mode == NoiseMode::Direct) {
        Rng rng(seed, mix64(0xd17ec7));
        const double sigma = sc.direct_sigma_cells * sc.world.spec().resolution;
        const Vec2 noisy = truth.point.point + Vec2(rng.normal(0.0, sigma), rng.normal(0.0, sigma));
        ContactEstimate out;
        out.surface = project_to_surface(sc.arm, truth.config, noisy);
        out.point = out.surface.point;
        out.force = truth.force;
        out.confidence = 1.0;
        return out;
    }

    const auto residuals = run_observer(trace.samples, sc.arm, sc.dyn);
    const double dt = sc.dyn.dt();
    std::size_t onset = 0;
    while (onset < trace.samples.size() && trace.samples[onset].t < truth.onset_time) ++onset;
    const int det = first_detection(residuals, sc.cpf.detect_threshold);
    ev.detected = det >= 0;
    ev.detection_delay = det >= 0 ? trace.samples[static_cast<std::size_t>(det)].t - truth.onset_time : 0.0;

    // Average over the settled part of the dwell: five observer time constants after onset.
    const double kmin = sc.dyn.gain(sc.arm.links()).minCoeff();
    std::size_t begin = onset + static_cast<std::size_t>(std::ceil(5.0 / kmin / dt));
    const std::size_t end = residuals.size();
    if (begin >= end) begin = onset < end ? onset : end - 1;
    CpfInput in;
    in.residual = average_residual(residuals, begin, end);
    in.angles = trace.samples.back().q;
    in.velocity = trace.approach_velocity;
    return cpf_localize(in, sc.arm, state.estimate, sc.cpf, seed);
}

}  // namespace

EpisodeState initial_state(const Scenario& sc) {
    EpisodeState st;
    st.estimate = OccupancyEstimate(sc.world.spec());
    st.current = sc.start;
    st.certified = robot_cells(sc.arm, sc.start, sc.world.spec());
    st.estimate.certify_free(st.certified);
    st.disc.delta = sc.cost_model.delta;
    st.disc.zeta = sc.cost_model.zeta;
    return st;
}

ExecResult execute_path(const Scenario& sc, const std::vector<Config>& path, EpisodeState& state,
                        SweepTable& sweeps, std::uint64_t seed, int iteration, const EpisodeHooks* hooks) {
    ExecResult res;
    res.reached = state.current;
    if (path.empty()) return res;
    if (path.front() != state.current) throw PathDiscontinuity("path does not start at the current configuration");
    const Lattice& lat = sweeps.lattice();
    SimOptions opts;
    opts.proprioception = sc.noise_mode == NoiseMode::Observer;

    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Config& from = path[i];
        const Config& to = path[i + 1];
        Action act;
        try {
            act = action_between(from, to);
        } catch (const InvalidPrimitive&) {
            throw PathDiscontinuity("consecutive path configurations are not a unit motion");
        }
        const StateIndex s = lat.index(from);
        opts.swept_hint = &sweeps.swept(s, act.code());
        const std::uint64_t edge_seed = derive(seed, 0xed9e, state.edge_counter++);
        const ExecutionTrace trace = simulate_edge(sc.world, sc.arm, sc.dyn, from, to, edge_seed, opts);
        if (hooks && hooks->on_trace) hooks->on_trace(trace, from, to);
        res.cost += 1;

        if (trace.completed()) {
            const CellSet fresh = trace.certified_cells.minus(state.certified);
            state.estimate.certify_free(trace.certified_cells);
            state.certified.unite(fresh);
            prune_chs(state.chs, fresh, state.estimate);
            state.current = to;
            res.reached = to;
            ++res.edges_completed;
            continue;
        }

        // Contact: fold in the partial sweep, localize, record constraints, retract.
        const Stopwatch watch(sc.measure_wall_time);
        ContactEvent ev;
        ev.iteration = iteration;
        ev.from = from;
        ev.to = to;
        ev.substep = trace.contact->substep;
        ev.true_point = trace.contact->point.point;

        const CellSet fresh = trace.certified_cells.minus(state.certified);
        state.estimate.certify_free(trace.certified_cells);
        state.certified.unite(fresh);
        prune_chs(state.chs, fresh, state.estimate);

        const ContactEstimate est = localize(sc, trace, state, derive(seed, 0xc0ac7, state.edge_counter), ev);
        ev.estimated_point = est.point;
        ev.error = (est.point - ev.true_point).norm();
        ev.confidence = est.confidence;
        try {
            // The obstacle lies just outside the touched surface; mark the cell
            // one resolution out along the normal rather than the robot's own.
            const Vec2 mark = est.point + sc.world.spec().resolution * est.surface.normal;
            state.estimate.mark_contact(mark, est.confidence, sc.spread_radius);
        } catch (const OutOfGrid&) {
            // Localized outside the workspace grid: nothing to mark.
        }

        ChsSet k = chs_from_collision(sc.arm, trace.contact->last_free_config, state.estimate);
        k.origin_from = from;
        k.origin_to = to;
        k.created_iter = iteration;
        ev.chs_size = k.cells.size();
        if (hooks && hooks->on_collision) hooks->on_collision(k, trace);
        state.chs.push_back(std::move(k));
        prune_chs(state.chs, CellSet{}, state.estimate);
        state.disc.add(from, act);
        state.invalid.add(s, act.code());

        res.contact = ev;
        res.contact_time = watch.seconds();
        res.reached = from;  // retract to the edge's source
        state.current = from;
        break;
    }
    return res;
}

EpisodeReport run_episode(const Scenario& sc, std::uint64_t seed, const EpisodeHooks* hooks) {
    SweepTable sweeps(sc.arm, sc.world.spec(), sc.dyn.substeps);
    return run_episode(sc, seed, sweeps, hooks);
}

EpisodeReport run_episode(const Scenario& sc, std::uint64_t seed, SweepTable& sweeps, const EpisodeHooks* hooks) {
    sc.validate();
    const Stopwatch total(sc.measure_wall_time);
    EpisodeReport rep;
    EpisodeState state = initial_state(sc);
    int steps = 0;

    for (int iter = 1;; ++iter) {
        if (state.current == sc.goal) {
            rep.success = true;
            break;
        }
        if (iter > sc.max_iterations) {
            rep.failure_kind = FailureKind::IterationCap;
            break;
        }
        rep.num_iters = iter;
        IterationLog log;
        log.iteration = iter;

        const Stopwatch pw(sc.measure_wall_time);
        const Prediction pred = predict(state.estimate, sc.predictor);
        rep.predict_time += pw.seconds();

        PlanContext ctx;
        ctx.sweeps = &sweeps;
        ctx.estimate = &state.estimate;
        ctx.prediction = &pred;
        ctx.chs = &state.chs;
        ctx.disc = &state.disc;
        ctx.invalid = &state.invalid;
        if (hooks && hooks->on_plan) hooks->on_plan(PlanSnapshot{iter, sc.cost_model, ctx, state});

        const Stopwatch plw(sc.measure_wall_time);
        const PlanResult plan_res = plan(state.current, sc.goal, sc.cost_model, ctx);
        rep.plan_time += plw.seconds();
        log.plan_status = to_string(plan_res.status);
        log.expansions = plan_res.expansions;
        if (plan_res.status != PlanStatus::Path) {
            rep.failure_kind = FailureKind::PlanFail;
            rep.log.push_back(std::move(log));
            break;
        }
        log.path_edges = plan_res.path.size() - 1;

        const ExecResult ex = execute_path(sc, plan_res.path, state, sweeps, seed, iter, hooks);
        steps += ex.cost;
        rep.edges_executed += ex.edges_completed;
        rep.contact_time += ex.contact_time;
        log.edges_completed = ex.edges_completed;
        if (ex.contact) {
            ++rep.contacts;
            log.contact = ex.contact;
        }
        rep.log.push_back(std::move(log));
    }
    rep.exec_time = steps * sc.dyn.edge_duration;
    rep.total_time = sc.measure_wall_time ? total.seconds() + rep.exec_time : rep.exec_time;
    return rep;
}

nlohmann::json to_json(const EpisodeReport& r) {
    nlohmann::json log = nlohmann::json::array();
    for (const auto& it : r.log) {
        nlohmann::json e{{"iteration", it.iteration},
                         {"plan_status", it.plan_status},
                         {"path_edges", it.path_edges},
                         {"expansions", it.expansions},
                         {"edges_completed", it.edges_completed}};
        if (it.contact) {
            const auto& c = *it.contact;
            e["contact"] = {{"from", config_json(c.from)},
                            {"to", config_json(c.to)},
                            {"substep", c.substep},
                            {"detected", c.detected},
                            {"detection_delay", c.detection_delay},
                            {"true_point", {c.true_point.x(), c.true_point.y()}},
                            {"estimated_point", {c.estimated_point.x(), c.estimated_point.y()}},
                            {"error", c.error},
                            {"confidence", c.confidence},
                            {"chs_size", c.chs_size}};
        }
        log.push_back(std::move(e));
    }
    return {{"success", r.success},
            {"failure_kind", to_string(r.failure_kind)},
            {"num_iters", r.num_iters},
            {"plan_s", r.plan_time},
            {"exec_s", r.exec_time},
            {"pred_s", r.predict_time},
            {"contact_s", r.contact_time},
            {"total_s", r.total_time},
            {"edges_executed", r.edges_executed},
            {"contacts", r.contacts},
            {"log", std::move(log)}};
}

}  // namespace contactnav
