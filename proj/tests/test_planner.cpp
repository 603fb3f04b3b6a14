#include <doctest.h>

#include "contactnav/executive.hpp"
#include "contactnav/planner.hpp"
#include "planner_fixtures.hpp"

using namespace testing;

namespace {

ChsSet chs_of(std::vector<CellIndex> cells) {
    ChsSet k;
    k.cells = CellSet(std::move(cells));
    return k;
}

// First lattice pose whose footprint stays clear of the grid border.
VecX interior_pose(const ArmModel& arm, const GridSpec& s) {
    const Lattice lat(arm);
    const GridSpec pad = padded(s, 2);
    for (StateIndex i = 0; i < lat.size(); ++i) {
        const VecX q = joint_angles(arm, lat.config(i));
        const CellSet body = robot_cells(arm, q, pad);
        bool inside = true;
        for (CellIndex c : body) {
            const CellCoord cc = pad.coord(c);
            inside = inside && cc[0] >= 3 && cc[1] >= 3 && cc[0] < s.dims[0] && cc[1] < s.dims[1];
        }
        if (inside) return q;
    }
    throw std::logic_error("no interior pose");
}

}  // namespace

TEST_CASE("chs: unknown estimate gives the full footprint ring") {
    const ArmModel arm = two_link_arm();
    const GridSpec s = small_grid();
    const OccupancyEstimate est(s);
    const VecX q = interior_pose(arm, s);
    const CellSet body = robot_cells(arm, q, s);
    const ChsSet k = chs_from_collision(arm, q, est);
    CHECK(k.cells == dilate(body, s).minus(body));
    CHECK(!k.cells.intersected(body).size());
}

TEST_CASE("chs: free-cell filter down to a singleton, and the unfiltered fallback") {
    const ArmModel arm = two_link_arm();
    const GridSpec s = small_grid();
    const VecX q = interior_pose(arm, s);
    const CellSet body = robot_cells(arm, q, s);
    const CellSet ring = dilate(body, s).minus(body);
    std::vector<CellIndex> all;
    for (CellIndex c = 0; c < s.cell_count(); ++c)
        if (c != ring[0]) all.push_back(c);
    OccupancyEstimate est(s);
    est.certify_free(CellSet(all));
    CHECK(chs_from_collision(arm, q, est).cells.values() == std::vector<CellIndex>{ring[0]});
    est.certify_free(CellSet(std::vector<CellIndex>{ring[0]}));
    CHECK(chs_from_collision(arm, q, est).cells == ring);
}

TEST_CASE("edge validity examples") {
    const CellSet swept(std::vector<CellIndex>{1, 2, 10, 20});
    CHECK(edge_validity(swept, {}) == 1.0);
    CHECK(edge_validity(swept, {chs_of({5, 6})}) == 1.0);
    CHECK(edge_validity(swept, {chs_of({1, 2, 3, 4})}) == 0.5);
    CHECK(edge_validity(swept, {chs_of({10, 11}), chs_of({20, 21, 22, 23})}) == 0.375);
    CHECK(edge_validity(swept, {chs_of({5, 6}), chs_of({1, 20})}) == 0.0);
}

TEST_CASE("cmax penalty examples") {
    DiscrepancySet d;
    d.delta = 3;
    d.zeta = 4;
    const Action a{0, 1};
    CHECK(cmax_penalty(config_of({5, 5}), a, d) == 0.0);
    d.add(config_of({3, 5}), a);
    d.add(config_of({3, 5}), a);
    CHECK(d.entries.size() == 1);
    CHECK(cmax_penalty(config_of({3, 5}), a, d) == kInf);
    CHECK(cmax_penalty(config_of({5, 5}), a, d) == doctest::Approx(2.0));
    CHECK(cmax_penalty(config_of({5, 5}), Action{0, -1}, d) == 0.0);
    CHECK(cmax_penalty(config_of({6, 5}), a, d) == 0.0);
    CHECK(lattice_distance(config_of({0, 0}), config_of({3, 4})) == 5.0);
}

TEST_CASE("edge cost examples") {
    SweepTable sweeps(two_link_arm(), small_grid());
    const OccupancyEstimate est(sweeps.spec());
    const Prediction zero{sweeps.spec(), std::vector<double>(static_cast<std::size_t>(sweeps.spec().cell_count()), 0.0)};
    PlanContext ctx;
    ctx.sweeps = &sweeps;
    ctx.estimate = &est;
    ctx.prediction = &zero;
    const StateIndex s = sweeps.lattice().index(config_of({3, 3}));
    const int a = Action{1, 1}.code();
    CostModel m;
    CHECK(edge_cost(s, a, m, ctx) == 1.0);

    const CellSet& swept = sweeps.swept(s, a);
    // A 4-cell hypothesis half covered by the sweep: P = 0.5.
    CellIndex outside = 0;
    std::vector<CellIndex> off;
    for (CellIndex c = 0; c < sweeps.spec().cell_count() && off.size() < 2; ++c)
        if (!swept.contains(c)) off.push_back(c);
    (void)outside;
    std::vector<ChsSet> chs{chs_of({swept[0], swept[1], off[0], off[1]})};
    ctx.chs = &chs;
    CHECK(edge_cost(s, a, m, ctx) == doctest::Approx(11.0));
    std::vector<ChsSet> covered{chs_of({swept[0], swept[1]})};
    ctx.chs = &covered;
    m.beta = 100.0;
    CHECK(edge_cost(s, a, m, ctx) == kInf);

    // Occupancy term: mean prediction over non-free swept cells.
    ctx.chs = nullptr;
    const Prediction half{sweeps.spec(), std::vector<double>(static_cast<std::size_t>(sweeps.spec().cell_count()), 0.5)};
    ctx.prediction = &half;
    m.beta = 2.0;
    CHECK(occupancy_cost(swept, est, half) == doctest::Approx(0.5));
    CHECK(edge_cost(s, a, m, ctx) == doctest::Approx(2.0));

    // EstimateOnly prunes above the threshold.
    m.mode = CostMode::EstimateOnly;
    m.beta = 1.0;
    CHECK(edge_cost(s, a, m, ctx) == doctest::Approx(1.5));
    Prediction hot = half;
    hot.p[static_cast<std::size_t>(swept[0])] = 0.9;
    ctx.prediction = &hot;
    CHECK(edge_cost(s, a, m, ctx) == kInf);

    EdgeSet invalid;
    invalid.add(s, a);
    ctx.invalid = &invalid;
    ctx.prediction = &zero;
    for (CostMode mode : {CostMode::Chs, CostMode::Cmax, CostMode::EstimateOnly}) {
        m.mode = mode;
        CHECK(edge_cost(s, a, m, ctx) == kInf);
    }
}

TEST_CASE("plan: empty context gives an L1-minimal path") {
    SweepTable sweeps(three_link_arm(), reference_template(Domain::Pipe).spec);
    PlanContext ctx;
    ctx.sweeps = &sweeps;
    CostModel m;
    m.beta = 0.0;
    const Config a = config_of({2, 9, 17}), b = config_of({12, 4, 15});
    const PlanResult r = plan(a, b, m, ctx);
    REQUIRE(r.status == PlanStatus::Path);
    CHECK(r.path.front() == a);
    CHECK(r.path.back() == b);
    CHECK(r.path.size() == 1 + 10 + 5 + 2);
    CHECK(r.cost == 17.0);
    for (std::size_t i = 0; i + 1 < r.path.size(); ++i) CHECK_NOTHROW(action_between(r.path[i], r.path[i + 1]));

    const PlanResult same = plan(a, a, m, ctx);
    CHECK(same.status == PlanStatus::Path);
    CHECK(same.path == std::vector<Config>{a});
}

TEST_CASE("plan: disconnected goal and exhausted budget") {
    SweepTable sweeps(two_link_arm(), small_grid());
    const Lattice& lat = sweeps.lattice();
    const Config goal = config_of({4, 4});
    EdgeSet invalid;
    for (int a = 0; a < lat.actions(); ++a) {
        const StateIndex n = lat.neighbor(lat.index(goal), a);
        if (n < 0) continue;
        invalid.add(n, action_between(lat.config(n), goal).code());
    }
    PlanContext ctx;
    ctx.sweeps = &sweeps;
    ctx.invalid = &invalid;
    CostModel m;
    CHECK(plan(config_of({0, 0}), goal, m, ctx).status == PlanStatus::Infeasible);
    m.expansion_budget = 2;
    ctx.invalid = nullptr;
    const PlanResult r = plan(config_of({0, 0}), config_of({7, 7}), m, ctx);
    CHECK(r.status == PlanStatus::BudgetExhausted);
    CHECK(r.expansions <= 2);
}

TEST_CASE("plan: deterministic tie-breaking") {
    SweepTable sweeps(two_link_arm(), small_grid());
    PlanContext ctx;
    ctx.sweeps = &sweeps;
    CostModel m;
    m.heuristic_weight = 1.0;
    const PlanResult a = plan(config_of({0, 0}), config_of({3, 3}), m, ctx);
    const PlanResult b = plan(config_of({0, 0}), config_of({3, 3}), m, ctx);
    CHECK(a.path == b.path);
    CHECK(a.expansions == b.expansions);
}

TEST_CASE("prune_chs: disjoint, elimination and idempotence") {
    OccupancyEstimate est(small_grid(6, 6, 0.1));
    std::vector<ChsSet> chs{chs_of({1, 2, 3}), chs_of({10, 11})};
    prune_chs(chs, CellSet(std::vector<CellIndex>{20, 21}), est);
    CHECK(chs[0].cells.size() == 3);
    CHECK(chs[1].cells.size() == 2);
    prune_chs(chs, CellSet(std::vector<CellIndex>{1, 2}), est);
    CHECK(chs[0].cells.values() == std::vector<CellIndex>{3});
    CHECK(est.state(3) == CellState::KnownOccupied);
    const auto snapshot = chs[0].cells;
    prune_chs(chs, CellSet(std::vector<CellIndex>{1, 2}), est);
    CHECK(chs[0].cells == snapshot);
    prune_chs(chs, CellSet(std::vector<CellIndex>{3}), est);
    CHECK(chs[0].cells.size() == 1);
}

TEST_CASE("cost mode names") {
    CHECK(cost_mode_from_string("cmax") == CostMode::Cmax);
    CHECK(cost_mode_from_string("estimate_only") == CostMode::EstimateOnly);
    CHECK(to_string(CostMode::Chs) == "chs");
    CHECK_THROWS(cost_mode_from_string("astar"));
    CostModel m;
    m.heuristic_weight = 0.5;
    CHECK_THROWS(m.validate());
}

TEST_SUITE("properties") {
    TEST_CASE("planner: w = 1 matches the Dijkstra oracle") {
        Rng rng(101);
        int solved = 0;
        for (int k = 0; k < 20; ++k) {
            PlannerInstance in = random_planner_instance(rng);
            const PlanContext ctx = in.context();
            const PlanResult r = plan(in.start, in.goal, in.model, ctx);
            const double oracle = dijkstra_cost(in.start, in.goal, in.model, ctx);
            if (std::isfinite(oracle)) {
                REQUIRE(r.status == PlanStatus::Path);
                CHECK(r.cost == oracle);
                CHECK(path_cost(r.path, in.model, ctx) == oracle);
                ++solved;
            } else {
                CHECK(r.status == PlanStatus::Infeasible);
            }
        }
        CHECK(solved >= 5);
    }

    TEST_CASE("planner: returned paths have finite cost under the model") {
        Rng rng(102);
        for (int k = 0; k < 20; ++k) {
            PlannerInstance in = random_planner_instance(rng);
            in.model.heuristic_weight = 5.0;
            const PlanContext ctx = in.context();
            const PlanResult r = plan(in.start, in.goal, in.model, ctx);
            if (r.status != PlanStatus::Path) continue;
            CHECK(std::isfinite(path_cost(r.path, in.model, ctx)));
            CHECK(path_cost(r.path, in.model, ctx) == doctest::Approx(r.cost));
        }
    }

    TEST_CASE("planner: adding a hypothesis never raises validity") {
        Rng rng(103);
        for (int k = 0; k < 200; ++k) {
            std::vector<CellIndex> sw;
            for (int i = 0; i < 30; ++i) sw.push_back(static_cast<CellIndex>(rng.uniform_int(0, 99)));
            const CellSet swept(sw);
            std::vector<ChsSet> chs;
            double prev = edge_validity(swept, chs);
            for (int i = 0; i < 5; ++i) {
                std::vector<CellIndex> kc;
                const auto n = rng.uniform_int(1, 6);
                for (int j = 0; j < n; ++j) kc.push_back(static_cast<CellIndex>(rng.uniform_int(0, 99)));
                chs.push_back(chs_of(kc));
                const double now = edge_validity(swept, chs);
                CHECK(now <= prev);
                CHECK(now >= 0.0);
                prev = now;
            }
        }
    }

    TEST_CASE("planner: bias, not prune, and beta = 0 recovers vanilla costs") {
        SweepTable sweeps(two_link_arm(), small_grid());
        const Lattice& lat = sweeps.lattice();
        Rng rng(104);
        OccupancyEstimate est(sweeps.spec());
        Prediction pred{sweeps.spec(), std::vector<double>(static_cast<std::size_t>(sweeps.spec().cell_count()))};
        for (auto& v : pred.p) v = rng.uniform();
        std::vector<ChsSet> chs;
        for (int i = 0; i < 6; ++i) {
            std::vector<CellIndex> kc;
            for (int j = 0; j < 5; ++j) kc.push_back(static_cast<CellIndex>(rng.uniform_int(0, sweeps.spec().cell_count() - 1)));
            chs.push_back(chs_of(kc));
        }
        DiscrepancySet disc;
        disc.add(config_of({3, 3}), Action{0, 1});
        PlanContext ctx;
        ctx.sweeps = &sweeps;
        ctx.estimate = &est;
        ctx.prediction = &pred;
        ctx.chs = &chs;
        ctx.disc = &disc;
        for (StateIndex s = 0; s < lat.size(); ++s)
            for (int a = 0; a < lat.actions(); ++a) {
                if (lat.neighbor(s, a) < 0) continue;
                const double p = edge_validity(sweeps.swept(s, a), chs);
                CostModel m;
                m.beta = 3.0;
                const double biased = edge_cost(s, a, m, ctx);
                if (p > 0) CHECK(std::isfinite(biased));
                m.beta = 0.0;
                const double vanilla = p > 0 ? 1.0 + m.alpha * (1.0 / p - 1.0) : kInf;
                CHECK(edge_cost(s, a, m, ctx) == vanilla);

                CostModel cm;
                cm.mode = CostMode::Cmax;
                cm.beta = 0.0;
                const double pen = cmax_penalty(lat.config(s), Action::from_code(a), disc);
                CHECK(edge_cost(s, a, cm, ctx) == (std::isfinite(pen) ? 1.0 + pen : kInf));
            }
    }

    TEST_CASE("planner: a collided edge is never offered again") {
        const auto t = reference_template(Domain::Pipe);
        int checked = 0;
        for (CostMode mode : {CostMode::Chs, CostMode::Cmax}) {
            for (std::uint64_t seed = 0; seed < 8; ++seed) {
                Scenario sc = instantiate(t, seed);
                sc.cost_model.mode = mode;
                SweepTable sweeps(sc.arm, sc.world.spec(), sc.dyn.substeps);
                const Lattice& lat = sweeps.lattice();
                std::vector<std::pair<StateIndex, int>> hit;
                EpisodeHooks hooks;
                hooks.on_collision = [&](const ChsSet& k, const ExecutionTrace&) {
                    hit.emplace_back(lat.index(k.origin_from), action_between(k.origin_from, k.origin_to).code());
                };
                hooks.on_plan = [&](const PlanSnapshot& snap) {
                    for (const auto& [s, a] : hit) {
                        CHECK(edge_cost(s, a, snap.model, snap.context) == kInf);
                        if (mode == CostMode::Cmax)
                            CHECK(cmax_penalty(lat.config(s), Action::from_code(a), *snap.context.disc) == kInf);
                        ++checked;
                    }
                };
                run_episode(sc, seed, sweeps, &hooks);
            }
        }
        CHECK(checked > 0);
    }
}
