#include "contactnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace contactnav {

void DiscrepancySet::add(const Config& s, const Action& a) {
    if (!contains(s, a)) entries.push_back({s, a});
}

bool DiscrepancySet::contains(const Config& s, const Action& a) const {
    return std::any_of(entries.begin(), entries.end(), [&](const Discrepancy& d) { return d.state == s && d.action == a; });
}

std::string to_string(CostMode m) {
    switch (m) {
        case CostMode::Chs: return "chs";
        case CostMode::Cmax: return "cmax";
        case CostMode::EstimateOnly: return "estimate_only";
    }
    return "chs";
}

CostMode cost_mode_from_string(const std::string& s) {
    if (s == "chs") return CostMode::Chs;
    if (s == "cmax") return CostMode::Cmax;
    if (s == "estimate_only") return CostMode::EstimateOnly;
    throw std::invalid_argument("unknown cost mode '" + s + "' (expected chs|cmax|estimate_only)");
}

void CostModel::validate() const {
    if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("alpha and beta must be >= 0");
    if (heuristic_weight < 1.0) throw std::invalid_argument("heuristic_weight must be >= 1");
    if (expansion_budget < 1) throw std::invalid_argument("expansion_budget must be >= 1");
    if (!(delta > 0.0) || zeta < 0.0) throw std::invalid_argument("need delta > 0 and zeta >= 0");
    if (prune_threshold < 0.0 || prune_threshold > 1.0) throw std::invalid_argument("prune_threshold must be in [0, 1]");
}

std::string to_string(PlanStatus s) {
    switch (s) {
        case PlanStatus::Path: return "path";
        case PlanStatus::Infeasible: return "infeasible";
        case PlanStatus::BudgetExhausted: return "budget_exhausted";
    }
    return "infeasible";
}

ChsSet chs_from_collision(const ArmModel& arm, const VecX& q_col, const OccupancyEstimate& est) {
    const GridSpec& spec = est.spec();
    const GridSpec pad = padded(spec, 1);
    CellSet body = robot_cells(arm, q_col, pad);
    if (body.empty()) {
        // Links thinner than half a cell can slip between cell centers. Use
        // every cell the capsules touch instead so the ring is never empty.
        ArmModel fat = arm;
        fat.link_radius = std::max(arm.link_radius, pad.resolution * std::numbers::sqrt2 / 2.0);
        body = robot_cells(fat, q_col, pad);
    }
    const CellSet ring = unpad(dilate(body, pad).minus(body), spec, 1);
    std::vector<CellIndex> kept;
    for (CellIndex c : ring)
        if (!est.known_free(c)) kept.push_back(c);
    ChsSet out;
    out.cells = kept.empty() ? ring : CellSet::from_sorted(std::move(kept));
    return out;
}

double edge_validity(const CellSet& swept, const std::vector<ChsSet>& chs) {
    double p = 1.0;
    for (const auto& k : chs) {
        if (k.cells.empty()) continue;
        const std::size_t hit = swept.intersection_size(k.cells);
        if (hit == k.cells.size()) return 0.0;
        p *= 1.0 - static_cast<double>(hit) / static_cast<double>(k.cells.size());
    }
    return p;
}

double lattice_distance(const Config& a, const Config& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        const double d = a.steps[i] - b.steps[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double cmax_penalty(const Config& s, const Action& a, const DiscrepancySet& disc) {
    double pen = 0.0;
    for (const auto& e : disc.entries) {
        if (!(e.action == a)) continue;
        const double d = lattice_distance(s, e.state);
        if (d == 0.0) return kInf;
        if (d < disc.delta) pen = std::max(pen, disc.zeta / d);
    }
    return pen;
}

double occupancy_cost(const CellSet& swept, const OccupancyEstimate& est, const Prediction& pred) {
    if (swept.empty()) return 0.0;
    double s = 0.0;
    for (CellIndex c : swept)
        if (!est.known_free(c)) s += pred[c];
    return s / static_cast<double>(swept.size());
}

double edge_cost(StateIndex s, int action, const CostModel& model, const PlanContext& ctx) {
    if (ctx.invalid && ctx.invalid->contains(s, action)) return kInf;
    const CellSet& swept = ctx.sweeps->swept(s, action);
    const auto occ = [&] {
        return model.beta > 0.0 && ctx.estimate && ctx.prediction ? model.beta * occupancy_cost(swept, *ctx.estimate, *ctx.prediction)
                                                                  : 0.0;
    };
    switch (model.mode) {
        case CostMode::Chs: {
            const double p = ctx.chs ? edge_validity(swept, *ctx.chs) : 1.0;
            if (p <= 0.0) return kInf;
            return 1.0 + model.alpha * (1.0 / p - 1.0) + occ();
        }
        case CostMode::Cmax: {
            const double pen =
                ctx.disc ? cmax_penalty(ctx.sweeps->lattice().config(s), Action::from_code(action), *ctx.disc) : 0.0;
            if (!std::isfinite(pen)) return kInf;
            return 1.0 + pen + occ();
        }
        case CostMode::EstimateOnly: {
            if (ctx.prediction)
                for (CellIndex c : swept)
                    if ((*ctx.prediction)[c] > model.prune_threshold) return kInf;
            return 1.0 + occ();
        }
    }
    return kInf;
}

namespace {

struct OpenEntry {
    double f;
    double g;
    StateIndex s;
};

struct OpenOrder {
    // priority_queue pops the largest, so "greater" means "worse".
    bool operator()(const OpenEntry& a, const OpenEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g > b.g;
        return a.s > b.s;
    }
};

}  // namespace

PlanResult plan(const Config& start, const Config& goal, const CostModel& model, const PlanContext& ctx) {
    model.validate();
    if (!ctx.sweeps) throw std::invalid_argument("plan context needs a sweep table");
    const Lattice& lat = ctx.sweeps->lattice();
    if (!valid_config(ctx.sweeps->arm(), start) || !valid_config(ctx.sweeps->arm(), goal))
        throw std::invalid_argument("start/goal outside the lattice");
    PlanResult out;
    if (start == goal) {
        out.status = PlanStatus::Path;
        out.path = {start};
        return out;
    }
    const StateIndex s0 = lat.index(start);
    const StateIndex sg = lat.index(goal);
    const auto n = static_cast<std::size_t>(lat.size());
    std::vector<double> g(n, kInf);
    std::vector<StateIndex> parent(n, -1);
    std::vector<char> closed(n, 0);
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
    const auto h = [&](StateIndex s) { return lattice_distance(lat.config(s), goal); };

    g[static_cast<std::size_t>(s0)] = 0.0;
    open.push({model.heuristic_weight * h(s0), 0.0, s0});
    while (!open.empty()) {
        const OpenEntry top = open.top();
        open.pop();
        const auto us = static_cast<std::size_t>(top.s);
        if (closed[us] || top.g > g[us]) continue;
        if (top.s == sg) {
            out.status = PlanStatus::Path;
            out.cost = g[us];
            for (StateIndex s = sg; s >= 0; s = parent[static_cast<std::size_t>(s)]) out.path.push_back(lat.config(s));
            std::reverse(out.path.begin(), out.path.end());
            return out;
        }
        if (out.expansions >= model.expansion_budget) {
            out.status = PlanStatus::BudgetExhausted;
            return out;
        }
        closed[us] = 1;
        ++out.expansions;
        for (int a = 0; a < lat.actions(); ++a) {
            const StateIndex t = lat.neighbor(top.s, a);
            if (t < 0 || closed[static_cast<std::size_t>(t)]) continue;
            const double c = edge_cost(top.s, a, model, ctx);
            if (!std::isfinite(c)) continue;
            const double ng = top.g + c;
            if (ng < g[static_cast<std::size_t>(t)]) {
                g[static_cast<std::size_t>(t)] = ng;
                parent[static_cast<std::size_t>(t)] = top.s;
                open.push({ng + model.heuristic_weight * h(t), ng, t});
            }
        }
    }
    out.status = PlanStatus::Infeasible;
    return out;
}

void prune_chs(std::vector<ChsSet>& chs, const CellSet& newly_free, OccupancyEstimate& est) {
    for (auto& k : chs) {
        if (k.cells.empty()) continue;
        if (!newly_free.empty()) {
            CellSet rest = k.cells.minus(newly_free);
            if (rest.empty()) {
                // Cannot happen for a sound hypothesis; keep the smallest
                // remaining witness rather than emptying the set.
                rest = CellSet::from_sorted({k.cells[0]});
            }
            k.cells = std::move(rest);
        }
        if (k.cells.size() == 1) est.mark_occupied(k.cells[0]);
    }
}

}  // namespace contactnav
