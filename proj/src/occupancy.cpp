#include "contactnav/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "contactnav/external_predictor.hpp"

namespace contactnav {

OccupancyEstimate::OccupancyEstimate(GridSpec spec, float prior)
    : spec_(spec),
      state_(static_cast<std::size_t>(spec.cell_count()), static_cast<std::uint8_t>(CellState::Unknown)),
      p_(static_cast<std::size_t>(spec.cell_count()), prior) {
    spec_.validate();
    if (!(prior >= 0.0F && prior <= 1.0F)) throw std::invalid_argument("prior must be in [0, 1]");
}

double OccupancyEstimate::value(CellIndex c) const noexcept {
    switch (state(c)) {
        case CellState::KnownFree: return 0.0;
        case CellState::KnownOccupied: return 1.0;
        case CellState::Unknown: break;
    }
    return p_[static_cast<std::size_t>(c)];
}

std::size_t OccupancyEstimate::certify_free(const CellSet& cells) {
    std::size_t conflicts = 0;
    for (CellIndex c : cells) {
        if (state(c) == CellState::KnownOccupied) ++conflicts;
        state_[c] = static_cast<std::uint8_t>(CellState::KnownFree);
    }
    return conflicts;
}

void OccupancyEstimate::mark_occupied(CellIndex c) {
    if (state(c) != CellState::KnownFree) state_[c] = static_cast<std::uint8_t>(CellState::KnownOccupied);
}

void OccupancyEstimate::mark_contact(const Vec2& point, double confidence, int spread_radius) {
    const CellCoord cc = spec_.locate(point);
    if (!spec_.in_bounds(cc)) throw OutOfGrid("contact point lies outside the grid");
    if (spread_radius < 0) throw std::invalid_argument("spread_radius must be >= 0");
    const auto ring = static_cast<float>(0.9 * std::clamp(confidence, 0.0, 1.0));
    for (int dj = -spread_radius; dj <= spread_radius; ++dj) {
        for (int di = -spread_radius; di <= spread_radius; ++di) {
            const CellCoord n{cc[0] + di, cc[1] + dj};
            if (!spec_.in_bounds(n)) continue;
            const CellIndex c = spec_.index(n);
            if (state(c) == CellState::Unknown) p_[c] = std::max(p_[c], ring);
        }
    }
    mark_occupied(spec_.index(cc));
}

void OccupancyEstimate::set(CellIndex c, CellState s, float p) {
    state_[c] = static_cast<std::uint8_t>(s);
    p_[c] = p;
}

CellSet OccupancyEstimate::known_free_cells() const {
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < spec_.cell_count(); ++c)
        if (state(c) == CellState::KnownFree) out.push_back(c);
    return CellSet::from_sorted(std::move(out));
}

CellSet OccupancyEstimate::known_occupied_cells() const {
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < spec_.cell_count(); ++c)
        if (state(c) == CellState::KnownOccupied) out.push_back(c);
    return CellSet::from_sorted(std::move(out));
}

std::string to_string(PredictorKind k) {
    switch (k) {
        case PredictorKind::None: return "none";
        case PredictorKind::Structural: return "structural";
        case PredictorKind::External: return "external";
    }
    return "none";
}

PredictorKind predictor_kind_from_string(const std::string& s) {
    if (s == "none") return PredictorKind::None;
    if (s == "structural") return PredictorKind::Structural;
    if (s == "external") return PredictorKind::External;
    throw std::invalid_argument("unknown predictor kind '" + s + "' (expected none|structural|external)");
}

void PredictorConfig::validate() const {
    if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("decay must be in (0, 1]");
    if (!(prob_floor >= 0.0 && prob_floor <= prob_ceiling && prob_ceiling <= 1.0))
        throw std::invalid_argument("need 0 <= prob_floor <= prob_ceiling <= 1");
    for (int a : axes)
        if (a < 0 || a >= kAxes) throw std::invalid_argument("predictor axis out of range");
    if (kind == PredictorKind::External && external_cmd.empty())
        throw std::invalid_argument("external predictor needs external_cmd");
    if (timeout_ms < 1) throw std::invalid_argument("timeout_ms must be >= 1");
}

namespace {

void force_observed(const OccupancyEstimate& est, Prediction& out) {
    for (CellIndex c = 0; c < est.spec().cell_count(); ++c) {
        const CellState s = est.state(c);
        if (s == CellState::KnownFree) out.p[c] = 0.0;
        if (s == CellState::KnownOccupied) out.p[c] = 1.0;
    }
}

}  // namespace

Prediction predict_passthrough(const OccupancyEstimate& est) {
    Prediction out{est.spec(), std::vector<double>(static_cast<std::size_t>(est.spec().cell_count()))};
    for (CellIndex c = 0; c < est.spec().cell_count(); ++c) out.p[c] = est.value(c);
    return out;
}

Prediction predict_structural(const OccupancyEstimate& est, const PredictorConfig& cfg) {
    Prediction out = predict_passthrough(est);
    const GridSpec& spec = est.spec();
    for (CellIndex c = 0; c < spec.cell_count(); ++c) {
        if (est.state(c) != CellState::KnownOccupied) continue;
        const CellCoord origin = spec.coord(c);
        for (int axis : cfg.axes) {
            for (int dir : {-1, 1}) {
                CellCoord cur = origin;
                double p = 1.0;
                for (;;) {
                    cur[axis] += dir;
                    if (!spec.in_bounds(cur)) break;
                    const CellIndex n = spec.index(cur);
                    const CellState s = est.state(n);
                    if (s == CellState::KnownFree) break;
                    p *= cfg.decay;
                    if (s == CellState::Unknown) out.p[n] = std::max(out.p[n], p);
                }
            }
        }
    }
    for (CellIndex c = 0; c < spec.cell_count(); ++c)
        if (est.state(c) == CellState::Unknown) out.p[c] = std::clamp(out.p[c], cfg.prob_floor, cfg.prob_ceiling);
    force_observed(est, out);
    return out;
}

Prediction predict(const OccupancyEstimate& est, const PredictorConfig& cfg) {
    switch (cfg.kind) {
        case PredictorKind::None: {
            Prediction out = predict_passthrough(est);
            return out;
        }
        case PredictorKind::Structural: return predict_structural(est, cfg);
        case PredictorKind::External: {
            try {
                Prediction out{est.spec(), run_external_predictor(est, cfg.external_cmd, cfg.timeout_ms)};
                for (double& v : out.p) v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.5;
                force_observed(est, out);
                return out;
            } catch (const ExternalPredictorFailure& e) {
                std::cerr << "warning: external predictor failed (" << e.what() << "); using passthrough\n";
                return predict_passthrough(est);
            }
        }
    }
    return predict_passthrough(est);
}

}  // namespace contactnav
