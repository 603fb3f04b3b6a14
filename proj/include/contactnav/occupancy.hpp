// Belief over the workspace built from interaction history, plus occupancy
// predictors that extrapolate it into unexplored cells.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "contactnav/grid.hpp"

namespace contactnav {

class OutOfGrid : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ExternalPredictorFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CellState : std::uint8_t { Unknown = 0, KnownFree = 1, KnownOccupied = 2 };

/// Per-cell belief. KnownFree is terminal: free certification comes from
/// the robot's own body having occupied the cell.
class OccupancyEstimate {
public:
    OccupancyEstimate() = default;
    explicit OccupancyEstimate(GridSpec spec, float prior = 0.5F);

    [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] CellState state(CellIndex c) const noexcept { return static_cast<CellState>(state_[c]); }
    /// Probability carried by an Unknown cell (meaningless for known cells).
    [[nodiscard]] float unknown_p(CellIndex c) const noexcept { return p_[c]; }
    [[nodiscard]] bool known_free(CellIndex c) const noexcept { return state(c) == CellState::KnownFree; }
    /// 0 / 1 for known cells, p for unknown ones.
    [[nodiscard]] double value(CellIndex c) const noexcept;

    /// Marks cells KnownFree. Returns how many of them had been KnownOccupied
    /// (conflicting evidence, resolved in favour of free).
    std::size_t certify_free(const CellSet& cells);
    /// Marks the cell KnownOccupied unless it is KnownFree.
    void mark_occupied(CellIndex c);
    /// Contact evidence at a world point: the containing cell becomes
    /// KnownOccupied (unless KnownFree) and Unknown cells within
    /// `spread_radius` (Chebyshev) get p = max(p, 0.9 * confidence).
    void mark_contact(const Vec2& point, double confidence, int spread_radius = 1);
    /// Raw state/probability write, used by deserialization.
    void set(CellIndex c, CellState s, float p);

    [[nodiscard]] CellSet known_free_cells() const;
    [[nodiscard]] CellSet known_occupied_cells() const;
    [[nodiscard]] const std::vector<std::uint8_t>& states() const noexcept { return state_; }
    [[nodiscard]] const std::vector<float>& probabilities() const noexcept { return p_; }

    bool operator==(const OccupancyEstimate&) const = default;

private:
    GridSpec spec_;
    std::vector<std::uint8_t> state_;
    std::vector<float> p_;
};

enum class PredictorKind { None, Structural, External };

std::string to_string(PredictorKind k);
PredictorKind predictor_kind_from_string(const std::string& s);

struct PredictorConfig {
    PredictorKind kind = PredictorKind::None;
    double decay = 0.95;
    std::vector<int> axes{0, 1};
    /// argv of the external predictor process.
    std::vector<std::string> external_cmd;
    int timeout_ms = 5000;
    double prob_floor = 0.0;
    double prob_ceiling = 1.0;

    void validate() const;
};

/// Dense probability grid in linear cell order.
struct Prediction {
    GridSpec spec;
    std::vector<double> p;

    [[nodiscard]] double operator[](CellIndex c) const noexcept { return p[static_cast<std::size_t>(c)]; }
};

/// Passthrough, structural extrapolation, or an external process. Known
/// cells are always forced to 0 / 1 in the output. External failures fall
/// back to passthrough with a warning on stderr.
Prediction predict(const OccupancyEstimate& est, const PredictorConfig& cfg);

Prediction predict_passthrough(const OccupancyEstimate& est);
Prediction predict_structural(const OccupancyEstimate& est, const PredictorConfig& cfg);

}  // namespace contactnav
