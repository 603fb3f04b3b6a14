// Randomized ground-truth scenes for the pipe-cabinet and shelf domains.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "contactnav/grid.hpp"

namespace contactnav {

class InfeasibleScene : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Domain { Pipe, Shelf };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct SceneParams {
    Domain domain = Domain::Pipe;
    IntRange pipe_count{5, 12};
    IntRange partition_count{1, 4};
    IntRange object_count{6, 12};
    /// Pipe diameter in cells.
    int pipe_thickness = 2;
    /// Maximum pipe deviation from the spanning axis, degrees.
    double max_tilt_deg = 15.0;
    /// Axis every pipe spans end to end.
    int span_axis = 0;
    /// Cells that must stay free (typically start and goal footprints) ...
    CellSet keep_free;
    /// ... together with this many cells of margin around them.
    int clearance = 1;
    /// Placement attempts per obstacle before the scene is declared infeasible.
    int max_retries = 200;

    void validate() const;
};

/// Deterministic in (params, spec, seed). Pipe scenes contain N pipes drawn
/// from pipe_count, each a straight thick band touching both extreme slices
/// of the spanning axis. Shelf scenes contain full-width boards and objects
/// resting on the floor or a board. Every obstacle gets its own object id.
GroundTruthGrid generate_scene(const SceneParams& params, const GridSpec& spec, std::uint64_t seed);

}  // namespace contactnav
