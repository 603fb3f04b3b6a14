#include "contactnav/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "contactnav/rng.hpp"

namespace contactnav {

std::string to_string(Domain d) { return d == Domain::Pipe ? "pipe" : "shelf"; }

Domain domain_from_string(const std::string& s) {
    if (s == "pipe") return Domain::Pipe;
    if (s == "shelf") return Domain::Shelf;
    throw std::invalid_argument("unknown domain '" + s + "' (expected pipe|shelf)");
}

void SceneParams::validate() const {
    for (const IntRange* r : {&pipe_count, &partition_count, &object_count})
        if (r->lo < 0 || r->lo > r->hi) throw std::invalid_argument("scene count range must satisfy 0 <= lo <= hi");
    if (pipe_thickness < 1) throw std::invalid_argument("pipe_thickness must be >= 1");
    if (max_tilt_deg < 0.0 || max_tilt_deg >= 90.0) throw std::invalid_argument("max_tilt_deg must be in [0, 90)");
    if (span_axis < 0 || span_axis >= kAxes) throw std::invalid_argument("span_axis out of range");
    if (clearance < 0 || max_retries < 1) throw std::invalid_argument("clearance/max_retries out of range");
}

namespace {

class SceneBuilder {
public:
    SceneBuilder(const SceneParams& params, const GridSpec& spec)
        : grid_(spec),
          blocked_(static_cast<std::size_t>(spec.cell_count()), 0) {
        for (CellIndex c : dilate(params.keep_free, spec, params.clearance)) blocked_[c] = 1;
    }

    [[nodiscard]] bool touches_keepout(const CellSet& cells) const {
        return std::any_of(cells.begin(), cells.end(), [&](CellIndex c) { return blocked_[c] != 0; });
    }

    [[nodiscard]] bool touches_obstacle(const CellSet& cells) const {
        return std::any_of(cells.begin(), cells.end(), [&](CellIndex c) { return grid_.occupied(c); });
    }

    void stamp(const CellSet& cells, std::int32_t label) {
        for (CellIndex c : cells)
            if (!grid_.occupied(c)) grid_.set_occupied(c, label);
    }

    GroundTruthGrid& grid() { return grid_; }

private:
    GroundTruthGrid grid_;
    std::vector<std::uint8_t> blocked_;
};

void build_pipes(const SceneParams& p, const GridSpec& spec, Rng& rng, SceneBuilder& b) {
    const int a = p.span_axis;
    const int perp = 1 - a;
    const double res = spec.resolution;
    const double u0 = spec.origin[a] + 0.5 * res;
    const double u1 = spec.origin[a] + (spec.dims[a] - 0.5) * res;
    const double vmin = spec.origin[perp] + 0.5 * res;
    const double vmax = spec.origin[perp] + (spec.dims[perp] - 0.5) * res;
    const double radius = 0.5 * p.pipe_thickness * res;
    const double max_tilt = p.max_tilt_deg * std::numbers::pi / 180.0;

    const int count = static_cast<int>(rng.uniform_int(p.pipe_count.lo, p.pipe_count.hi));
    for (int k = 0; k < count; ++k) {
        const std::int32_t label = k + 1;
        bool placed = false;
        for (int attempt = 0; attempt < p.max_retries && !placed; ++attempt) {
            const double tilt = rng.uniform(-max_tilt, max_tilt);
            const double rise = std::tan(tilt) * (u1 - u0);
            const double lo = std::max(vmin, vmin - rise);
            const double hi = std::min(vmax, vmax - rise);
            if (lo > hi) continue;
            const double v0 = rng.uniform(lo, hi);
            Vec2 e0, e1;
            e0[a] = u0;
            e0[perp] = v0;
            e1[a] = u1;
            e1[perp] = v0 + rise;
            const CellSet cells = rasterize_capsule(e0, e1, radius, spec);
            if (b.touches_keepout(cells)) continue;
            // First writer keeps a shared cell; the new pipe still needs a cell
            // of its own in both extreme slices.
            bool first = false, last = false;
            for (CellIndex c : cells) {
                if (b.grid().occupied(c)) continue;
                const int u = spec.coord(c)[a];
                first |= u == 0;
                last |= u == spec.dims[a] - 1;
            }
            if (!first || !last) continue;
            b.stamp(cells, label);
            placed = true;
        }
        if (!placed) throw InfeasibleScene("could not place pipe " + std::to_string(label) + " clear of keep-free cells");
    }
}

void build_shelf(const SceneParams& p, const GridSpec& spec, Rng& rng, SceneBuilder& b) {
    const int nx = spec.dims[0];
    const int ny = spec.dims[1];
    std::int32_t label = 0;
    std::vector<int> support_rows{-1};  // -1: the floor below row 0

    const int boards = static_cast<int>(rng.uniform_int(p.partition_count.lo, p.partition_count.hi));
    for (int k = 0; k < boards; ++k) {
        ++label;
        bool placed = false;
        for (int attempt = 0; attempt < p.max_retries && !placed; ++attempt) {
            const int row = static_cast<int>(rng.uniform_int(2, std::max(2, ny - 3)));
            if (row >= ny) continue;
            bool crowded = false;
            for (int r : support_rows) crowded |= std::abs(r - row) < 3;
            if (crowded) continue;
            std::vector<CellIndex> cells;
            for (int i = 0; i < nx; ++i) cells.push_back(spec.index({i, row}));
            const CellSet board(std::move(cells));
            if (b.touches_keepout(board) || b.touches_obstacle(board)) continue;
            b.stamp(board, label);
            support_rows.push_back(row);
            placed = true;
        }
        if (!placed) throw InfeasibleScene("could not place shelf partition clear of keep-free cells");
    }

    const int objects = static_cast<int>(rng.uniform_int(p.object_count.lo, p.object_count.hi));
    for (int k = 0; k < objects; ++k) {
        ++label;
        bool placed = false;
        for (int attempt = 0; attempt < p.max_retries && !placed; ++attempt) {
            const int support = support_rows[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(support_rows.size()) - 1))];
            const int bottom = support + 1;
            std::vector<CellIndex> cells;
            if (rng.uniform() < 0.5) {
                const int w = static_cast<int>(rng.uniform_int(2, 5));
                const int h = static_cast<int>(rng.uniform_int(2, 6));
                const int x0 = static_cast<int>(rng.uniform_int(0, std::max(0, nx - w)));
                for (int j = bottom; j < bottom + h; ++j)
                    for (int i = x0; i < x0 + w; ++i)
                        if (spec.in_bounds({i, j})) cells.push_back(spec.index({i, j}));
            } else {
                const double r = rng.uniform(1.0, 2.5);
                const double cx = rng.uniform(r, std::max(r, nx - r));
                const double cy = bottom + r - 0.5;
                for (int j = bottom; j <= static_cast<int>(std::ceil(cy + r)); ++j)
                    for (int i = static_cast<int>(std::floor(cx - r)); i <= static_cast<int>(std::ceil(cx + r)); ++i)
                        if (spec.in_bounds({i, j}) && std::hypot(i + 0.5 - cx, j + 0.5 - cy) <= r)
                            cells.push_back(spec.index({i, j}));
            }
            const CellSet obj(std::move(cells));
            if (obj.empty() || b.touches_keepout(obj) || b.touches_obstacle(obj)) continue;
            b.stamp(obj, label);
            placed = true;
        }
        if (!placed) throw InfeasibleScene("could not place shelf object clear of keep-free cells");
    }
}

}  // namespace

GroundTruthGrid generate_scene(const SceneParams& params, const GridSpec& spec, std::uint64_t seed) {
    spec.validate();
    params.validate();
    Rng rng(seed, mix64(0x5ce7e));
    SceneBuilder builder(params, spec);
    if (params.domain == Domain::Pipe)
        build_pipes(params, spec, rng, builder);
    else
        build_shelf(params, spec, rng, builder);
    return builder.grid();
}

}  // namespace contactnav
