// Discretized workspace: grid geometry, cell sets and ground-truth occupancy.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace contactnav {

/// Number of workspace axes. The reference configuration is planar; the
/// cell-set algorithms below iterate over kAxes rather than hard-coding x/y.
inline constexpr int kAxes = 2;

using Vec2 = Eigen::Vector2d;
using CellIndex = std::int32_t;
using CellCoord = std::array<int, kAxes>;

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Axis-aligned grid. Cell (i, j) covers
/// [origin + (i, j) * resolution, origin + (i + 1, j + 1) * resolution) and is
/// stored at linear index i + dims[0] * j (row-major, rows along axis 1).
struct GridSpec {
    CellCoord dims{1, 1};
    double resolution = 1.0;
    Vec2 origin = Vec2::Zero();

    void validate() const;

    [[nodiscard]] CellIndex cell_count() const noexcept { return dims[0] * dims[1]; }
    [[nodiscard]] bool in_bounds(const CellCoord& c) const noexcept {
        for (int a = 0; a < kAxes; ++a)
            if (c[a] < 0 || c[a] >= dims[a]) return false;
        return true;
    }
    [[nodiscard]] CellIndex index(const CellCoord& c) const noexcept { return c[0] + dims[0] * c[1]; }
    [[nodiscard]] CellCoord coord(CellIndex i) const noexcept { return {i % dims[0], i / dims[0]}; }
    [[nodiscard]] Vec2 center(const CellCoord& c) const noexcept {
        return origin + resolution * Vec2(c[0] + 0.5, c[1] + 0.5);
    }
    [[nodiscard]] Vec2 center(CellIndex i) const noexcept { return center(coord(i)); }
    /// Cell containing a world point (may be out of bounds).
    [[nodiscard]] CellCoord locate(const Vec2& p) const noexcept;

    bool operator==(const GridSpec&) const = default;
};

/// Sorted, duplicate-free set of linear cell indices.
class CellSet {
public:
    CellSet() = default;
    /// Sorts and deduplicates.
    explicit CellSet(std::vector<CellIndex> cells);

    static CellSet from_sorted(std::vector<CellIndex> cells);

    [[nodiscard]] bool empty() const noexcept { return cells_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }
    [[nodiscard]] bool contains(CellIndex c) const noexcept;
    [[nodiscard]] auto begin() const noexcept { return cells_.begin(); }
    [[nodiscard]] auto end() const noexcept { return cells_.end(); }
    [[nodiscard]] CellIndex operator[](std::size_t i) const noexcept { return cells_[i]; }
    [[nodiscard]] std::span<const CellIndex> view() const noexcept { return cells_; }
    [[nodiscard]] const std::vector<CellIndex>& values() const noexcept { return cells_; }

    [[nodiscard]] CellSet united(const CellSet& other) const;
    [[nodiscard]] CellSet minus(const CellSet& other) const;
    [[nodiscard]] CellSet intersected(const CellSet& other) const;
    [[nodiscard]] std::size_t intersection_size(const CellSet& other) const noexcept;
    [[nodiscard]] bool subset_of(const CellSet& other) const noexcept;
    [[nodiscard]] bool disjoint(const CellSet& other) const noexcept { return intersection_size(other) == 0; }

    void unite(const CellSet& other) { *this = united(other); }

    bool operator==(const CellSet&) const = default;

private:
    std::vector<CellIndex> cells_;
};

/// Cells whose centers lie within `radius` of the segment [p0, p1]. Cells
/// outside the grid are dropped.
CellSet rasterize_capsule(const Vec2& p0, const Vec2& p1, double radius, const GridSpec& spec);

/// Distance from a point to the segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) noexcept;

/// Chebyshev-1 (8-neighbour in 2D) dilation, clipped to the grid.
CellSet dilate(const CellSet& cells, const GridSpec& spec);
/// Repeated dilation (`steps` times).
CellSet dilate(const CellSet& cells, const GridSpec& spec, int steps);

/// The grid grown by `margin` cells on every side, sharing cell centers with
/// the original.
GridSpec padded(const GridSpec& spec, int margin);
/// Maps cells of padded(spec, margin) back to spec, dropping the margin.
CellSet unpad(const CellSet& cells, const GridSpec& spec, int margin);

/// Binary ground-truth workspace with per-cell object labels (0 = unlabeled).
class GroundTruthGrid {
public:
    GroundTruthGrid() = default;
    explicit GroundTruthGrid(GridSpec spec);

    [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] bool occupied(CellIndex c) const noexcept { return occ_[c] != 0; }
    [[nodiscard]] std::int32_t object_id(CellIndex c) const noexcept { return labels_[c]; }
    [[nodiscard]] CellSet occupied_cells() const;
    [[nodiscard]] std::size_t occupied_count() const noexcept;
    [[nodiscard]] bool intersects(const CellSet& cells) const noexcept;
    /// First occupied cell of `cells` in index order, or -1.
    [[nodiscard]] CellIndex first_hit(const CellSet& cells) const noexcept;
    /// Distinct nonzero object labels, ascending.
    [[nodiscard]] std::vector<std::int32_t> object_ids() const;
    [[nodiscard]] CellSet cells_of(std::int32_t object) const;

    /// Marks a cell occupied; a nonzero label is recorded alongside.
    void set_occupied(CellIndex c, std::int32_t label = 0);
    void clear(CellIndex c);
    void clear(const CellSet& cells);

    [[nodiscard]] std::span<const std::uint8_t> occupancy_mask() const noexcept { return occ_; }
    [[nodiscard]] std::span<const std::int32_t> labels() const noexcept { return labels_; }

    bool operator==(const GroundTruthGrid&) const = default;

private:
    GridSpec spec_;
    std::vector<std::uint8_t> occ_;
    std::vector<std::int32_t> labels_;
};

}  // namespace contactnav
