#include "contactnav/grid.hpp"

#include <algorithm>
#include <cmath>

namespace contactnav {

void GridSpec::validate() const {
    for (int a = 0; a < kAxes; ++a)
        if (dims[a] < 1) throw GeometryError("grid dims must be >= 1");
    if (!(resolution > 0.0)) throw GeometryError("grid resolution must be > 0");
}

CellCoord GridSpec::locate(const Vec2& p) const noexcept {
    CellCoord c;
    for (int a = 0; a < kAxes; ++a)
        c[a] = static_cast<int>(std::floor((p[a] - origin[a]) / resolution));
    return c;
}

CellSet::CellSet(std::vector<CellIndex> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

CellSet CellSet::from_sorted(std::vector<CellIndex> cells) {
    CellSet s;
    s.cells_ = std::move(cells);
    return s;
}

bool CellSet::contains(CellIndex c) const noexcept {
    return std::binary_search(cells_.begin(), cells_.end(), c);
}

CellSet CellSet::united(const CellSet& other) const {
    std::vector<CellIndex> out;
    out.reserve(cells_.size() + other.cells_.size());
    std::set_union(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                   std::back_inserter(out));
    return from_sorted(std::move(out));
}

CellSet CellSet::minus(const CellSet& other) const {
    std::vector<CellIndex> out;
    out.reserve(cells_.size());
    std::set_difference(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                        std::back_inserter(out));
    return from_sorted(std::move(out));
}

CellSet CellSet::intersected(const CellSet& other) const {
    std::vector<CellIndex> out;
    std::set_intersection(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                          std::back_inserter(out));
    return from_sorted(std::move(out));
}

std::size_t CellSet::intersection_size(const CellSet& other) const noexcept {
    std::size_t n = 0;
    auto a = cells_.begin();
    auto b = other.cells_.begin();
    while (a != cells_.end() && b != other.cells_.end()) {
        if (*a < *b) {
            ++a;
        } else if (*b < *a) {
            ++b;
        } else {
            ++n;
            ++a;
            ++b;
        }
    }
    return n;
}

bool CellSet::subset_of(const CellSet& other) const noexcept {
    return std::includes(other.cells_.begin(), other.cells_.end(), cells_.begin(), cells_.end());
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) noexcept {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

CellSet rasterize_capsule(const Vec2& p0, const Vec2& p1, double radius, const GridSpec& spec) {
    const Vec2 lo = p0.cwiseMin(p1).array() - radius;
    const Vec2 hi = p0.cwiseMax(p1).array() + radius;
    // Cell i has its center at origin + (i + 0.5) * res; the box is rounded
    // outward so ties at exactly `radius` are decided by the distance test.
    int imin[kAxes], imax[kAxes];
    for (int a = 0; a < kAxes; ++a) {
        imin[a] = std::max(0, static_cast<int>(std::floor((lo[a] - spec.origin[a]) / spec.resolution - 0.5)));
        imax[a] = std::min(spec.dims[a] - 1,
                           static_cast<int>(std::ceil((hi[a] - spec.origin[a]) / spec.resolution - 0.5)));
        if (imin[a] > imax[a]) return {};
    }
    std::vector<CellIndex> out;
    for (int j = imin[1]; j <= imax[1]; ++j) {
        for (int i = imin[0]; i <= imax[0]; ++i) {
            const CellCoord c{i, j};
            if (point_segment_distance(spec.center(c), p0, p1) <= radius) out.push_back(spec.index(c));
        }
    }
    return CellSet::from_sorted(std::move(out));
}

CellSet dilate(const CellSet& cells, const GridSpec& spec) {
    std::vector<CellIndex> out;
    out.reserve(cells.size() * 3);
    for (CellIndex c : cells) {
        const CellCoord cc = spec.coord(c);
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const CellCoord n{cc[0] + di, cc[1] + dj};
                if (spec.in_bounds(n)) out.push_back(spec.index(n));
            }
        }
    }
    return CellSet(std::move(out));
}

CellSet dilate(const CellSet& cells, const GridSpec& spec, int steps) {
    CellSet out = cells;
    for (int i = 0; i < steps; ++i) out = dilate(out, spec);
    return out;
}

GridSpec padded(const GridSpec& spec, int margin) {
    GridSpec p = spec;
    for (int a = 0; a < kAxes; ++a) {
        p.dims[a] += 2 * margin;
        p.origin[a] -= margin * spec.resolution;
    }
    return p;
}

CellSet unpad(const CellSet& cells, const GridSpec& spec, int margin) {
    const GridSpec p = padded(spec, margin);
    std::vector<CellIndex> out;
    for (CellIndex c : cells) {
        CellCoord cc = p.coord(c);
        for (int a = 0; a < kAxes; ++a) cc[a] -= margin;
        if (spec.in_bounds(cc)) out.push_back(spec.index(cc));
    }
    return CellSet::from_sorted(std::move(out));
}

GroundTruthGrid::GroundTruthGrid(GridSpec spec)
    : spec_(spec),
      occ_(static_cast<std::size_t>(spec.cell_count()), 0),
      labels_(static_cast<std::size_t>(spec.cell_count()), 0) {
    spec_.validate();
}

CellSet GroundTruthGrid::occupied_cells() const {
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < spec_.cell_count(); ++c)
        if (occ_[c]) out.push_back(c);
    return CellSet::from_sorted(std::move(out));
}

std::size_t GroundTruthGrid::occupied_count() const noexcept {
    return static_cast<std::size_t>(std::count(occ_.begin(), occ_.end(), std::uint8_t{1}));
}

bool GroundTruthGrid::intersects(const CellSet& cells) const noexcept {
    return first_hit(cells) >= 0;
}

CellIndex GroundTruthGrid::first_hit(const CellSet& cells) const noexcept {
    for (CellIndex c : cells)
        if (occ_[c]) return c;
    return -1;
}

std::vector<std::int32_t> GroundTruthGrid::object_ids() const {
    std::vector<std::int32_t> ids;
    for (std::int32_t l : labels_)
        if (l != 0) ids.push_back(l);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

CellSet GroundTruthGrid::cells_of(std::int32_t object) const {
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < spec_.cell_count(); ++c)
        if (labels_[c] == object) out.push_back(c);
    return CellSet::from_sorted(std::move(out));
}

void GroundTruthGrid::set_occupied(CellIndex c, std::int32_t label) {
    occ_[c] = 1;
    if (label != 0) labels_[c] = label;
}

void GroundTruthGrid::clear(CellIndex c) {
    occ_[c] = 0;
    labels_[c] = 0;
}

void GroundTruthGrid::clear(const CellSet& cells) {
    for (CellIndex c : cells) clear(c);
}

}  // namespace contactnav
