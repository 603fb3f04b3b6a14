#include "contactnav/grid_io.hpp"

#include <fstream>
#include <iterator>

namespace contactnav {

namespace {

constexpr const char* kGridFormat = "contactnav-grid";
constexpr const char* kEstimateFormat = "contactnav-estimate";

void put_header(Bytes& out, const nlohmann::json& h) {
    const std::string s = h.dump();
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

nlohmann::json get_header(std::span<const std::uint8_t> in, std::size_t& off) {
    const std::uint32_t n = get_u32(in, off);
    off += 4;
    if (off + n > in.size()) throw ProtocolError("truncated header");
    try {
        auto j = nlohmann::json::parse(in.begin() + static_cast<std::ptrdiff_t>(off),
                                       in.begin() + static_cast<std::ptrdiff_t>(off + n));
        off += n;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("bad header: ") + e.what());
    }
}

// (value, length) runs over a per-cell sequence.
template <class F>
void put_value_runs(Bytes& out, CellIndex n, F value) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> runs;
    for (CellIndex c = 0; c < n; ++c) {
        const auto v = static_cast<std::uint32_t>(value(c));
        if (!runs.empty() && runs.back().first == v)
            ++runs.back().second;
        else
            runs.emplace_back(v, 1);
    }
    put_u32(out, static_cast<std::uint32_t>(runs.size()));
    for (auto [v, len] : runs) {
        put_u32(out, v);
        put_u32(out, len);
    }
}

template <class F>
void get_value_runs(std::span<const std::uint8_t> in, std::size_t& off, CellIndex n, F sink) {
    const std::uint32_t count = get_u32(in, off);
    off += 4;
    CellIndex c = 0;
    for (std::uint32_t r = 0; r < count; ++r) {
        const std::uint32_t v = get_u32(in, off);
        const std::uint32_t len = get_u32(in, off + 4);
        off += 8;
        if (len == 0 || static_cast<std::int64_t>(c) + len > n) throw ProtocolError("run lengths do not cover the grid");
        for (std::uint32_t k = 0; k < len; ++k) sink(c++, v);
    }
    if (c != n) throw ProtocolError("run lengths do not cover the grid");
}

}  // namespace

Bytes encode_grid(const GroundTruthGrid& grid, const std::string& domain, std::uint64_t seed) {
    const GridSpec& spec = grid.spec();
    nlohmann::json h = spec_to_json(spec);
    h["format"] = kGridFormat;
    h["version"] = 1;
    h["domain"] = domain;
    h["seed"] = seed;
    Bytes out;
    put_header(out, h);

    // Occupancy: alternating run lengths, the first run counting free cells.
    std::vector<std::uint32_t> runs;
    bool cur = false;
    std::uint32_t len = 0;
    for (CellIndex c = 0; c < spec.cell_count(); ++c) {
        if (grid.occupied(c) != cur) {
            runs.push_back(len);
            cur = !cur;
            len = 0;
        }
        ++len;
    }
    runs.push_back(len);
    put_u32(out, static_cast<std::uint32_t>(runs.size()));
    for (std::uint32_t r : runs) put_u32(out, r);

    put_value_runs(out, spec.cell_count(), [&](CellIndex c) { return grid.object_id(c); });
    return out;
}

StoredGrid decode_grid(std::span<const std::uint8_t> in) {
    std::size_t off = 0;
    const nlohmann::json h = get_header(in, off);
    if (h.value("format", "") != kGridFormat) throw ProtocolError("not a grid file");
    StoredGrid out;
    out.grid = GroundTruthGrid(spec_from_json(h));
    out.domain = h.at("domain").get<std::string>();
    out.seed = h.at("seed").get<std::uint64_t>();
    const CellIndex n = out.grid.spec().cell_count();

    const std::uint32_t count = get_u32(in, off);
    off += 4;
    CellIndex c = 0;
    for (std::uint32_t r = 0; r < count; ++r) {
        const std::uint32_t len = get_u32(in, off);
        off += 4;
        if (static_cast<std::int64_t>(c) + len > n) throw ProtocolError("occupancy runs overflow the grid");
        const bool occ = (r % 2) == 1;
        for (std::uint32_t k = 0; k < len; ++k, ++c)
            if (occ) out.grid.set_occupied(c, 0);
    }
    if (c != n) throw ProtocolError("occupancy runs do not cover the grid");

    get_value_runs(in, off, n, [&](CellIndex cell, std::uint32_t v) {
        if (v == 0) return;
        if (!out.grid.occupied(cell)) throw ProtocolError("object id on a free cell");
        out.grid.set_occupied(cell, static_cast<std::int32_t>(v));
    });
    if (off != in.size()) throw ProtocolError("trailing bytes after grid payload");
    return out;
}

Bytes encode_estimate(const OccupancyEstimate& est) {
    const GridSpec& spec = est.spec();
    nlohmann::json h = spec_to_json(spec);
    h["format"] = kEstimateFormat;
    h["version"] = 1;
    Bytes out;
    put_header(out, h);
    put_value_runs(out, spec.cell_count(), [&](CellIndex c) { return static_cast<std::uint32_t>(est.state(c)); });
    std::uint32_t unknown = 0;
    for (CellIndex c = 0; c < spec.cell_count(); ++c) unknown += est.state(c) == CellState::Unknown ? 1U : 0U;
    put_u32(out, unknown);
    for (CellIndex c = 0; c < spec.cell_count(); ++c)
        if (est.state(c) == CellState::Unknown) put_f32(out, est.unknown_p(c));
    return out;
}

OccupancyEstimate decode_estimate(std::span<const std::uint8_t> in) {
    std::size_t off = 0;
    const nlohmann::json h = get_header(in, off);
    if (h.value("format", "") != kEstimateFormat) throw ProtocolError("not an estimate snapshot");
    OccupancyEstimate est(spec_from_json(h));
    const CellIndex n = est.spec().cell_count();
    get_value_runs(in, off, n, [&](CellIndex c, std::uint32_t v) {
        if (v > 2) throw ProtocolError("bad cell state code");
        est.set(c, static_cast<CellState>(v), 0.5F);
    });
    const std::uint32_t unknown = get_u32(in, off);
    off += 4;
    std::uint32_t seen = 0;
    for (CellIndex c = 0; c < n; ++c) {
        if (est.state(c) != CellState::Unknown) continue;
        if (seen++ >= unknown) throw ProtocolError("unknown-cell count mismatch");
        est.set(c, CellState::Unknown, get_f32(in, off));
        off += 4;
    }
    if (seen != unknown || off != in.size()) throw ProtocolError("unknown-cell count mismatch");
    return est;
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace contactnav
