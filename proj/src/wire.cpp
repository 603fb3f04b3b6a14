#include "contactnav/wire.hpp"

#include <bit>
#include <cstring>
#include <string>

namespace contactnav {

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
    if (offset + 4 > in.size()) throw ProtocolError("truncated u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

void put_f32(Bytes& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

float get_f32(std::span<const std::uint8_t> in, std::size_t offset) {
    return std::bit_cast<float>(get_u32(in, offset));
}

Bytes encode_frame(const Frame& f) {
    const std::string header = f.header.dump();
    Bytes out;
    out.reserve(8 + header.size() + f.payload.size());
    put_u32(out, static_cast<std::uint32_t>(4 + header.size() + f.payload.size()));
    put_u32(out, static_cast<std::uint32_t>(header.size()));
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

Frame decode_frame(std::span<const std::uint8_t> in, std::size_t& offset) {
    const std::uint32_t len = get_u32(in, offset);
    if (len < 4 || offset + 4 + len > in.size()) throw ProtocolError("frame length exceeds available bytes");
    const std::uint32_t hlen = get_u32(in, offset + 4);
    if (hlen > len - 4) throw ProtocolError("header length exceeds frame");
    const auto* h = in.data() + offset + 8;
    Frame f;
    try {
        f.header = nlohmann::json::parse(h, h + hlen);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("bad frame header: ") + e.what());
    }
    f.payload.assign(h + hlen, in.data() + offset + 4 + len);
    offset += 4 + len;
    return f;
}

std::vector<Frame> decode_frames(std::span<const std::uint8_t> in) {
    std::vector<Frame> out;
    std::size_t off = 0;
    while (off < in.size()) out.push_back(decode_frame(in, off));
    return out;
}

nlohmann::json spec_to_json(const GridSpec& spec) {
    return {{"dims", {spec.dims[0], spec.dims[1]}},
            {"resolution", spec.resolution},
            {"origin", {spec.origin.x(), spec.origin.y()}}};
}

GridSpec spec_from_json(const nlohmann::json& j) {
    GridSpec s;
    const auto& dims = j.at("dims");
    if (!dims.is_array() || dims.size() != kAxes) throw ProtocolError("dims must list one count per axis");
    for (int a = 0; a < kAxes; ++a) s.dims[a] = dims.at(static_cast<std::size_t>(a)).get<int>();
    s.resolution = j.at("resolution").get<double>();
    const auto& o = j.at("origin");
    s.origin = Vec2(o.at(0).get<double>(), o.at(1).get<double>());
    s.validate();
    return s;
}

Bytes encode_states(const OccupancyEstimate& est) {
    Bytes out(static_cast<std::size_t>(est.spec().cell_count()));
    for (CellIndex c = 0; c < est.spec().cell_count(); ++c) {
        switch (est.state(c)) {
            case CellState::KnownFree: out[c] = kCodeFree; break;
            case CellState::KnownOccupied: out[c] = kCodeOccupied; break;
            case CellState::Unknown: out[c] = kCodeUnknown; break;
        }
    }
    return out;
}

Frame make_predict_request(const OccupancyEstimate& est) {
    nlohmann::json h = spec_to_json(est.spec());
    h["type"] = "predict";
    h["encoding"] = "u8";
    return {h, encode_states(est)};
}

Frame make_predict_response(const GridSpec& spec, const std::vector<float>& p) {
    nlohmann::json h = spec_to_json(spec);
    h["type"] = "prediction";
    h["encoding"] = "f32le";
    Bytes payload;
    payload.reserve(p.size() * 4);
    for (float v : p) put_f32(payload, v);
    return {h, std::move(payload)};
}

std::vector<double> parse_predict_response(const Frame& f, const GridSpec& spec) {
    if (f.header.value("type", "") != "prediction") throw ProtocolError("response type must be 'prediction'");
    GridSpec got;
    try {
        got = spec_from_json(f.header);
    } catch (const std::exception& e) {
        throw ProtocolError(std::string("bad response grid: ") + e.what());
    }
    if (got.dims != spec.dims) throw ProtocolError("response dims do not match request");
    const auto n = static_cast<std::size_t>(spec.cell_count());
    if (f.payload.size() != 4 * n) throw ProtocolError("response payload size mismatch");
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = get_f32(f.payload, 4 * i);
    return p;
}

Frame encode_record(const DatasetRecord& r) {
    const auto n = static_cast<std::size_t>(r.spec.cell_count());
    if (r.input.size() != n || r.label.size() != n) throw std::invalid_argument("record grids must match spec dims");
    nlohmann::json h = spec_to_json(r.spec);
    h["type"] = "record";
    h["encoding"] = "u8";
    h["domain"] = r.domain;
    h["scene_seed"] = r.scene_seed;
    h["actions"] = r.actions;
    Frame f{h, r.input};
    f.payload.insert(f.payload.end(), r.label.begin(), r.label.end());
    return f;
}

DatasetRecord decode_record(const Frame& f) {
    if (f.header.value("type", "") != "record") throw ProtocolError("frame is not a dataset record");
    DatasetRecord r;
    r.spec = spec_from_json(f.header);
    r.domain = f.header.at("domain").get<std::string>();
    r.scene_seed = f.header.at("scene_seed").get<std::uint64_t>();
    r.actions = f.header.at("actions").get<int>();
    const auto n = static_cast<std::size_t>(r.spec.cell_count());
    if (f.payload.size() != 2 * n) throw ProtocolError("record payload size mismatch");
    r.input.assign(f.payload.begin(), f.payload.begin() + static_cast<std::ptrdiff_t>(n));
    r.label.assign(f.payload.begin() + static_cast<std::ptrdiff_t>(n), f.payload.end());
    return r;
}

}  // namespace contactnav
