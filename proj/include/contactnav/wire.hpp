// Length-prefixed binary frames shared by the external-predictor protocol
// and the training-dataset files. Layout is documented in docs/formats.md.
//
//   u32 frame_len | u32 header_len | header (UTF-8 JSON) | payload
//
// frame_len counts everything after itself. All integers are little-endian.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "contactnav/grid.hpp"
#include "contactnav/occupancy.hpp"

namespace contactnav {

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

struct Frame {
    nlohmann::json header;
    Bytes payload;

    bool operator==(const Frame&) const = default;
};

void put_u32(Bytes& out, std::uint32_t v);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset);
void put_f32(Bytes& out, float v);
float get_f32(std::span<const std::uint8_t> in, std::size_t offset);

Bytes encode_frame(const Frame& f);
/// Decodes the frame starting at `offset` and advances it past the frame.
Frame decode_frame(std::span<const std::uint8_t> in, std::size_t& offset);
std::vector<Frame> decode_frames(std::span<const std::uint8_t> in);

/// Cell codes of the {0, 0.5, 1} encoding.
inline constexpr std::uint8_t kCodeFree = 0;
inline constexpr std::uint8_t kCodeUnknown = 1;
inline constexpr std::uint8_t kCodeOccupied = 2;

Bytes encode_states(const OccupancyEstimate& est);

Frame make_predict_request(const OccupancyEstimate& est);
Frame make_predict_response(const GridSpec& spec, const std::vector<float>& p);
/// Validates a response against the grid it answers and returns the probabilities.
std::vector<double> parse_predict_response(const Frame& f, const GridSpec& spec);

/// One training record: partial observation and interaction label, both u8
/// code grids of the same dims, concatenated in the payload.
struct DatasetRecord {
    GridSpec spec;
    std::string domain;
    std::uint64_t scene_seed = 0;
    int actions = 0;
    Bytes input;
    Bytes label;

    bool operator==(const DatasetRecord&) const = default;
};

Frame encode_record(const DatasetRecord& r);
DatasetRecord decode_record(const Frame& f);

nlohmann::json spec_to_json(const GridSpec& spec);
GridSpec spec_from_json(const nlohmann::json& j);

}  // namespace contactnav
