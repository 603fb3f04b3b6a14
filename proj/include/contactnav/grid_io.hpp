// Portable serialization of ground-truth grids and estimate snapshots.
// Byte layout: docs/formats.md.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "contactnav/grid.hpp"
#include "contactnav/occupancy.hpp"
#include "contactnav/wire.hpp"

namespace contactnav {

struct StoredGrid {
    GroundTruthGrid grid;
    std::string domain;
    std::uint64_t seed = 0;
};

Bytes encode_grid(const GroundTruthGrid& grid, const std::string& domain, std::uint64_t seed);
StoredGrid decode_grid(std::span<const std::uint8_t> in);

Bytes encode_estimate(const OccupancyEstimate& est);
OccupancyEstimate decode_estimate(std::span<const std::uint8_t> in);

void write_file(const std::filesystem::path& path, const Bytes& bytes);
Bytes read_file(const std::filesystem::path& path);

}  // namespace contactnav
