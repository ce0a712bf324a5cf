#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "heightseg/error.hpp"
#include "heightseg/geometry.hpp"

namespace heightseg {

/// Single-band height grid in meters, row-major from the top row.
/// NoData cells are IEEE NaN after load; every other value is finite.
struct HeightRaster {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    float at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
};

/// Reads an ESRI ASCII grid or an HGR1 binary grid, detected by content.
/// Source NoData sentinels (and non-finite cells) become NaN.
HeightRaster read_raster(const std::filesystem::path& path);

/// Writes the HGR1 binary format: 16-byte header (magic "HGR1", u32le width,
/// u32le height, u32le reserved zero) followed by width*height f32le values
/// row-major. read_raster(write_raster_binary(r)) is the identity on
/// (width, height, values) with NaN-aware equality.
void write_raster_binary(const HeightRaster& raster, const std::filesystem::path& path);

/// Heights at all set mask pixels in row-major order, NaN entries included.
std::vector<float> sample_under_mask(const HeightRaster& raster, const BinaryMask& mask);

/// First regular file in `dir` (sorted by filename) whose stem matches.
std::optional<std::filesystem::path> find_by_stem(const std::filesystem::path& dir,
                                                  std::string_view stem);

} // namespace heightseg
