#include "heightseg/raster.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace heightseg {

namespace {

constexpr std::array<char, 4> kMagic = {'H', 'G', 'R', '1'};
constexpr double kDefaultNoData = -9999.0;

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(Errc::io_failure, "cannot open raster file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        raise(Errc::io_failure, "read error on " + path.string());
    }
    return std::move(buf).str();
}

std::uint32_t read_u32le(const char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | static_cast<std::uint8_t>(p[i]);
    }
    return v;
}

float read_f32le(const char* p) {
    return std::bit_cast<float>(read_u32le(p));
}

void append_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

HeightRaster read_binary(const std::string& bytes, const std::filesystem::path& path) {
    if (bytes.size() < 16) {
        raise(Errc::header_mismatch, "HGR1 header truncated in " + path.string());
    }
    const std::uint32_t width = read_u32le(bytes.data() + 4);
    const std::uint32_t height = read_u32le(bytes.data() + 8);
    const std::uint64_t cells = static_cast<std::uint64_t>(width) * height;
    if (bytes.size() != 16 + cells * 4) {
        raise(Errc::header_mismatch, "HGR1 payload of " + path.string() + " holds " +
                                         std::to_string((bytes.size() - 16) / 4) +
                                         " cells, header declares " + std::to_string(cells));
    }
    HeightRaster raster;
    raster.width = static_cast<int>(width);
    raster.height = static_cast<int>(height);
    raster.values.resize(cells);
    for (std::uint64_t i = 0; i < cells; ++i) {
        float v = read_f32le(bytes.data() + 16 + i * 4);
        if (std::isinf(v)) {
            v = std::numeric_limits<float>::quiet_NaN();
        }
        raster.values[i] = v;
    }
    return raster;
}

bool is_header_key_start(std::string_view token) {
    return !token.empty() && (std::isalpha(static_cast<unsigned char>(token.front())) != 0 ||
                              token.front() == '_');
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

HeightRaster read_ascii(const std::string& bytes, const std::filesystem::path& path) {
    std::istringstream in(bytes);
    std::string token;

    long long ncols = -1;
    long long nrows = -1;
    double nodata = kDefaultNoData;
    bool header_seen = false;

    // Header: key/value pairs until the first token that is not a key name.
    std::streampos cells_start = 0;
    while (true) {
        cells_start = in.tellg();
        if (!(in >> token)) {
            break;
        }
        if (!is_header_key_start(token)) {
            break;
        }
        const std::string key = lowercase(token);
        double value = 0.0;
        if (!(in >> value)) {
            raise(Errc::unknown_format, "header key '" + token + "' in " + path.string() +
                                            " has no numeric value");
        }
        if (!std::isfinite(value)) {
            raise(Errc::nonfinite_header,
                  "header key '" + token + "' in " + path.string() + " is not finite");
        }
        if (key == "ncols") {
            ncols = static_cast<long long>(value);
            if (ncols <= 0 || static_cast<double>(ncols) != value) {
                raise(Errc::unknown_format, "ncols must be a positive integer in " + path.string());
            }
        } else if (key == "nrows") {
            nrows = static_cast<long long>(value);
            if (nrows <= 0 || static_cast<double>(nrows) != value) {
                raise(Errc::unknown_format, "nrows must be a positive integer in " + path.string());
            }
        } else if (key == "nodata_value") {
            nodata = value;
        } else if (key != "xllcorner" && key != "yllcorner" && key != "xllcenter" &&
                   key != "yllcenter" && key != "cellsize") {
            raise(Errc::unknown_format,
                  "unrecognized header key '" + token + "' in " + path.string());
        }
        header_seen = true;
    }
    if (!header_seen || ncols < 0 || nrows < 0) {
        raise(Errc::unknown_format,
              path.string() + " is neither an ESRI ASCII grid nor an HGR1 grid");
    }

    in.clear();
    in.seekg(cells_start);
    const std::uint64_t cells = static_cast<std::uint64_t>(ncols) * static_cast<std::uint64_t>(nrows);
    HeightRaster raster;
    raster.width = static_cast<int>(ncols);
    raster.height = static_cast<int>(nrows);
    raster.values.reserve(cells);
    double cell = 0.0;
    while (raster.values.size() < cells && (in >> cell)) {
        float v = static_cast<float>(cell);
        if (cell == nodata || !std::isfinite(cell)) {
            v = std::numeric_limits<float>::quiet_NaN();
        }
        raster.values.push_back(v);
    }
    if (raster.values.size() < cells) {
        raise(Errc::header_mismatch, path.string() + " declares " + std::to_string(cells) +
                                         " cells but holds " +
                                         std::to_string(raster.values.size()));
    }
    if (in >> token) {
        raise(Errc::header_mismatch,
              path.string() + " has trailing data after the declared cell count");
    }
    return raster;
}

} // namespace

HeightRaster read_raster(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic.data(), 4) == 0) {
        return read_binary(bytes, path);
    }
    return read_ascii(bytes, path);
}

void write_raster_binary(const HeightRaster& raster, const std::filesystem::path& path) {
    std::string out;
    out.reserve(16 + raster.values.size() * 4);
    out.append(kMagic.data(), 4);
    append_u32le(out, static_cast<std::uint32_t>(raster.width));
    append_u32le(out, static_cast<std::uint32_t>(raster.height));
    append_u32le(out, 0);
    for (float v : raster.values) {
        append_u32le(out, std::bit_cast<std::uint32_t>(v));
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file || !(file << out) || !file.flush()) {
        raise(Errc::io_failure, "cannot write raster file " + path.string());
    }
}

std::vector<float> sample_under_mask(const HeightRaster& raster, const BinaryMask& mask) {
    if (raster.width != mask.width() || raster.height != mask.height()) {
        raise(Errc::dimension_mismatch,
              "raster is " + std::to_string(raster.width) + "x" + std::to_string(raster.height) +
                  ", mask is " + std::to_string(mask.width()) + "x" +
                  std::to_string(mask.height()));
    }
    std::vector<float> samples;
    for (int row = 0; row < raster.height; ++row) {
        for (int col = 0; col < raster.width; ++col) {
            if (mask.test(row, col)) {
                samples.push_back(raster.at(row, col));
            }
        }
    }
    return samples;
}

std::optional<std::filesystem::path> find_by_stem(const std::filesystem::path& dir,
                                                  std::string_view stem) {
    std::vector<std::filesystem::path> matches;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().stem() == stem) {
            matches.push_back(entry.path());
        }
    }
    if (ec) {
        raise(Errc::io_failure, "cannot list directory " + dir.string() + ": " + ec.message());
    }
    if (matches.empty()) {
        return std::nullopt;
    }
    std::sort(matches.begin(), matches.end());
    return matches.front();
}

} // namespace heightseg
