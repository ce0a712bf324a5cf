#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heightseg/dataset.hpp"
#include "heightseg/error.hpp"
#include "heightseg/geometry.hpp"
#include "heightseg/height_class.hpp"

namespace heightseg {

enum class LabelKind { ground_truth, prediction };

/// One label line: 0-based class index, normalized polygon, and for
/// predictions a trailing confidence.
struct YoloInstance {
    int class_index = 0;
    NormalizedPolygon polygon;
    std::optional<double> confidence;
    friend bool operator==(const YoloInstance&, const YoloInstance&) = default;
};

/// Formats instances as label-file text: one line per instance, coordinates
/// interleaved x y with 6 decimal places, confidence (if any) as the final
/// token. Files never mix instances with and without confidence.
std::string format_label_lines(const std::vector<YoloInstance>& instances);

/// Writes format_label_lines output atomically (temp file + rename).
void write_label_file(const std::vector<YoloInstance>& instances,
                      const std::filesystem::path& path);

std::vector<YoloInstance> parse_label_text(std::string_view text, LabelKind kind,
                                           const std::string& context);
std::vector<YoloInstance> parse_label_file(const std::filesystem::path& path, LabelKind kind);

/// Deterministic train/val assignment. The hash input is the image file stem
/// with the decimal seed appended; an image is validation iff
/// fnv1a64(stem + seed) mod 100 < round(val_fraction * 100).
struct SplitSpec {
    std::uint64_t seed = 0;
    double val_fraction = 0.20;
};

std::uint64_t split_hash(std::string_view stem, std::uint64_t seed);
bool is_validation_stem(std::string_view stem, const SplitSpec& split);

struct SkippedInstance {
    std::string stem;
    std::int64_t annotation_id = 0;
    Errc reason = Errc::no_valid_samples;
};

struct ConversionReport {
    std::size_t images_total = 0;
    std::size_t images_train = 0;
    std::size_t images_val = 0;
    std::size_t written = 0;
    std::size_t skipped_no_valid_samples = 0;
    std::size_t skipped_empty_mask = 0;
    std::size_t clamped_negatives = 0;
    /// counts[c-1] = instances written with height class c.
    std::array<std::size_t, kNumHeightClasses> class_counts{};
    std::vector<SkippedInstance> skipped;

    std::size_t skipped_total() const { return skipped_no_valid_samples + skipped_empty_mask; }
    std::string to_text() const;
};

/// Runs the full per-instance pipeline (rasterize union -> sample -> mean ->
/// classify) and writes `labels/train/<stem>.txt` / `labels/val/<stem>.txt`
/// under out_dir. Each building contributes one line carrying its
/// largest-area part; the union mask is used only for the height estimate.
/// Per-instance failures (NoValidSamples, EmptyMask) are recorded, not fatal.
ConversionReport convert_dataset(const DatasetIndex& index,
                                 const std::filesystem::path& raster_dir,
                                 const std::filesystem::path& out_dir, const SplitSpec& split);

} // namespace heightseg
