#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "heightseg/error.hpp"
#include "heightseg/geometry.hpp"

namespace heightseg {

struct ImageRecord {
    std::int64_t id = 0;
    std::string file_name;
    int width = 0;
    int height = 0;
    friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// One annotated building. `parts` holds every polygon of the source
/// segmentation; `source_category` is kept for audit only and never drives
/// the emitted class.
struct AnnotationRecord {
    std::int64_t id = 0;
    std::int64_t image_id = 0;
    std::vector<Polygon> parts;
    std::int64_t source_category = 0;
    friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

class DatasetIndex {
public:
    DatasetIndex() = default;
    DatasetIndex(std::vector<ImageRecord> images, std::vector<AnnotationRecord> annotations);

    const std::vector<ImageRecord>& images() const { return images_; }
    const std::vector<AnnotationRecord>& annotations() const { return annotations_; }
    const ImageRecord* find_image(std::int64_t id) const;
    /// Annotations of one image in document order.
    std::vector<const AnnotationRecord*> annotations_for(std::int64_t image_id) const;
    std::size_t part_count() const;

    friend bool operator==(const DatasetIndex& a, const DatasetIndex& b) {
        return a.images_ == b.images_ && a.annotations_ == b.annotations_;
    }

private:
    std::vector<ImageRecord> images_;
    std::vector<AnnotationRecord> annotations_;
    std::unordered_map<std::int64_t, std::size_t> image_by_id_;
};

/// Parses a COCO-style annotation document. Only polygon segmentations are
/// accepted; RLE is rejected. Every returned record satisfies its invariants.
DatasetIndex load_dataset(const std::filesystem::path& path);

/// Serializes the COCO subset consumed by load_dataset. Re-loading the output
/// yields a structurally identical index.
void write_dataset(const DatasetIndex& index, const std::filesystem::path& path);

/// Image file name without its extension; used to pair images with rasters
/// and label files.
std::string image_stem(const ImageRecord& image);

enum class RasterStatus { aligned, missing, dimension_mismatch };

struct AlignmentEntry {
    std::int64_t image_id = 0;
    std::string stem;
    RasterStatus status = RasterStatus::missing;
    int raster_width = 0;
    int raster_height = 0;
    /// Any annotation vertex outside [0,W]x[0,H].
    bool out_of_bounds_vertices = false;
};

struct ValidationReport {
    std::vector<AlignmentEntry> entries;
    std::size_t aligned_count() const;
    std::size_t missing_count() const;
    std::size_t mismatch_count() const;
    bool clean() const { return missing_count() == 0 && mismatch_count() == 0; }
    std::string to_text() const;
};

/// Pairs each image with the raster of matching file stem and checks
/// dimensions. Findings are report entries, never errors.
ValidationReport validate_alignment(const DatasetIndex& index,
                                    const std::filesystem::path& raster_dir);

} // namespace heightseg
