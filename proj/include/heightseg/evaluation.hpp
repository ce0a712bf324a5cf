#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "heightseg/error.hpp"
#include "heightseg/geometry.hpp"
#include "heightseg/height_class.hpp"
#include "heightseg/labels.hpp"

namespace heightseg {

enum class IoUKind { box, mask };

/// One ground-truth or predicted instance of a single (image, class) group.
/// Ground truth carries confidence 1.0.
struct Detection {
    double confidence = 1.0;
    NormalizedPolygon polygon;
};

struct MatchResult {
    /// Aligned with the input detection order.
    std::vector<char> det_is_tp;
    std::vector<char> gt_matched;
};

/// Greedy matching for one (image, class) group: detections in descending
/// confidence (ties by ascending input index) each take the unmatched GT of
/// highest IoU when that IoU >= tau (IoU ties go to the lowest GT index).
MatchResult match_detections(const std::vector<Detection>& gts,
                             const std::vector<Detection>& dets, IoUKind kind, double tau,
                             int image_width, int image_height);

struct PRCurve {
    /// (recall, precision) per rank, recall nondecreasing.
    std::vector<std::pair<double, double>> points;
    double ap = 0.0;
};

/// 101-point interpolated average precision over a ranked TP/FP sequence.
/// Interpolated precision at recall r is the maximum precision at any
/// recall >= r; AP is the mean over r in {0.00, 0.01, ..., 1.00} and is 0
/// when num_gt is 0.
PRCurve average_precision(const std::vector<char>& ranked_flags, std::size_t num_gt);

struct ClassMetrics {
    std::size_t images = 0;
    std::size_t buildings = 0;
    double precision_b = 0.0, recall_b = 0.0, map50_b = 0.0, map5095_b = 0.0;
    double precision_m = 0.0, recall_m = 0.0, map50_m = 0.0, map5095_m = 0.0;
};

struct EvalReport {
    std::array<ClassMetrics, kNumHeightClasses> per_class{};
    std::array<bool, kNumHeightClasses> class_has_gt{};
    /// Unweighted mean over classes with at least one GT instance; images is
    /// the number of evaluated stems and buildings the total GT count.
    ClassMetrics all{};

    std::string to_table() const;
    std::string to_json() const;
};

using ImageSizeMap = std::map<std::string, std::pair<int, int>>;

/// Parses lines "<stem> <width> <height>"; blank lines ignored.
ImageSizeMap read_sizes_file(const std::filesystem::path& path);

/// Scores prediction label files against ground-truth label files. Stems are
/// paired by file name; a missing ground-truth file means zero GT instances.
/// Per class: AP at IoU 0.50 and the mean over {0.50,...,0.95}, with box and
/// mask IoU; the precision/recall columns are read at the confidence rank
/// maximizing F1 on the IoU-0.50 data. Per-class image counts are GT-based.
EvalReport evaluate(const std::filesystem::path& gt_dir, const std::filesystem::path& pred_dir,
                    const ImageSizeMap& image_sizes);

} // namespace heightseg
