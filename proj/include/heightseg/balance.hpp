#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "heightseg/error.hpp"
#include "heightseg/height_class.hpp"

namespace heightseg {

struct ClassHistogram {
    /// counts[c-1] = instances of height class c.
    std::array<std::size_t, kNumHeightClasses> counts{};
    std::size_t total = 0;

    double percent(int cls) const;
    std::string to_text() const;
};

/// Counts instances per class over every ground-truth label file (*.txt)
/// under label_dir, recursively. Parse errors carry the offending file path.
ClassHistogram class_histogram(const std::filesystem::path& label_dir);

/// Per-image sampling weights, sorted by stem, normalized to sum to 1.
struct SampleWeights {
    std::vector<std::pair<std::string, double>> weights;
    std::string to_text() const;
};

/// Inverse-class-frequency weights: an image's raw weight is the mean over
/// its instances of 1/f_c where f_c = count_c / total over the whole corpus.
/// Images with no instances get the minimum raw weight.
SampleWeights image_weights(const std::filesystem::path& label_dir);

void write_weights(const SampleWeights& weights, const std::filesystem::path& path);

struct FocalLossResult {
    double loss = 0.0;
    double dloss_dp = 0.0;
};

/// FL(p) = -alpha * (1-p)^gamma * log(p) on the true-class probability, with
/// its analytic derivative in p. Requires p in (0,1], alpha in (0,1],
/// gamma >= 0.
FocalLossResult focal_loss(double p, double alpha, double gamma);

} // namespace heightseg
