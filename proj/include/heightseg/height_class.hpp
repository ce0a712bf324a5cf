#pragma once

#include <array>
#include <span>
#include <string>

#include "heightseg/dataset.hpp"
#include "heightseg/error.hpp"
#include "heightseg/raster.hpp"

namespace heightseg {

inline constexpr int kNumHeightClasses = 5;

/// Discrete height tier, 1..5.
class HeightClass {
public:
    explicit HeightClass(int value);
    int value() const { return value_; }
    /// 0-based index used in label files.
    int label_index() const { return value_ - 1; }
    friend auto operator<=>(const HeightClass&, const HeightClass&) = default;

private:
    int value_;
};

struct HeightClassRange {
    int cls = 0;
    int min_m = 0;
    int max_m = 0; // -1 = open-ended
    std::string range_text() const;
};

/// The five class ranges in meters: 0-10, 11-20, 21-30, 31-40, 41+.
const std::array<HeightClassRange, kNumHeightClasses>& height_class_ranges();

/// Rounded mean over the valid (non-NaN) samples.
struct HeightEstimate {
    int mean_m = 0;
    std::size_t valid_samples = 0;
    std::size_t total_samples = 0;
    bool clamped_negative = false;
};

/// Drops NaN samples, averages the rest, rounds half away from zero, and
/// clamps a negative result to 0 (nDSM noise). Throws NoValidSamples when no
/// finite sample remains; the caller must skip and report such instances.
HeightEstimate mean_height(std::span<const float> samples);

/// Table lookup on a nonnegative rounded mean.
HeightClass classify(int mean_m);

struct InstanceEstimate {
    HeightClass cls;
    HeightEstimate estimate;
};

/// Rasterizes the union of the annotation's parts at image resolution,
/// samples the raster under it, and classifies the rounded mean.
InstanceEstimate estimate_instance(const AnnotationRecord& annotation, const HeightRaster& raster,
                                   const ImageRecord& image);

} // namespace heightseg
