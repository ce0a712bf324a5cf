#include "heightseg/height_class.hpp"

#include <cmath>

namespace heightseg {

HeightClass::HeightClass(int value) : value_(value) {
    if (value < 1 || value > kNumHeightClasses) {
        raise(Errc::domain_error, "height class must be in 1.." +
                                      std::to_string(kNumHeightClasses) + ", got " +
                                      std::to_string(value));
    }
}

std::string HeightClassRange::range_text() const {
    if (max_m < 0) {
        return std::to_string(min_m) + "+";
    }
    return std::to_string(min_m) + "-" + std::to_string(max_m);
}

const std::array<HeightClassRange, kNumHeightClasses>& height_class_ranges() {
    static const std::array<HeightClassRange, kNumHeightClasses> ranges = {{
        {1, 0, 10},
        {2, 11, 20},
        {3, 21, 30},
        {4, 31, 40},
        {5, 41, -1},
    }};
    return ranges;
}

HeightEstimate mean_height(std::span<const float> samples) {
    HeightEstimate est;
    est.total_samples = samples.size();
    double sum = 0.0;
    for (float s : samples) {
        if (std::isnan(s)) {
            continue;
        }
        sum += s;
        ++est.valid_samples;
    }
    if (est.valid_samples == 0) {
        raise(Errc::no_valid_samples, "all " + std::to_string(est.total_samples) +
                                          " samples under the mask are NaN");
    }
    const double mean = sum / static_cast<double>(est.valid_samples);
    int rounded = static_cast<int>(std::round(mean));
    if (rounded < 0) {
        rounded = 0;
        est.clamped_negative = true;
    }
    est.mean_m = rounded;
    return est;
}

HeightClass classify(int mean_m) {
    if (mean_m < 0) {
        raise(Errc::negative_height,
              "classify requires a nonnegative mean, got " + std::to_string(mean_m));
    }
    for (const HeightClassRange& range : height_class_ranges()) {
        if (range.max_m < 0 || mean_m <= range.max_m) {
            return HeightClass(range.cls);
        }
    }
    return HeightClass(kNumHeightClasses); // unreachable: last range is open
}

InstanceEstimate estimate_instance(const AnnotationRecord& annotation, const HeightRaster& raster,
                                   const ImageRecord& image) {
    if (raster.width != image.width || raster.height != image.height) {
        raise(Errc::dimension_mismatch,
              "raster " + std::to_string(raster.width) + "x" + std::to_string(raster.height) +
                  " does not match image " + std::to_string(image.width) + "x" +
                  std::to_string(image.height));
    }
    const BinaryMask mask = rasterize(annotation.parts, image.width, image.height);
    if (mask.set_count() == 0) {
        raise(Errc::empty_mask,
              "annotation " + std::to_string(annotation.id) + " rasterizes to zero pixels");
    }
    const std::vector<float> samples = sample_under_mask(raster, mask);
    const HeightEstimate est = mean_height(samples);
    return {classify(est.mean_m), est};
}

} // namespace heightseg
