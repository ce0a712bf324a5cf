#include "heightseg/balance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "heightseg/labels.hpp"

namespace heightseg {

namespace {

std::vector<std::filesystem::path> label_files_under(const std::filesystem::path& label_dir) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (auto it = std::filesystem::recursive_directory_iterator(label_dir, ec);
         it != std::filesystem::recursive_directory_iterator(); ++it) {
        if (it->is_regular_file() && it->path().extension() == ".txt") {
            files.push_back(it->path());
        }
    }
    if (ec) {
        raise(Errc::io_failure, "cannot walk label directory " + label_dir.string() + ": " +
                                    ec.message());
    }
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace

double ClassHistogram::percent(int cls) const {
    if (total == 0) {
        return 0.0;
    }
    return 100.0 * static_cast<double>(counts[cls - 1]) / static_cast<double>(total);
}

std::string ClassHistogram::to_text() const {
    std::ostringstream out;
    out << "class  range (m)  count  share\n";
    for (const HeightClassRange& range : height_class_ranges()) {
        char line[96];
        std::snprintf(line, sizeof(line), "%-5d  %-9s  %-5zu  %.1f%%\n", range.cls,
                      range.range_text().c_str(), counts[range.cls - 1], percent(range.cls));
        out << line;
    }
    out << "total             " << total << "\n";
    return std::move(out).str();
}

ClassHistogram class_histogram(const std::filesystem::path& label_dir) {
    ClassHistogram hist;
    for (const std::filesystem::path& file : label_files_under(label_dir)) {
        for (const YoloInstance& inst : parse_label_file(file, LabelKind::ground_truth)) {
            ++hist.counts[inst.class_index];
            ++hist.total;
        }
    }
    return hist;
}

std::string SampleWeights::to_text() const {
    std::string out;
    for (const auto& [stem, weight] : weights) {
        char line[64];
        std::snprintf(line, sizeof(line), " %.9f\n", weight);
        out += stem;
        out += line;
    }
    return out;
}

SampleWeights image_weights(const std::filesystem::path& label_dir) {
    const std::vector<std::filesystem::path> files = label_files_under(label_dir);

    std::array<std::size_t, kNumHeightClasses> counts{};
    std::size_t total = 0;
    std::vector<std::pair<std::string, std::vector<int>>> per_image;
    per_image.reserve(files.size());
    for (const std::filesystem::path& file : files) {
        std::vector<int> classes;
        for (const YoloInstance& inst : parse_label_file(file, LabelKind::ground_truth)) {
            ++counts[inst.class_index];
            ++total;
            classes.push_back(inst.class_index);
        }
        per_image.emplace_back(file.stem().string(), std::move(classes));
    }
    if (total == 0) {
        raise(Errc::empty_dataset, "no instances under " + label_dir.string());
    }

    std::array<double, kNumHeightClasses> inv_freq{};
    for (int c = 0; c < kNumHeightClasses; ++c) {
        if (counts[c] > 0) {
            inv_freq[c] = static_cast<double>(total) / static_cast<double>(counts[c]);
        }
    }

    double min_raw = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::string, double>> raw;
    raw.reserve(per_image.size());
    for (const auto& [stem, classes] : per_image) {
        double weight = 0.0;
        if (!classes.empty()) {
            for (int c : classes) {
                weight += inv_freq[c];
            }
            weight /= static_cast<double>(classes.size());
            min_raw = std::min(min_raw, weight);
        }
        raw.emplace_back(stem, weight);
    }
    double sum = 0.0;
    for (auto& [stem, weight] : raw) {
        if (weight == 0.0) {
            weight = min_raw;
        }
        sum += weight;
    }

    SampleWeights out;
    out.weights = std::move(raw);
    std::sort(out.weights.begin(), out.weights.end());
    for (auto& [stem, weight] : out.weights) {
        weight /= sum;
    }
    return out;
}

void write_weights(const SampleWeights& weights, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << weights.to_text()) || !out.flush()) {
        raise(Errc::io_failure, "cannot write weights file " + path.string());
    }
}

FocalLossResult focal_loss(double p, double alpha, double gamma) {
    if (!(p > 0.0 && p <= 1.0)) {
        raise(Errc::domain_error, "focal loss requires p in (0,1]");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        raise(Errc::domain_error, "focal loss requires alpha in (0,1]");
    }
    if (!(gamma >= 0.0)) {
        raise(Errc::domain_error, "focal loss requires gamma >= 0");
    }
    FocalLossResult result;
    result.loss = -alpha * std::pow(1.0 - p, gamma) * std::log(p);
    if (p == 1.0) {
        // Limit of the derivative as p -> 1; avoids 0^(gamma-1) for gamma < 1.
        result.dloss_dp = (gamma == 0.0) ? -alpha : 0.0;
        return result;
    }
    const double modulating = (gamma == 0.0)
                                  ? 0.0
                                  : alpha * gamma * std::pow(1.0 - p, gamma - 1.0) * std::log(p);
    result.dloss_dp = modulating - alpha * std::pow(1.0 - p, gamma) / p;
    return result;
}

} // namespace heightseg
