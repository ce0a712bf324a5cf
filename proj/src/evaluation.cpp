#include "heightseg/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "heightseg/raster.hpp"
#include "json.hpp"

namespace heightseg {

namespace {

constexpr int kRecallPoints = 101;

std::vector<double> iou_taus() {
    std::vector<double> taus;
    for (int i = 0; i < 10; ++i) {
        taus.push_back(0.50 + 0.05 * i);
    }
    return taus;
}

/// Descending confidence, ties by ascending input index.
std::vector<std::size_t> rank_by_confidence(const std::vector<double>& conf) {
    std::vector<std::size_t> order(conf.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&conf](std::size_t a, std::size_t b) { return conf[a] > conf[b]; });
    return order;
}

/// Greedy matching over a precomputed det-by-gt IoU matrix.
MatchResult greedy_match(const std::vector<std::vector<double>>& iou,
                         const std::vector<double>& conf, std::size_t num_gt, double tau) {
    MatchResult result;
    result.det_is_tp.assign(conf.size(), 0);
    result.gt_matched.assign(num_gt, 0);
    for (std::size_t det : rank_by_confidence(conf)) {
        double best_iou = 0.0;
        std::size_t best_gt = num_gt;
        for (std::size_t gt = 0; gt < num_gt; ++gt) {
            if (result.gt_matched[gt]) {
                continue;
            }
            if (iou[det][gt] > best_iou) {
                best_iou = iou[det][gt];
                best_gt = gt;
            }
        }
        if (best_gt < num_gt && best_iou >= tau) {
            result.det_is_tp[det] = 1;
            result.gt_matched[best_gt] = 1;
        }
    }
    return result;
}

struct InstanceGeometry {
    BBox box;
    BinaryMask mask;
    double confidence = 1.0;
};

InstanceGeometry make_geometry(const Detection& det, int width, int height, bool with_mask) {
    InstanceGeometry geo;
    geo.confidence = det.confidence;
    const Polygon pixels = denormalize(det.polygon, width, height);
    geo.box = bbox_of({pixels});
    if (with_mask) {
        geo.mask = rasterize({pixels}, width, height);
    }
    return geo;
}

std::vector<std::vector<double>> iou_matrix(const std::vector<InstanceGeometry>& dets,
                                            const std::vector<InstanceGeometry>& gts,
                                            IoUKind kind) {
    std::vector<std::vector<double>> matrix(dets.size(), std::vector<double>(gts.size(), 0.0));
    for (std::size_t d = 0; d < dets.size(); ++d) {
        for (std::size_t g = 0; g < gts.size(); ++g) {
            matrix[d][g] = kind == IoUKind::box ? box_iou(dets[d].box, gts[g].box)
                                                : mask_iou(dets[d].mask, gts[g].mask);
        }
    }
    return matrix;
}

struct RankedFlags {
    std::vector<char> flags; // TP/FP by descending confidence
};

struct KindMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double map50 = 0.0;
    double map5095 = 0.0;
};

/// Precision/recall at the rank maximizing F1 on the ranked tau=0.50 flags.
void max_f1_point(const std::vector<char>& flags, std::size_t num_gt, double& precision,
                  double& recall) {
    precision = 0.0;
    recall = 0.0;
    double best_f1 = -1.0;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < flags.size(); ++k) {
        tp += flags[k] ? 1 : 0;
        const double p = static_cast<double>(tp) / static_cast<double>(k + 1);
        const double r = num_gt > 0 ? static_cast<double>(tp) / static_cast<double>(num_gt) : 0.0;
        const double f1 = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
        if (f1 > best_f1) {
            best_f1 = f1;
            precision = p;
            recall = r;
        }
    }
}

std::string format_row(const std::string& name, const ClassMetrics& m) {
    char line[192];
    std::snprintf(line, sizeof(line),
                  "%-5s  %6zu  %9zu  %7.3f  %9.3f  %9.3f  %12.3f  %7.3f  %9.3f  %9.3f  %12.3f\n",
                  name.c_str(), m.images, m.buildings, m.precision_b, m.recall_b, m.map50_b,
                  m.map5095_b, m.precision_m, m.recall_m, m.map50_m, m.map5095_m);
    return line;
}

nlohmann::json metrics_to_json(const ClassMetrics& m) {
    return {{"images", m.images},
            {"buildings", m.buildings},
            {"precision_b", m.precision_b},
            {"recall_b", m.recall_b},
            {"map50_b", m.map50_b},
            {"map50_95_b", m.map5095_b},
            {"precision_m", m.precision_m},
            {"recall_m", m.recall_m},
            {"map50_m", m.map50_m},
            {"map50_95_m", m.map5095_m}};
}

} // namespace

MatchResult match_detections(const std::vector<Detection>& gts,
                             const std::vector<Detection>& dets, IoUKind kind, double tau,
                             int image_width, int image_height) {
    if (!(tau > 0.0 && tau < 1.0)) {
        raise(Errc::domain_error, "IoU threshold must be in (0,1)");
    }
    const bool with_mask = kind == IoUKind::mask;
    std::vector<InstanceGeometry> gt_geo;
    gt_geo.reserve(gts.size());
    for (const Detection& gt : gts) {
        gt_geo.push_back(make_geometry(gt, image_width, image_height, with_mask));
    }
    std::vector<InstanceGeometry> det_geo;
    std::vector<double> conf;
    det_geo.reserve(dets.size());
    for (const Detection& det : dets) {
        det_geo.push_back(make_geometry(det, image_width, image_height, with_mask));
        conf.push_back(det.confidence);
    }
    return greedy_match(iou_matrix(det_geo, gt_geo, kind), conf, gts.size(), tau);
}

PRCurve average_precision(const std::vector<char>& ranked_flags, std::size_t num_gt) {
    PRCurve curve;
    std::size_t tp = 0;
    curve.points.reserve(ranked_flags.size());
    for (std::size_t k = 0; k < ranked_flags.size(); ++k) {
        tp += ranked_flags[k] ? 1 : 0;
        const double precision = static_cast<double>(tp) / static_cast<double>(k + 1);
        const double recall =
            num_gt > 0 ? static_cast<double>(tp) / static_cast<double>(num_gt) : 0.0;
        curve.points.emplace_back(recall, precision);
    }
    if (num_gt == 0) {
        curve.ap = 0.0;
        return curve;
    }

    // Suffix maximum of precision over the rank-ordered points; recalls are
    // nondecreasing, so the max precision at recall >= r is a suffix max.
    std::vector<double> suffix_max(curve.points.size());
    double running = 0.0;
    for (std::size_t i = curve.points.size(); i-- > 0;) {
        running = std::max(running, curve.points[i].second);
        suffix_max[i] = running;
    }
    double sum = 0.0;
    for (int i = 0; i < kRecallPoints; ++i) {
        const double r = static_cast<double>(i) / (kRecallPoints - 1);
        const auto it = std::lower_bound(
            curve.points.begin(), curve.points.end(), r,
            [](const std::pair<double, double>& point, double value) {
                return point.first < value;
            });
        if (it != curve.points.end()) {
            sum += suffix_max[static_cast<std::size_t>(it - curve.points.begin())];
        }
    }
    curve.ap = sum / kRecallPoints;
    return curve;
}

ImageSizeMap read_sizes_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::io_failure, "cannot open sizes file " + path.string());
    }
    ImageSizeMap sizes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string stem;
        if (!(fields >> stem)) {
            continue;
        }
        int width = 0;
        int height = 0;
        if (!(fields >> width >> height) || width <= 0 || height <= 0) {
            raise(Errc::malformed_document, path.string() + ":" + std::to_string(line_no) +
                                                ": expected '<stem> <width> <height>'");
        }
        if (!sizes.emplace(stem, std::make_pair(width, height)).second) {
            raise(Errc::malformed_document,
                  path.string() + ":" + std::to_string(line_no) + ": duplicate stem " + stem);
        }
    }
    return sizes;
}

EvalReport evaluate(const std::filesystem::path& gt_dir, const std::filesystem::path& pred_dir,
                    const ImageSizeMap& image_sizes) {
    // One group per evaluated stem and class, in sorted stem order.
    struct Group {
        std::vector<InstanceGeometry> gts;
        std::vector<InstanceGeometry> dets;
        std::vector<double> conf;
        std::vector<std::vector<double>> iou_b;
        std::vector<std::vector<double>> iou_m;
    };

    std::set<std::string> stems;
    auto collect = [&stems](const std::filesystem::path& dir) {
        std::error_code ec;
        for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                stems.insert(entry.path().stem().string());
            }
        }
        if (ec) {
            raise(Errc::io_failure, "cannot list " + dir.string() + ": " + ec.message());
        }
    };
    collect(gt_dir);
    collect(pred_dir);

    std::array<std::vector<Group>, kNumHeightClasses> groups;
    std::array<std::size_t, kNumHeightClasses> num_gt{};
    std::array<std::size_t, kNumHeightClasses> images_with_gt{};

    for (const std::string& stem : stems) {
        std::vector<YoloInstance> gt_instances;
        std::vector<YoloInstance> pred_instances;
        const std::filesystem::path gt_path = gt_dir / (stem + ".txt");
        const std::filesystem::path pred_path = pred_dir / (stem + ".txt");
        if (std::filesystem::exists(gt_path)) {
            gt_instances = parse_label_file(gt_path, LabelKind::ground_truth);
        }
        if (std::filesystem::exists(pred_path)) {
            pred_instances = parse_label_file(pred_path, LabelKind::prediction);
        }
        if (gt_instances.empty() && pred_instances.empty()) {
            continue;
        }
        const auto size_it = image_sizes.find(stem);
        if (size_it == image_sizes.end()) {
            raise(Errc::dimension_unknown, "no image size recorded for stem " + stem);
        }
        const auto [width, height] = size_it->second;

        std::array<Group, kNumHeightClasses> per_class;
        for (const YoloInstance& inst : gt_instances) {
            Detection det{1.0, inst.polygon};
            per_class[inst.class_index].gts.push_back(make_geometry(det, width, height, true));
        }
        for (const YoloInstance& inst : pred_instances) {
            Detection det{inst.confidence.value_or(1.0), inst.polygon};
            per_class[inst.class_index].dets.push_back(make_geometry(det, width, height, true));
            per_class[inst.class_index].conf.push_back(det.confidence);
        }
        for (int c = 0; c < kNumHeightClasses; ++c) {
            Group& group = per_class[c];
            if (group.gts.empty() && group.dets.empty()) {
                continue;
            }
            num_gt[c] += group.gts.size();
            images_with_gt[c] += group.gts.empty() ? 0 : 1;
            group.iou_b = iou_matrix(group.dets, group.gts, IoUKind::box);
            group.iou_m = iou_matrix(group.dets, group.gts, IoUKind::mask);
            // Masks are only needed for the IoU matrices; drop them early.
            for (auto& geo : group.gts) {
                geo.mask = BinaryMask();
            }
            for (auto& geo : group.dets) {
                geo.mask = BinaryMask();
            }
            groups[c].push_back(std::move(group));
        }
    }

    const std::vector<double> taus = iou_taus();
    EvalReport report;
    for (int c = 0; c < kNumHeightClasses; ++c) {
        ClassMetrics& metrics = report.per_class[c];
        metrics.images = images_with_gt[c];
        metrics.buildings = num_gt[c];
        report.class_has_gt[c] = num_gt[c] > 0;

        for (IoUKind kind : {IoUKind::box, IoUKind::mask}) {
            // Pooled detections ranked by confidence across all images.
            std::vector<double> pooled_conf;
            for (const Group& group : groups[c]) {
                pooled_conf.insert(pooled_conf.end(), group.conf.begin(), group.conf.end());
            }
            const std::vector<std::size_t> pooled_order = rank_by_confidence(pooled_conf);

            double ap50 = 0.0;
            double ap_sum = 0.0;
            std::vector<char> flags50;
            for (double tau : taus) {
                std::vector<char> flags;
                flags.reserve(pooled_conf.size());
                for (const Group& group : groups[c]) {
                    const MatchResult match =
                        greedy_match(kind == IoUKind::box ? group.iou_b : group.iou_m,
                                     group.conf, group.gts.size(), tau);
                    flags.insert(flags.end(), match.det_is_tp.begin(), match.det_is_tp.end());
                }
                std::vector<char> ranked(flags.size());
                for (std::size_t i = 0; i < pooled_order.size(); ++i) {
                    ranked[i] = flags[pooled_order[i]];
                }
                const double ap = average_precision(ranked, num_gt[c]).ap;
                ap_sum += ap;
                if (tau == taus.front()) {
                    ap50 = ap;
                    flags50 = std::move(ranked);
                }
            }

            double precision = 0.0;
            double recall = 0.0;
            max_f1_point(flags50, num_gt[c], precision, recall);
            if (kind == IoUKind::box) {
                metrics.precision_b = precision;
                metrics.recall_b = recall;
                metrics.map50_b = ap50;
                metrics.map5095_b = ap_sum / static_cast<double>(taus.size());
            } else {
                metrics.precision_m = precision;
                metrics.recall_m = recall;
                metrics.map50_m = ap50;
                metrics.map5095_m = ap_sum / static_cast<double>(taus.size());
            }
        }
    }

    report.all.images = stems.size();
    std::size_t gt_classes = 0;
    for (int c = 0; c < kNumHeightClasses; ++c) {
        report.all.buildings += num_gt[c];
        if (!report.class_has_gt[c]) {
            continue;
        }
        ++gt_classes;
        const ClassMetrics& m = report.per_class[c];
        report.all.precision_b += m.precision_b;
        report.all.recall_b += m.recall_b;
        report.all.map50_b += m.map50_b;
        report.all.map5095_b += m.map5095_b;
        report.all.precision_m += m.precision_m;
        report.all.recall_m += m.recall_m;
        report.all.map50_m += m.map50_m;
        report.all.map5095_m += m.map5095_m;
    }
    if (gt_classes > 0) {
        const double n = static_cast<double>(gt_classes);
        report.all.precision_b /= n;
        report.all.recall_b /= n;
        report.all.map50_b /= n;
        report.all.map5095_b /= n;
        report.all.precision_m /= n;
        report.all.recall_m /= n;
        report.all.map50_m /= n;
        report.all.map5095_m /= n;
    }
    return report;
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << "per-class image counts are GT-based; 'All' averages classes with ground truth\n";
    out << "Class  Images  Buildings  Prec(B)  Recall(B)  mAP@50(B)  mAP@50-95(B)  Prec(M)  "
           "Recall(M)  mAP@50(M)  mAP@50-95(M)\n";
    out << format_row("All", all);
    for (int c = 0; c < kNumHeightClasses; ++c) {
        out << format_row(std::to_string(c + 1), per_class[c]);
    }
    return std::move(out).str();
}

std::string EvalReport::to_json() const {
    nlohmann::json doc;
    doc["all"] = metrics_to_json(all);
    doc["classes"] = nlohmann::json::array();
    for (int c = 0; c < kNumHeightClasses; ++c) {
        nlohmann::json entry = metrics_to_json(per_class[c]);
        entry["class"] = c + 1;
        entry["has_ground_truth"] = class_has_gt[c];
        doc["classes"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

} // namespace heightseg
