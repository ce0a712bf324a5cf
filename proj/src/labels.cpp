#include "heightseg/labels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace heightseg {

namespace {

void append_fixed6(std::string& out, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    out += buf;
}

double parse_ratio_token(std::string_view token, const std::string& context, Errc errc,
                         const char* what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        raise(errc, context + ": unparseable " + what + " token '" + std::string(token) + "'");
    }
    if (!(value >= 0.0 && value <= 1.0)) {
        raise(errc, context + ": " + what + " " + std::string(token) + " outside [0,1]");
    }
    return value;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') {
            ++pos;
        }
        if (pos > start) {
            tokens.push_back(line.substr(start, pos - start));
        }
    }
    return tokens;
}

YoloInstance parse_line(std::string_view line, LabelKind kind, const std::string& context) {
    const std::vector<std::string_view> tokens = split_tokens(line);
    const std::size_t n = tokens.size();
    if (kind == LabelKind::ground_truth) {
        // class + k coordinate pairs, k >= 3
        if (n < 7 || n % 2 == 0) {
            raise(Errc::token_count_mismatch,
                  context + ": ground-truth line has " + std::to_string(n) +
                      " tokens, expected an odd count of at least 7");
        }
    } else {
        // class + k coordinate pairs + confidence, k >= 3
        if (n < 8 || n % 2 != 0) {
            raise(Errc::token_count_mismatch,
                  context + ": prediction line has " + std::to_string(n) +
                      " tokens, expected an even count of at least 8");
        }
    }

    YoloInstance inst;
    int cls = -1;
    const auto [ptr, ec] =
        std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), cls);
    if (ec != std::errc() || ptr != tokens[0].data() + tokens[0].size() || cls < 0 ||
        cls >= kNumHeightClasses) {
        raise(Errc::out_of_range_class,
              context + ": class token '" + std::string(tokens[0]) + "' is not in 0.." +
                  std::to_string(kNumHeightClasses - 1));
    }
    inst.class_index = cls;

    const std::size_t coord_end = (kind == LabelKind::prediction) ? n - 1 : n;
    for (std::size_t i = 1; i < coord_end; i += 2) {
        const double x =
            parse_ratio_token(tokens[i], context, Errc::out_of_range_coordinate, "coordinate");
        const double y =
            parse_ratio_token(tokens[i + 1], context, Errc::out_of_range_coordinate, "coordinate");
        inst.polygon.vertices.push_back({x, y});
    }
    if (kind == LabelKind::prediction) {
        inst.confidence = parse_ratio_token(tokens[n - 1], context, Errc::out_of_range_coordinate,
                                            "confidence");
    }
    return inst;
}

void validate_for_write(const std::vector<YoloInstance>& instances) {
    bool any_conf = false;
    bool any_plain = false;
    for (const YoloInstance& inst : instances) {
        if (inst.class_index < 0 || inst.class_index >= kNumHeightClasses) {
            raise(Errc::out_of_range_class,
                  "class index " + std::to_string(inst.class_index) + " is not in 0..4");
        }
        if (inst.polygon.vertices.size() < 3) {
            raise(Errc::degenerate_polygon, "label polygon has fewer than 3 vertices");
        }
        for (const Point& v : inst.polygon.vertices) {
            if (!(v.x >= 0.0 && v.x <= 1.0 && v.y >= 0.0 && v.y <= 1.0)) {
                raise(Errc::out_of_range_coordinate, "label coordinate outside [0,1]");
            }
        }
        if (inst.confidence) {
            if (!(*inst.confidence >= 0.0 && *inst.confidence <= 1.0)) {
                raise(Errc::out_of_range_coordinate, "confidence outside [0,1]");
            }
            any_conf = true;
        } else {
            any_plain = true;
        }
    }
    if (any_conf && any_plain) {
        raise(Errc::mixed_kinds,
              "one file cannot mix instances with and without confidence");
    }
}

} // namespace

std::string format_label_lines(const std::vector<YoloInstance>& instances) {
    validate_for_write(instances);
    std::string out;
    for (const YoloInstance& inst : instances) {
        out += std::to_string(inst.class_index);
        for (const Point& v : inst.polygon.vertices) {
            out.push_back(' ');
            append_fixed6(out, v.x);
            out.push_back(' ');
            append_fixed6(out, v.y);
        }
        if (inst.confidence) {
            out.push_back(' ');
            append_fixed6(out, *inst.confidence);
        }
        out.push_back('\n');
    }
    return out;
}

void write_label_file(const std::vector<YoloInstance>& instances,
                      const std::filesystem::path& path) {
    const std::string text = format_label_lines(instances);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out || !(out << text) || !out.flush()) {
            raise(Errc::io_failure, "cannot write label file " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        raise(Errc::io_failure,
              "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::vector<YoloInstance> parse_label_text(std::string_view text, LabelKind kind,
                                           const std::string& context) {
    std::vector<YoloInstance> instances;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, eol - pos);
        ++line_no;
        if (!split_tokens(line).empty()) {
            instances.push_back(
                parse_line(line, kind, context + ":" + std::to_string(line_no)));
        }
        if (eol == text.size()) {
            break;
        }
        pos = eol + 1;
    }
    return instances;
}

std::vector<YoloInstance> parse_label_file(const std::filesystem::path& path, LabelKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(Errc::io_failure, "cannot open label file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_label_text(buf.str(), kind, path.filename().string());
}

std::uint64_t split_hash(std::string_view stem, std::uint64_t seed) {
    std::string input(stem);
    input += std::to_string(seed);
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char byte : input) {
        hash ^= byte;
        hash *= 1099511628211ULL;
    }
    return hash;
}

bool is_validation_stem(std::string_view stem, const SplitSpec& split) {
    const auto threshold = static_cast<std::uint64_t>(std::llround(split.val_fraction * 100.0));
    return split_hash(stem, split.seed) % 100 < threshold;
}

std::string ConversionReport::to_text() const {
    std::ostringstream out;
    out << "conversion report\n";
    out << "  images                     " << images_total << "\n";
    out << "  images (train)             " << images_train << "\n";
    out << "  images (val)               " << images_val << "\n";
    out << "  instances written          " << written << "\n";
    out << "  skipped (no valid samples) " << skipped_no_valid_samples << "\n";
    out << "  skipped (empty mask)       " << skipped_empty_mask << "\n";
    out << "  negative means clamped     " << clamped_negatives << "\n";
    out << "\n  class  range (m)  count  share\n";
    for (const HeightClassRange& range : height_class_ranges()) {
        const std::size_t count = class_counts[range.cls - 1];
        const double share = written > 0 ? 100.0 * static_cast<double>(count) / written : 0.0;
        char line[96];
        std::snprintf(line, sizeof(line), "  %-5d  %-9s  %-5zu  %.1f%%\n", range.cls,
                      range.range_text().c_str(), count, share);
        out << line;
    }
    for (const SkippedInstance& skip : skipped) {
        out << "  skipped: image " << skip.stem << " annotation " << skip.annotation_id << " ("
            << to_string(skip.reason) << ")\n";
    }
    return std::move(out).str();
}

ConversionReport convert_dataset(const DatasetIndex& index,
                                 const std::filesystem::path& raster_dir,
                                 const std::filesystem::path& out_dir, const SplitSpec& split) {
    const std::filesystem::path train_dir = out_dir / "labels" / "train";
    const std::filesystem::path val_dir = out_dir / "labels" / "val";
    std::error_code ec;
    std::filesystem::create_directories(train_dir, ec);
    if (!ec) {
        std::filesystem::create_directories(val_dir, ec);
    }
    if (ec) {
        raise(Errc::io_failure, "cannot create label directories under " + out_dir.string() +
                                    ": " + ec.message());
    }

    // Stable image order keeps the report and any error output reproducible.
    std::vector<const ImageRecord*> images;
    images.reserve(index.images().size());
    for (const ImageRecord& img : index.images()) {
        images.push_back(&img);
    }
    std::sort(images.begin(), images.end(),
              [](const ImageRecord* a, const ImageRecord* b) { return a->id < b->id; });

    ConversionReport report;
    report.images_total = images.size();
    for (const ImageRecord* img : images) {
        const std::string stem = image_stem(*img);
        const auto raster_path = find_by_stem(raster_dir, stem);
        if (!raster_path) {
            raise(Errc::io_failure,
                  "no raster with stem '" + stem + "' in " + raster_dir.string());
        }
        const HeightRaster raster = read_raster(*raster_path);

        std::vector<YoloInstance> lines;
        for (const AnnotationRecord* ann : index.annotations_for(img->id)) {
            InstanceEstimate est{HeightClass(1), {}};
            try {
                est = estimate_instance(*ann, raster, *img);
            } catch (const Error& e) {
                if (e.code() == Errc::no_valid_samples || e.code() == Errc::empty_mask) {
                    if (e.code() == Errc::no_valid_samples) {
                        ++report.skipped_no_valid_samples;
                    } else {
                        ++report.skipped_empty_mask;
                    }
                    report.skipped.push_back({stem, ann->id, e.code()});
                    continue;
                }
                throw;
            }
            if (est.estimate.clamped_negative) {
                ++report.clamped_negatives;
            }

            const Polygon* largest = &ann->parts.front();
            double largest_area = polygon_area(*largest);
            for (const Polygon& part : ann->parts) {
                const double area = polygon_area(part);
                if (area > largest_area) {
                    largest = &part;
                    largest_area = area;
                }
            }

            YoloInstance inst;
            inst.class_index = est.cls.label_index();
            inst.polygon = normalize(*largest, img->width, img->height);
            lines.push_back(std::move(inst));
            ++report.written;
            ++report.class_counts[est.cls.label_index()];
        }

        const bool val = is_validation_stem(stem, split);
        (val ? report.images_val : report.images_train) += 1;
        write_label_file(lines, (val ? val_dir : train_dir) / (stem + ".txt"));
    }
    return report;
}

} // namespace heightseg
