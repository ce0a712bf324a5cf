#include "heightseg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "heightseg/raster.hpp"
#include "json.hpp"

namespace heightseg {

namespace {

using nlohmann::json;

std::string annotation_context(const json& ann) {
    if (ann.contains("id") && ann["id"].is_number()) {
        return "annotation " + std::to_string(ann["id"].get<std::int64_t>());
    }
    return "annotation <missing id>";
}

Polygon parse_part(const json& flat, const std::string& ctx) {
    if (!flat.is_array()) {
        raise(Errc::malformed_document, ctx + ": segmentation part is not an array");
    }
    if (flat.size() % 2 != 0) {
        raise(Errc::malformed_document,
              ctx + ": segmentation vertex list has odd length " + std::to_string(flat.size()));
    }
    if (flat.size() < 6) {
        raise(Errc::degenerate_polygon,
              ctx + ": polygon has " + std::to_string(flat.size() / 2) + " vertices");
    }
    Polygon part;
    part.reserve(flat.size() / 2);
    for (std::size_t i = 0; i < flat.size(); i += 2) {
        if (!flat[i].is_number() || !flat[i + 1].is_number()) {
            raise(Errc::malformed_document, ctx + ": non-numeric vertex coordinate");
        }
        const double x = flat[i].get<double>();
        const double y = flat[i + 1].get<double>();
        if (!std::isfinite(x) || !std::isfinite(y)) {
            raise(Errc::malformed_document, ctx + ": non-finite vertex coordinate");
        }
        part.push_back({x, y});
    }
    return part;
}

std::int64_t require_int(const json& obj, const char* key, const std::string& ctx) {
    if (!obj.contains(key) || !obj[key].is_number_integer()) {
        raise(Errc::malformed_document, ctx + ": missing integer field '" + key + "'");
    }
    return obj[key].get<std::int64_t>();
}

} // namespace

DatasetIndex::DatasetIndex(std::vector<ImageRecord> images,
                           std::vector<AnnotationRecord> annotations)
    : images_(std::move(images)), annotations_(std::move(annotations)) {
    image_by_id_.reserve(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) {
        image_by_id_.emplace(images_[i].id, i);
    }
}

const ImageRecord* DatasetIndex::find_image(std::int64_t id) const {
    auto it = image_by_id_.find(id);
    return it == image_by_id_.end() ? nullptr : &images_[it->second];
}

std::vector<const AnnotationRecord*> DatasetIndex::annotations_for(std::int64_t image_id) const {
    std::vector<const AnnotationRecord*> out;
    for (const AnnotationRecord& ann : annotations_) {
        if (ann.image_id == image_id) {
            out.push_back(&ann);
        }
    }
    return out;
}

std::size_t DatasetIndex::part_count() const {
    std::size_t count = 0;
    for (const AnnotationRecord& ann : annotations_) {
        count += ann.parts.size();
    }
    return count;
}

DatasetIndex load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::io_failure, "cannot open annotation file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        raise(Errc::malformed_document, path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array() ||
        !doc.contains("annotations") || !doc["annotations"].is_array()) {
        raise(Errc::malformed_document,
              path.string() + ": document must carry 'images' and 'annotations' arrays");
    }

    std::vector<ImageRecord> images;
    images.reserve(doc["images"].size());
    std::unordered_map<std::int64_t, std::size_t> seen_ids;
    for (const json& img : doc["images"]) {
        ImageRecord rec;
        rec.id = require_int(img, "id", "image");
        const std::string ctx = "image " + std::to_string(rec.id);
        if (!img.contains("file_name") || !img["file_name"].is_string()) {
            raise(Errc::malformed_document, ctx + ": missing 'file_name'");
        }
        rec.file_name = img["file_name"].get<std::string>();
        rec.width = static_cast<int>(require_int(img, "width", ctx));
        rec.height = static_cast<int>(require_int(img, "height", ctx));
        if (rec.width <= 0 || rec.height <= 0) {
            raise(Errc::malformed_document, ctx + ": width and height must be positive");
        }
        if (!seen_ids.emplace(rec.id, images.size()).second) {
            raise(Errc::malformed_document, ctx + ": duplicate image id");
        }
        images.push_back(std::move(rec));
    }

    std::vector<AnnotationRecord> annotations;
    annotations.reserve(doc["annotations"].size());
    for (const json& ann : doc["annotations"]) {
        const std::string ctx = annotation_context(ann);
        AnnotationRecord rec;
        rec.id = require_int(ann, "id", ctx);
        rec.image_id = require_int(ann, "image_id", ctx);
        rec.source_category = require_int(ann, "category_id", ctx);
        if (seen_ids.find(rec.image_id) == seen_ids.end()) {
            raise(Errc::dangling_reference,
                  ctx + " references unknown image_id " + std::to_string(rec.image_id));
        }
        if (!ann.contains("segmentation")) {
            raise(Errc::malformed_document, ctx + ": missing 'segmentation'");
        }
        const json& seg = ann["segmentation"];
        if (seg.is_object()) {
            raise(Errc::unsupported_segmentation,
                  ctx + ": run-length-encoded segmentation is not supported");
        }
        if (!seg.is_array()) {
            raise(Errc::malformed_document, ctx + ": segmentation must be an array of polygons");
        }
        if (seg.empty()) {
            raise(Errc::degenerate_polygon, ctx + ": segmentation holds no polygon");
        }
        for (const json& part : seg) {
            rec.parts.push_back(parse_part(part, ctx));
        }
        annotations.push_back(std::move(rec));
    }

    return DatasetIndex(std::move(images), std::move(annotations));
}

void write_dataset(const DatasetIndex& index, const std::filesystem::path& path) {
    json doc;
    doc["images"] = json::array();
    for (const ImageRecord& img : index.images()) {
        doc["images"].push_back({{"id", img.id},
                                 {"file_name", img.file_name},
                                 {"width", img.width},
                                 {"height", img.height}});
    }
    doc["annotations"] = json::array();
    for (const AnnotationRecord& ann : index.annotations()) {
        json seg = json::array();
        for (const Polygon& part : ann.parts) {
            json flat = json::array();
            for (const Point& v : part) {
                flat.push_back(v.x);
                flat.push_back(v.y);
            }
            seg.push_back(std::move(flat));
        }
        doc["annotations"].push_back({{"id", ann.id},
                                      {"image_id", ann.image_id},
                                      {"category_id", ann.source_category},
                                      {"segmentation", std::move(seg)}});
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out || !(out << doc.dump(2) << '\n') || !out.flush()) {
        raise(Errc::io_failure, "cannot write annotation file " + path.string());
    }
}

std::string image_stem(const ImageRecord& image) {
    return std::filesystem::path(image.file_name).stem().string();
}

std::size_t ValidationReport::aligned_count() const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(),
        [](const AlignmentEntry& e) { return e.status == RasterStatus::aligned; }));
}

std::size_t ValidationReport::missing_count() const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(),
        [](const AlignmentEntry& e) { return e.status == RasterStatus::missing; }));
}

std::size_t ValidationReport::mismatch_count() const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(),
        [](const AlignmentEntry& e) { return e.status == RasterStatus::dimension_mismatch; }));
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    out << "alignment report: " << aligned_count() << " aligned, " << missing_count()
        << " missing, " << mismatch_count() << " dimension mismatch\n";
    for (const AlignmentEntry& e : entries) {
        out << "  " << e.stem << "  ";
        switch (e.status) {
            case RasterStatus::aligned: out << "aligned"; break;
            case RasterStatus::missing: out << "raster missing"; break;
            case RasterStatus::dimension_mismatch:
                out << "dimension mismatch (raster " << e.raster_width << "x" << e.raster_height
                    << ")";
                break;
        }
        if (e.out_of_bounds_vertices) {
            out << ", vertices outside image bounds";
        }
        out << '\n';
    }
    return std::move(out).str();
}

ValidationReport validate_alignment(const DatasetIndex& index,
                                    const std::filesystem::path& raster_dir) {
    ValidationReport report;
    report.entries.reserve(index.images().size());
    for (const ImageRecord& img : index.images()) {
        AlignmentEntry entry;
        entry.image_id = img.id;
        entry.stem = image_stem(img);
        for (const AnnotationRecord* ann : index.annotations_for(img.id)) {
            for (const Polygon& part : ann->parts) {
                for (const Point& v : part) {
                    if (v.x < 0.0 || v.x > img.width || v.y < 0.0 || v.y > img.height) {
                        entry.out_of_bounds_vertices = true;
                    }
                }
            }
        }
        if (auto path = find_by_stem(raster_dir, entry.stem)) {
            const HeightRaster raster = read_raster(*path);
            entry.raster_width = raster.width;
            entry.raster_height = raster.height;
            entry.status = (raster.width == img.width && raster.height == img.height)
                               ? RasterStatus::aligned
                               : RasterStatus::dimension_mismatch;
        } else {
            entry.status = RasterStatus::missing;
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

} // namespace heightseg
