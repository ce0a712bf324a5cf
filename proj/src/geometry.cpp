#include "heightseg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heightseg {

namespace {

void require_part(const Polygon& part) {
    if (part.size() < 3) {
        raise(Errc::degenerate_polygon, "polygon has " + std::to_string(part.size()) +
                                            " vertices, need at least 3");
    }
}

} // namespace

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {}

std::size_t BinaryMask::set_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t(1)));
}

NormalizedPolygon normalize(const Polygon& polygon, int width, int height) {
    if (width <= 0 || height <= 0) {
        raise(Errc::zero_dimension, "normalize requires positive image dimensions");
    }
    require_part(polygon);
    NormalizedPolygon out;
    out.vertices.reserve(polygon.size());
    for (const Point& v : polygon) {
        out.vertices.push_back({std::clamp(v.x / width, 0.0, 1.0),
                                std::clamp(v.y / height, 0.0, 1.0)});
    }
    return out;
}

Polygon denormalize(const NormalizedPolygon& polygon, int width, int height) {
    Polygon out;
    out.reserve(polygon.vertices.size());
    for (const Point& v : polygon.vertices) {
        out.push_back({v.x * width, v.y * height});
    }
    return out;
}

BinaryMask rasterize(const std::vector<Polygon>& parts, int width, int height) {
    if (width <= 0 || height <= 0) {
        raise(Errc::zero_dimension, "rasterize requires positive mask dimensions");
    }
    for (const Polygon& part : parts) {
        require_part(part);
    }

    BinaryMask mask(width, height);
    std::vector<double> crossings;
    for (int row = 0; row < height; ++row) {
        const double y = row + 0.5;
        for (const Polygon& part : parts) {
            crossings.clear();
            const std::size_t n = part.size();
            for (std::size_t i = 0; i < n; ++i) {
                Point a = part[i];
                Point b = part[(i + 1) % n];
                if (a.y == b.y) {
                    continue;
                }
                if (b.y < a.y) {
                    std::swap(a, b);
                }
                if (!(a.y <= y && y < b.y)) {
                    continue;
                }
                crossings.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
            if (crossings.empty()) {
                continue;
            }
            std::sort(crossings.begin(), crossings.end());
            // A center is inside when an odd number of crossings lie strictly
            // to its right; walk the sorted crossings once per row.
            std::size_t idx = 0;
            for (int col = 0; col < width; ++col) {
                const double px = col + 0.5;
                while (idx < crossings.size() && crossings[idx] <= px) {
                    ++idx;
                }
                if ((crossings.size() - idx) & 1U) {
                    mask.set(row, col);
                }
            }
        }
    }
    return mask;
}

double polygon_area(const Polygon& polygon) {
    require_part(polygon);
    double twice = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = polygon[i];
        const Point& b = polygon[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return std::abs(twice) / 2.0;
}

BBox bbox_of(const std::vector<Polygon>& parts) {
    if (parts.empty()) {
        raise(Errc::degenerate_polygon, "bbox_of requires at least one part");
    }
    BBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Polygon& part : parts) {
        require_part(part);
        for (const Point& v : part) {
            box.xmin = std::min(box.xmin, v.x);
            box.ymin = std::min(box.ymin, v.y);
            box.xmax = std::max(box.xmax, v.x);
            box.ymax = std::max(box.ymax, v.y);
        }
    }
    return box;
}

double box_iou(const BBox& a, const BBox& b) {
    const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
    const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
    const double inter = std::max(0.0, iw) * std::max(0.0, ih);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        raise(Errc::dimension_mismatch, "mask_iou requires equal mask dimensions");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    const auto& ab = a.bits();
    const auto& bb = b.bits();
    for (std::size_t i = 0; i < ab.size(); ++i) {
        inter += ab[i] & bb[i];
        uni += ab[i] | bb[i];
    }
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

} // namespace heightseg
