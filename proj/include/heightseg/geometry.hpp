#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "heightseg/error.hpp"

namespace heightseg {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Closed polygon in pixel coordinates; last vertex connects back to the first.
using Polygon = std::vector<Point>;

/// Polygon with every coordinate in [0,1].
struct NormalizedPolygon {
    std::vector<Point> vertices;
    friend bool operator==(const NormalizedPolygon&, const NormalizedPolygon&) = default;
};

struct BBox {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;
    double area() const { return (xmax - xmin) * (ymax - ymin); }
};

/// Row-major binary grid; one cell per pixel.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    bool test(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col) { bits_[index(row, col)] = 1; }
    std::size_t set_count() const;
    const std::vector<std::uint8_t>& bits() const { return bits_; }

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width_ + col;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Maps vertices by (x/width, y/height) and clamps the result into [0,1].
NormalizedPolygon normalize(const Polygon& polygon, int width, int height);

/// Scales a normalized polygon back to pixel coordinates.
Polygon denormalize(const NormalizedPolygon& polygon, int width, int height);

/// Fills the union of the parts. A pixel (row, col) is set iff its center
/// (col + 0.5, row + 0.5) is inside some part under the even-odd rule.
/// Edges are treated as half-open in y ([ymin, ymax)), so shared edges of
/// adjacent polygons never double-set or drop a scanline.
BinaryMask rasterize(const std::vector<Polygon>& parts, int width, int height);

/// Absolute shoelace area, winding-independent.
double polygon_area(const Polygon& polygon);

/// Tight axis-aligned bounds over all vertices of all parts.
BBox bbox_of(const std::vector<Polygon>& parts);

/// Intersection over union of two boxes; 0 when the union is empty.
double box_iou(const BBox& a, const BBox& b);

/// |a AND b| / |a OR b|; 0 when both masks are empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

} // namespace heightseg
