#pragma once
#include <array>
#include <variant>

namespace mcm {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Axis-aligned rectangle, lo < hi componentwise.
struct Rect {
    Point lo;
    Point hi;
    Rect(Point lo_, Point hi_);
};

// Strictly convex quadrilateral, vertices in counter-clockwise order.
struct ConvexQuad {
    std::array<Point, 4> v;
    explicit ConvexQuad(const std::array<Point, 4>& vertices);
};

// Counter-clockwise triangle (signed area > 0).
struct Triangle {
    std::array<Point, 3> v;
    explicit Triangle(const std::array<Point, 3>& vertices);
};

using Shape = std::variant<Rect, ConvexQuad>;

// A search domain plus the per-step inflation vector used by the relaxation
// loop. Inflation must be positive and small against the domain extent.
struct DomainSpec {
    Shape shape;
    Point inflation;
    DomainSpec(Shape shape_, Point inflation_);
};

double area(const Rect& r);
double area(const ConvexQuad& q);
double area(const Triangle& t);
double area(const Shape& s);

// One inflation step: rectangles grow by the inflation vector on every side;
// quads move each vertex away from the vertex centroid by the signed
// inflation. Throws InflationBreaksConvexity if the quad rule degenerates.
DomainSpec inflate(const DomainSpec& d);

// Split along the v0-v2 diagonal; both halves counter-clockwise.
std::pair<Triangle, Triangle> triangulate(const ConvexQuad& q);

// Closed containment (boundary counts as inside).
bool contains(const Rect& r, Point p);
bool contains(const ConvexQuad& q, Point p);
bool contains(const Triangle& t, Point p);
bool contains(const Shape& s, Point p);

// Componentwise affine map of a unit-square point onto a rectangle.
Point map_unit_to_rect(Point u, const Rect& r);

// Axis-aligned bounding box (identity for Rect).
Rect bounding_box(const Shape& s);

} // namespace mcm
