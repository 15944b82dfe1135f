#include "mcm/geometry.hpp"
#include "mcm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mcm {

namespace {

double cross(Point o, Point a, Point b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double signed_area(const std::array<Point, 3>& v) {
    return 0.5 * cross(v[0], v[1], v[2]);
}

bool strictly_convex_ccw(const std::array<Point, 4>& v) {
    for (int i = 0; i < 4; ++i) {
        if (cross(v[i], v[(i + 1) % 4], v[(i + 2) % 4]) <= 0.0) return false;
    }
    return true;
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

} // namespace

Rect::Rect(Point lo_, Point hi_) : lo(lo_), hi(hi_) {
    if (!(lo.x < hi.x) || !(lo.y < hi.y))
        throw ValidationError("Rect: lo must be strictly below hi in both coordinates");
}

ConvexQuad::ConvexQuad(const std::array<Point, 4>& vertices) : v(vertices) {
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (v[i].x == v[j].x && v[i].y == v[j].y)
                throw ValidationError("ConvexQuad: repeated vertex");
    if (!strictly_convex_ccw(v))
        throw ValidationError("ConvexQuad: vertices must be strictly convex counter-clockwise");
}

Triangle::Triangle(const std::array<Point, 3>& vertices) : v(vertices) {
    if (signed_area(v) <= 0.0)
        throw ValidationError("Triangle: vertices must be counter-clockwise with positive area");
}

DomainSpec::DomainSpec(Shape shape_, Point inflation_)
    : shape(std::move(shape_)), inflation(inflation_) {
    if (!(inflation.x > 0.0) || !(inflation.y > 0.0))
        throw ValidationError("DomainSpec: inflation components must be positive");
    const Rect bb = bounding_box(shape);
    const double ex = bb.hi.x - bb.lo.x, ey = bb.hi.y - bb.lo.y;
    if (inflation.x >= 0.1 * ex || inflation.y >= 0.1 * ey)
        throw ValidationError("DomainSpec: inflation must be below 0.1 of the domain extent");
}

double area(const Rect& r) { return (r.hi.x - r.lo.x) * (r.hi.y - r.lo.y); }

double area(const Triangle& t) { return signed_area(t.v); }

double area(const ConvexQuad& q) {
    auto [a, b] = triangulate(q);
    return area(a) + area(b);
}

double area(const Shape& s) {
    return std::visit([](const auto& sh) { return area(sh); }, s);
}

DomainSpec inflate(const DomainSpec& d) {
    if (const Rect* r = std::get_if<Rect>(&d.shape)) {
        Rect grown({r->lo.x - d.inflation.x, r->lo.y - d.inflation.y},
                   {r->hi.x + d.inflation.x, r->hi.y + d.inflation.y});
        return DomainSpec(grown, d.inflation);
    }
    const ConvexQuad& q = std::get<ConvexQuad>(d.shape);
    Point c{(q.v[0].x + q.v[1].x + q.v[2].x + q.v[3].x) / 4.0,
            (q.v[0].y + q.v[1].y + q.v[2].y + q.v[3].y) / 4.0};
    std::array<Point, 4> moved{};
    for (int i = 0; i < 4; ++i) {
        moved[i] = {q.v[i].x + d.inflation.x * sgn(q.v[i].x - c.x),
                    q.v[i].y + d.inflation.y * sgn(q.v[i].y - c.y)};
    }
    if (!strictly_convex_ccw(moved))
        throw InflationBreaksConvexity("inflate: displaced quad vertices are no longer convex");
    return DomainSpec(ConvexQuad(moved), d.inflation);
}

std::pair<Triangle, Triangle> triangulate(const ConvexQuad& q) {
    return {Triangle({q.v[0], q.v[1], q.v[2]}), Triangle({q.v[0], q.v[2], q.v[3]})};
}

bool contains(const Rect& r, Point p) {
    return p.x >= r.lo.x && p.x <= r.hi.x && p.y >= r.lo.y && p.y <= r.hi.y;
}

bool contains(const ConvexQuad& q, Point p) {
    for (int i = 0; i < 4; ++i)
        if (cross(q.v[i], q.v[(i + 1) % 4], p) < 0.0) return false;
    return true;
}

bool contains(const Triangle& t, Point p) {
    for (int i = 0; i < 3; ++i)
        if (cross(t.v[i], t.v[(i + 1) % 3], p) < 0.0) return false;
    return true;
}

bool contains(const Shape& s, Point p) {
    return std::visit([p](const auto& sh) { return contains(sh, p); }, s);
}

Point map_unit_to_rect(Point u, const Rect& r) {
    return {r.lo.x + u.x * (r.hi.x - r.lo.x), r.lo.y + u.y * (r.hi.y - r.lo.y)};
}

Rect bounding_box(const Shape& s) {
    if (const Rect* r = std::get_if<Rect>(&s)) return *r;
    const ConvexQuad& q = std::get<ConvexQuad>(s);
    double xlo = q.v[0].x, xhi = q.v[0].x, ylo = q.v[0].y, yhi = q.v[0].y;
    for (int i = 1; i < 4; ++i) {
        xlo = std::min(xlo, q.v[i].x);
        xhi = std::max(xhi, q.v[i].x);
        ylo = std::min(ylo, q.v[i].y);
        yhi = std::max(yhi, q.v[i].y);
    }
    return Rect({xlo, ylo}, {xhi, yhi});
}

} // namespace mcm
