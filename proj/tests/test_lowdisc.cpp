#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcm/errors.hpp"
#include "mcm/geometry.hpp"
#include "mcm/lowdisc.hpp"

using namespace mcm;

namespace {

std::vector<double> sorted_projection(const UnitPointSet& ps, int dim) {
    std::vector<double> v(ps.n_points);
    for (std::size_t n = 0; n < ps.n_points; ++n) v[n] = ps.at(0, n, dim);
    std::sort(v.begin(), v.end());
    return v;
}

// every value is k/2^m for consecutive k — exact comparison, all dyadic
bool is_full_dyadic_grid(const std::vector<double>& sorted_vals, int m) {
    const double n = std::ldexp(1.0, m);
    if (sorted_vals.size() != static_cast<std::size_t>(n)) return false;
    for (std::size_t k = 0; k < sorted_vals.size(); ++k)
        if (sorted_vals[k] != static_cast<double>(k) / n) return false;
    return true;
}

// counts of points per dyadic square of side 2^-k (first shift only)
std::vector<int> dyadic_square_counts(const UnitPointSet& ps, int k) {
    const int cells = 1 << k;
    std::vector<int> counts(cells * cells, 0);
    for (std::size_t n = 0; n < ps.n_points; ++n) {
        const int ix = static_cast<int>(ps.at(0, n, 0) * cells);
        const int iy = static_cast<int>(ps.at(0, n, 1) * cells);
        ++counts[ix * cells + iy];
    }
    return counts;
}

std::array<Triangle, 4> midpoint_children(const Triangle& t) {
    const Point a = t.v[0], b = t.v[1], c = t.v[2];
    const Point ab{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    const Point ac{0.5 * (a.x + c.x), 0.5 * (a.y + c.y)};
    const Point bc{0.5 * (b.x + c.x), 0.5 * (b.y + c.y)};
    return {Triangle({a, ab, ac}), Triangle({ab, b, bc}), Triangle({ac, bc, c}),
            Triangle({ab, bc, ac})};
}

} // namespace

TEST_CASE("kind names round-trip") {
    for (PointKind k : {PointKind::mc, PointKind::lattice, PointKind::sobol,
                        PointKind::sobol_interlaced_2, PointKind::sobol_interlaced_3})
        CHECK(kind_from_name(kind_name(k)) == k);
    CHECK(kind_from_name("sobol2") == PointKind::sobol_interlaced_2);
    CHECK(kind_from_name("sobol3") == PointKind::sobol_interlaced_3);
    CHECK_THROWS_AS(kind_from_name("halton"), ValidationError);
}

TEST_CASE("builtin tables validate and match the shipped data files") {
    const GeneratingVector& gv = builtin_generating_vector();
    CHECK_NOTHROW(gv.validate());
    CHECK(gv.max_log2 == 20);
    REQUIRE(gv.components.size() >= 2);
    CHECK(gv.components[0] == 1);
    CHECK(gv.components[1] == 364981);

    const DirectionNumbers& dn = builtin_direction_numbers();
    CHECK_NOTHROW(dn.validate());
    CHECK(dn.precision == 32);
    CHECK(dn.n_dims() >= 6);

    const GeneratingVector loaded_gv =
        load_generating_vector(std::string(MCM_DATA_DIR) + "/lattice_vector_m20.txt");
    CHECK(loaded_gv.max_log2 == gv.max_log2);
    CHECK(loaded_gv.components == gv.components);

    const DirectionNumbers loaded_dn =
        load_direction_numbers(std::string(MCM_DATA_DIR) + "/sobol_dirs_6d.txt");
    CHECK(loaded_dn.precision == dn.precision);
    CHECK(loaded_dn.columns == dn.columns);

    CHECK_THROWS_AS(load_generating_vector("/nonexistent/path.txt"), ParseError);
}

TEST_CASE("mc_uniform determinism and uniformity") {
    const UnitPointSet a = mc_uniform(1000, 42);
    const UnitPointSet b = mc_uniform(1000, 42);
    CHECK(a.pts == b.pts);
    const UnitPointSet c = mc_uniform(1000, 43);
    CHECK(a.pts != c.pts);

    int out_of_range = 0;
    for (double v : a.pts)
        if (!(v >= 0.0 && v < 1.0)) ++out_of_range;
    CHECK(out_of_range == 0);

    // sample mean within 4 sigma of a uniform mean
    const std::size_t n = std::size_t(1) << 14;
    const UnitPointSet big = mc_uniform(n, 7);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += big.at(0, i, 0);
        my += big.at(0, i, 1);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    const double bound = 4.0 / std::sqrt(12.0 * static_cast<double>(n));
    CHECK(std::abs(mx - 0.5) < bound);
    CHECK(std::abs(my - 0.5) < bound);

    // shifts are independent streams
    const UnitPointSet shifted = mc_uniform(100, 42, 3);
    CHECK(shifted.n_shifts == 3);
    CHECK(shifted.at(0, 0, 0) != shifted.at(1, 0, 0));
}

TEST_CASE("rank-1 lattice worked examples") {
    GeneratingVector unit{5, {1, 1}};
    const UnitPointSet d = rank1_lattice(2, unit, {0.0, 0.0});
    REQUIRE(d.n_points == 4);
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(d.at(0, n, 0) == static_cast<double>(n) / 4.0);
        CHECK(d.at(0, n, 1) == static_cast<double>(n) / 4.0);
    }

    GeneratingVector g13{5, {1, 3}};
    const UnitPointSet e = rank1_lattice(3, g13, {0.0, 0.0});
    CHECK(e.at(0, 0, 0) == 0.0); // first point is the origin
    CHECK(e.at(0, 0, 1) == 0.0);
    CHECK(e.at(0, 3, 0) == 0.375); // 3/8
    CHECK(e.at(0, 3, 1) == 0.125); // frac(9/8)

    // componentwise modulo-1 shift
    const UnitPointSet s = rank1_lattice(3, g13, {0.5, 0.25});
    CHECK(s.at(0, 3, 0) == 0.875);
    CHECK(s.at(0, 3, 1) == 0.375);

    CHECK_THROWS_AS(rank1_lattice(21, builtin_generating_vector(), {0.0, 0.0}),
                    MOutOfRange);
}

TEST_CASE("lattice shifts are deterministic in the seed") {
    const GeneratingVector& gv = builtin_generating_vector();
    const UnitPointSet a = rank1_lattice_shifted(6, gv, 99, 4);
    const UnitPointSet b = rank1_lattice_shifted(6, gv, 99, 4);
    CHECK(a.pts == b.pts);
    CHECK(a.n_shifts == 4);
    const UnitPointSet c = rank1_lattice_shifted(6, gv, 100, 4);
    CHECK(a.pts != c.pts);
    int out_of_range = 0;
    for (double v : a.pts)
        if (!(v >= 0.0 && v < 1.0)) ++out_of_range;
    CHECK(out_of_range == 0);
}

TEST_CASE("lattice points form a group under addition mod 1") {
    const UnitPointSet ps = rank1_lattice(8, builtin_generating_vector(), {0.0, 0.0});
    const std::size_t n = ps.n_points;
    int mismatches = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t k = (i + j) & (n - 1);
            for (int d = 0; d < 2; ++d) {
                double sum = ps.at(0, i, d) + ps.at(0, j, d);
                if (sum >= 1.0) sum -= 1.0; // exact: all values are dyadic k/2^8
                if (sum != ps.at(0, k, d)) ++mismatches;
            }
        }
    CHECK(mismatches == 0);
}

TEST_CASE("sobol worked examples") {
    const DirectionNumbers& dn = builtin_direction_numbers();
    const UnitPointSet ps = sobol(2, 2, dn);
    REQUIRE(ps.n_points == 4);
    // gray-code order
    CHECK(ps.at(0, 0, 0) == 0.0);
    CHECK(ps.at(0, 0, 1) == 0.0);
    CHECK(ps.at(0, 1, 0) == 0.5);
    CHECK(ps.at(0, 1, 1) == 0.5);
    CHECK(ps.at(0, 2, 0) == 0.75);
    CHECK(ps.at(0, 2, 1) == 0.25);
    CHECK(ps.at(0, 3, 0) == 0.25);
    CHECK(ps.at(0, 3, 1) == 0.75);

    CHECK_THROWS_AS(sobol(2, 7, dn), DimsOutOfRange);
    CHECK_THROWS_AS(sobol(2, 2, dn, 33), ValidationError);
}

TEST_CASE("one-dimensional projections fill the dyadic grid") {
    for (int m : {4, 8, 10}) {
        const UnitPointSet lat =
            rank1_lattice(m, builtin_generating_vector(), {0.0, 0.0});
        CHECK(is_full_dyadic_grid(sorted_projection(lat, 0), m));
        CHECK(is_full_dyadic_grid(sorted_projection(lat, 1), m));

        const UnitPointSet sob = sobol(m, 2, builtin_direction_numbers());
        CHECK(is_full_dyadic_grid(sorted_projection(sob, 0), m));
        CHECK(is_full_dyadic_grid(sorted_projection(sob, 1), m));
    }
}

TEST_CASE("dyadic equidistribution at m=10") {
    const int m = 10;
    const UnitPointSet sob = sobol(m, 2, builtin_direction_numbers());
    for (int k = 1; k <= 3; ++k) {
        const int expect = 1 << (m - 2 * k);
        int bad = 0;
        for (int c : dyadic_square_counts(sob, k))
            if (c != expect) ++bad;
        CHECK(bad == 0); // elementary-interval property of the net
    }

    const UnitPointSet lat = rank1_lattice(m, builtin_generating_vector(), {0.0, 0.0});
    // lattices carry the strip property at every resolution here ...
    for (int k = 1; k <= 3; ++k) {
        const int cells = 1 << k;
        std::vector<int> col(cells, 0), row(cells, 0);
        for (std::size_t n = 0; n < lat.n_points; ++n) {
            ++col[static_cast<int>(lat.at(0, n, 0) * cells)];
            ++row[static_cast<int>(lat.at(0, n, 1) * cells)];
        }
        int bad = 0;
        for (int c : col)
            if (c != static_cast<int>(lat.n_points) / cells) ++bad;
        for (int c : row)
            if (c != static_cast<int>(lat.n_points) / cells) ++bad;
        CHECK(bad == 0);
    }
    // ... and the square property at the coarsest level
    int bad = 0;
    for (int c : dyadic_square_counts(lat, 1))
        if (c != static_cast<int>(lat.n_points) / 4) ++bad;
    CHECK(bad == 0);
}

TEST_CASE("digit interlacing worked examples") {
    auto synth = [](int dims, int precision, std::vector<double> coords) {
        UnitPointSet ps;
        ps.kind = PointKind::sobol;
        ps.n_points = 1;
        ps.n_dims = dims;
        ps.n_shifts = 1;
        ps.precision = precision;
        ps.pts = std::move(coords);
        return ps;
    };

    // digit i of source k lands on output digit alpha*i+k
    const UnitPointSet a = interlace(synth(4, 26, {0.5, 0.0, 0.0, 0.0}), 2);
    CHECK(a.n_dims == 2);
    CHECK(a.kind == PointKind::sobol_interlaced_2);
    CHECK(a.at(0, 0, 0) == 0.5); // .10 in binary
    CHECK(a.at(0, 0, 1) == 0.0);

    const UnitPointSet b = interlace(synth(4, 26, {0.5, 0.5, 0.0, 0.0}), 2);
    CHECK(b.at(0, 0, 0) == 0.75); // .11 in binary

    const UnitPointSet c = interlace(synth(6, 17, {0.5, 0.5, 0.5, 0.0, 0.0, 0.0}), 3);
    CHECK(c.kind == PointKind::sobol_interlaced_3);
    CHECK(c.at(0, 0, 0) == 0.875); // .111 in binary

    // full production path stays inside the unit square
    const DirectionNumbers& dn = builtin_direction_numbers();
    const UnitPointSet prod = interlace(sobol(8, 4, dn, 26), 2);
    int out_of_range = 0;
    for (double v : prod.pts)
        if (!(v >= 0.0 && v < 1.0)) ++out_of_range;
    CHECK(out_of_range == 0);

    CHECK_THROWS_AS(interlace(mc_uniform(4, 1), 2), KindMismatch);
    CHECK_THROWS_AS(interlace(synth(2, 26, {0.5, 0.5}), 2), DimsOutOfRange);
    CHECK_THROWS_AS(interlace(sobol(2, 4, dn, 27), 2), PrecisionOverflow);
    CHECK_THROWS_AS(interlace(sobol(2, 4, dn, 26), 4), ValidationError);
}

TEST_CASE("digital shift involution and equidistribution") {
    const DirectionNumbers& dn = builtin_direction_numbers();
    const UnitPointSet base = sobol(10, 2, dn);
    const UnitPointSet once = digital_shift(base, 314);
    CHECK(once.pts != base.pts);
    const UnitPointSet twice = digital_shift(once, 314);
    CHECK(twice.pts == base.pts); // XOR with the same mask is an involution

    // a digital shift preserves base-2 equidistribution: 16 bins of 64 each
    for (int d = 0; d < 2; ++d) {
        std::vector<int> bins(16, 0);
        for (std::size_t n = 0; n < once.n_points; ++n)
            ++bins[static_cast<int>(once.at(0, n, d) * 16.0)];
        int bad = 0;
        for (int c : bins)
            if (c != 64) ++bad;
        CHECK(bad == 0);
    }

    CHECK_THROWS_AS(
        digital_shift(rank1_lattice(4, builtin_generating_vector(), {0, 0}), 1),
        KindMismatch);
    CHECK_NOTHROW(digital_shift(interlace(sobol(4, 4, dn, 26), 2), 5));
}

TEST_CASE("triangle map fixes the first vertex at u=(0,0)") {
    const Triangle tri({Point{1.0, 2.0}, Point{4.0, 2.5}, Point{2.0, 5.0}});
    const Point p = map_to_triangle({0.0, 0.0}, tri);
    // depth-26 cell around the repeated first-corner choice
    CHECK(std::abs(p.x - tri.v[0].x) < 1e-6);
    CHECK(std::abs(p.y - tri.v[0].y) < 1e-6);
    CHECK(contains(tri, p));
    CHECK_THROWS_AS(map_to_triangle({0.0, 0.0}, tri, 0), ValidationError);
}

TEST_CASE("triangle map is measure preserving") {
    const Triangle tri({Point{0.0, 0.0}, Point{3.0, 0.5}, Point{1.0, 2.0}});
    const UnitPointSet sob = sobol(12, 2, builtin_direction_numbers());

    std::vector<Point> mapped(sob.n_points);
    int outside = 0;
    double mx = 0.0, my = 0.0;
    for (std::size_t n = 0; n < sob.n_points; ++n) {
        mapped[n] = map_to_triangle({sob.at(0, n, 0), sob.at(0, n, 1)}, tri);
        if (!contains(tri, mapped[n])) ++outside;
        mx += mapped[n].x;
        my += mapped[n].y;
    }
    CHECK(outside == 0);

    // mean close to the centroid
    mx /= static_cast<double>(sob.n_points);
    my /= static_cast<double>(sob.n_points);
    const double cx = (tri.v[0].x + tri.v[1].x + tri.v[2].x) / 3.0;
    const double cy = (tri.v[0].y + tri.v[1].y + tri.v[2].y) / 3.0;
    const double edge = std::hypot(tri.v[1].x - tri.v[0].x, tri.v[1].y - tri.v[0].y);
    CHECK(std::abs(mx - cx) < 1e-3 * edge);
    CHECK(std::abs(my - cy) < 1e-3 * edge);

    // depth-2 subdivision: every one of the 16 equal-area cells holds exactly
    // n/16 points, so the chi-square statistic is 0 (well under the 0.999
    // critical value 37.697 at 15 degrees of freedom)
    std::vector<Triangle> cells;
    for (const Triangle& child : midpoint_children(tri))
        for (const Triangle& grandchild : midpoint_children(child))
            cells.push_back(grandchild);
    REQUIRE(cells.size() == 16);
    std::vector<int> counts(16, 0);
    int unassigned = 0;
    for (const Point& p : mapped) {
        bool found = false;
        for (std::size_t c = 0; c < cells.size() && !found; ++c)
            if (contains(cells[c], p)) {
                ++counts[c];
                found = true;
            }
        if (!found) ++unassigned;
    }
    CHECK(unassigned == 0);
    const double expect = static_cast<double>(sob.n_points) / 16.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 37.697);
    CHECK(counts == std::vector<int>(16, 256));
}

TEST_CASE("triangle map commutes with translation") {
    const Triangle tri({Point{0.0, 0.0}, Point{2.0, 0.0}, Point{0.5, 1.5}});
    const Triangle moved({Point{10.0, -3.0}, Point{12.0, -3.0}, Point{10.5, -1.5}});
    for (Point u : {Point{0.3, 0.7}, Point{0.95, 0.05}, Point{0.5, 0.5}}) {
        const Point p = map_to_triangle(u, tri);
        const Point q = map_to_triangle(u, moved);
        CHECK(q.x - 10.0 == doctest::Approx(p.x).epsilon(1e-12));
        CHECK(q.y + 3.0 == doctest::Approx(p.y).epsilon(1e-12));
    }
}

TEST_CASE("quad point sets split by area") {
    const ConvexQuad square({Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}});
    const UnitPointSet even = quad_point_set(PointKind::sobol, 10, square, 5);
    CHECK(even.kind == PointKind::triangle_mapped);
    CHECK(even.quad_base == PointKind::sobol);
    REQUIRE(even.n_points == 1024);
    REQUIRE(even.tri_index.size() == even.n_points);
    int first = 0;
    for (std::uint8_t t : even.tri_index)
        if (t == 0) ++first;
    CHECK(first == 512);

    int outside = 0;
    for (std::size_t n = 0; n < even.n_points; ++n)
        if (!contains(square, Point{even.at(0, n, 0), even.at(0, n, 1)})) ++outside;
    CHECK(outside == 0);

    // triangle areas 3 : 1 -> counts 12 and 4 at 16 points total
    const ConvexQuad skew(
        {Point{0, 0}, Point{3, 0}, Point{3, 2}, Point{0, 2.0 / 3.0}});
    const UnitPointSet prop = quad_point_set(PointKind::mc, 4, skew, 5);
    REQUIRE(prop.n_points == 16);
    first = 0;
    for (std::uint8_t t : prop.tri_index)
        if (t == 0) ++first;
    CHECK(first == 12);

    // deterministic, and distinct streams per triangle
    const UnitPointSet again = quad_point_set(PointKind::mc, 4, skew, 5);
    CHECK(prop.pts == again.pts);
    const UnitPointSet other = quad_point_set(PointKind::mc, 4, skew, 6);
    CHECK(prop.pts != other.pts);

    // shifted lattice variant keeps the same layout contract
    const UnitPointSet lat = quad_point_set(PointKind::lattice, 6, square, 9, 3);
    CHECK(lat.n_shifts == 3);
    CHECK(lat.n_points == 64);
    outside = 0;
    for (int r = 0; r < 3; ++r)
        for (std::size_t n = 0; n < lat.n_points; ++n)
            if (!contains(square, Point{lat.at(r, n, 0), lat.at(r, n, 1)})) ++outside;
    CHECK(outside == 0);

    CHECK_THROWS_AS(quad_point_set(PointKind::triangle_mapped, 4, square, 1),
                    KindMismatch);
}

TEST_CASE("mission-level dispatcher") {
    const GeneratingVector& gv = builtin_generating_vector();
    const DirectionNumbers& dn = builtin_direction_numbers();
    struct Want { PointKind kind; int dims; };
    const Want wants[] = {
        {PointKind::mc, 2},
        {PointKind::lattice, 2},
        {PointKind::sobol, 2},
        {PointKind::sobol_interlaced_2, 2},
        {PointKind::sobol_interlaced_3, 2},
    };
    for (const Want& w : wants) {
        const UnitPointSet ps = make_point_set(w.kind, 7, 11, 4, gv, dn);
        CHECK(ps.kind == w.kind);
        CHECK(ps.n_points == 128);
        CHECK(ps.n_shifts == 4);
        CHECK(ps.n_dims == w.dims);
        int out_of_range = 0;
        for (double v : ps.pts)
            if (!(v >= 0.0 && v < 1.0)) ++out_of_range;
        CHECK(out_of_range == 0);
        // reproducible
        const UnitPointSet ps2 = make_point_set(w.kind, 7, 11, 4, gv, dn);
        CHECK(ps.pts == ps2.pts);
    }
    CHECK_THROWS_AS(make_point_set(PointKind::triangle_mapped, 7, 11, 4, gv, dn),
                    KindMismatch);
}
