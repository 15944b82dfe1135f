#include "mcm/lowdisc.hpp"
#include "mcm/errors.hpp"
#include "mcm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mcm {

std::string kind_name(PointKind k) {
    switch (k) {
        case PointKind::mc: return "mc";
        case PointKind::lattice: return "lattice";
        case PointKind::sobol: return "sobol";
        case PointKind::sobol_interlaced_2: return "sobol2";
        case PointKind::sobol_interlaced_3: return "sobol3";
        case PointKind::triangle_mapped: return "triangle_mapped";
    }
    return "?";
}

PointKind kind_from_name(const std::string& name) {
    if (name == "mc") return PointKind::mc;
    if (name == "lattice") return PointKind::lattice;
    if (name == "sobol") return PointKind::sobol;
    if (name == "sobol2") return PointKind::sobol_interlaced_2;
    if (name == "sobol3") return PointKind::sobol_interlaced_3;
    if (name == "triangle_mapped") return PointKind::triangle_mapped;
    throw ValidationError("unknown point-set kind: " + name);
}

void GeneratingVector::validate() const {
    if (components.size() < 2)
        throw ValidationError("generating vector: need at least 2 components");
    if (max_log2 < 1 || max_log2 > 62)
        throw ValidationError("generating vector: max_log2 out of range");
    for (std::uint32_t z : components) {
        if ((z & 1u) == 0)
            throw ValidationError("generating vector: components must be odd");
        if (static_cast<std::uint64_t>(z) >= (1ull << max_log2))
            throw ValidationError("generating vector: component exceeds 2^max_log2");
    }
}

void DirectionNumbers::validate() const {
    if (precision < 32 || precision > 62)
        throw ValidationError("direction numbers: precision out of range");
    if (columns.size() < 6)
        throw ValidationError("direction numbers: need at least 6 dimensions");
    for (const auto& dim : columns) {
        if (dim.size() != static_cast<std::size_t>(precision))
            throw ValidationError("direction numbers: wrong column count");
        for (int j = 1; j <= precision; ++j) {
            const std::uint64_t v = dim[j - 1];
            const int shift = precision - j;
            if ((v & ((1ull << shift) - 1)) != 0)
                throw ValidationError("direction numbers: column has digits past its row");
            if (((v >> shift) & 1ull) == 0)
                throw ValidationError("direction numbers: diagonal digit not set");
            if (v >> precision)
                throw ValidationError("direction numbers: column exceeds precision");
        }
    }
}

namespace {

// Columns for one dimension from a primitive-polynomial row (s, a, m_initial):
// m_k = 2 a_1 m_{k-1} ^ 4 a_2 m_{k-2} ^ ... ^ 2^s m_{k-s} ^ m_{k-s}.
std::vector<std::uint64_t> dim_columns(int s, std::uint32_t a,
                                       std::vector<std::uint64_t> m, int precision) {
    m.reserve(precision);
    for (int k = static_cast<int>(m.size()); k < precision; ++k) {
        std::uint64_t val = (m[k - s] << s) ^ m[k - s];
        for (int i = 1; i < s; ++i)
            if ((a >> (s - 1 - i)) & 1u) val ^= m[k - i] << i;
        m.push_back(val);
    }
    std::vector<std::uint64_t> cols(precision);
    for (int j = 1; j <= precision; ++j) cols[j - 1] = m[j - 1] << (precision - j);
    return cols;
}

} // namespace

const GeneratingVector& builtin_generating_vector() {
    // First 10 components of a published base-2 CBC-constructed vector
    // (order-2 weighted construction, tabulated to 2^20 points); only the
    // first two drive the planar estimator.
    static const GeneratingVector gv = [] {
        GeneratingVector g;
        g.max_log2 = 20;
        g.components = {1,      364981, 245389, 97823,  488939,
                        62609,  400749, 385317, 21281,  223487};
        g.validate();
        return g;
    }();
    return gv;
}

const DirectionNumbers& builtin_direction_numbers() {
    // Six dimensions: van der Corput identity plus five standard
    // primitive-polynomial rows (the classic tabulated values).
    static const DirectionNumbers dn = [] {
        DirectionNumbers d;
        d.precision = 32;
        d.columns.resize(6);
        std::vector<std::uint64_t> ident(32);
        for (int j = 1; j <= 32; ++j) ident[j - 1] = 1ull << (32 - j);
        d.columns[0] = ident;
        d.columns[1] = dim_columns(1, 0, {1}, 32);
        d.columns[2] = dim_columns(2, 1, {1, 3}, 32);
        d.columns[3] = dim_columns(3, 1, {1, 3, 1}, 32);
        d.columns[4] = dim_columns(3, 2, {1, 1, 1}, 32);
        d.columns[5] = dim_columns(4, 1, {1, 1, 3, 3}, 32);
        d.validate();
        return d;
    }();
    return dn;
}

namespace {

// Shared reader: skips blank lines and '#' comments, yields whitespace-split
// integer tokens line by line.
std::vector<std::vector<std::uint64_t>> read_int_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open data file: " + path);
    std::vector<std::vector<std::uint64_t>> lines;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<std::uint64_t> vals;
        std::uint64_t v;
        while (ss >> v) vals.push_back(v);
        if (!ss.eof()) throw ParseError("non-integer token in " + path + ": " + line);
        if (!vals.empty()) lines.push_back(std::move(vals));
    }
    return lines;
}

} // namespace

GeneratingVector load_generating_vector(const std::string& path) {
    const auto lines = read_int_lines(path);
    if (lines.empty() || lines[0].size() != 1)
        throw ParseError(path + ": expected a single-integer header line with max_log2");
    GeneratingVector g;
    g.max_log2 = static_cast<int>(lines[0][0]);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].size() != 1)
            throw ParseError(path + ": expected one component per line");
        g.components.push_back(static_cast<std::uint32_t>(lines[i][0]));
    }
    g.validate();
    return g;
}

DirectionNumbers load_direction_numbers(const std::string& path) {
    const auto lines = read_int_lines(path);
    if (lines.empty() || lines[0].size() != 2)
        throw ParseError(path + ": expected header line 'precision n_dims'");
    DirectionNumbers d;
    d.precision = static_cast<int>(lines[0][0]);
    const std::size_t dims = lines[0][1];
    if (lines.size() != 1 + dims * static_cast<std::size_t>(d.precision))
        throw ParseError(path + ": wrong number of column lines");
    d.columns.resize(dims);
    std::size_t idx = 1;
    for (std::size_t dim = 0; dim < dims; ++dim) {
        d.columns[dim].resize(d.precision);
        for (int j = 0; j < d.precision; ++j, ++idx) {
            if (lines[idx].size() != 1)
                throw ParseError(path + ": expected one column integer per line");
            d.columns[dim][j] = lines[idx][0];
        }
    }
    d.validate();
    return d;
}

UnitPointSet mc_uniform(std::size_t n, std::uint64_t seed, int n_shifts) {
    if (n < 1) throw ValidationError("mc_uniform: need at least one point");
    if (n_shifts < 1) throw ValidationError("mc_uniform: need at least one shift");
    UnitPointSet ps;
    ps.kind = PointKind::mc;
    ps.n_points = n;
    ps.n_dims = 2;
    ps.n_shifts = n_shifts;
    ps.precision = 53;
    ps.seed = seed;
    ps.pts.resize(static_cast<std::size_t>(n_shifts) * n * 2);
    for (int r = 0; r < n_shifts; ++r) {
        const std::uint64_t stream = counter_u64(seed, static_cast<std::uint64_t>(r));
        for (std::size_t i = 0; i < n; ++i) {
            ps.pts[(static_cast<std::size_t>(r) * n + i) * 2 + 0] =
                counter_unit(stream, 2 * i);
            ps.pts[(static_cast<std::size_t>(r) * n + i) * 2 + 1] =
                counter_unit(stream, 2 * i + 1);
        }
    }
    return ps;
}

UnitPointSet rank1_lattice(int m, const GeneratingVector& gen, Point shift) {
    gen.validate();
    if (m < 0 || m > gen.max_log2)
        throw MOutOfRange("rank1_lattice: m must lie in [0, " +
                          std::to_string(gen.max_log2) + "]");
    const std::uint64_t n = 1ull << m;
    UnitPointSet ps;
    ps.kind = PointKind::lattice;
    ps.n_points = n;
    ps.n_dims = 2;
    ps.n_shifts = 1;
    ps.precision = std::max(m, 1);
    ps.pts.resize(n * 2);
    const std::uint64_t z0 = gen.components[0], z1 = gen.components[1];
    const double scale = 1.0 / static_cast<double>(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double x = static_cast<double>((i * z0) & (n - 1)) * scale + shift.x;
        double y = static_cast<double>((i * z1) & (n - 1)) * scale + shift.y;
        x -= std::floor(x);
        y -= std::floor(y);
        ps.pts[i * 2 + 0] = x;
        ps.pts[i * 2 + 1] = y;
    }
    return ps;
}

UnitPointSet rank1_lattice_shifted(int m, const GeneratingVector& gen,
                                   std::uint64_t seed, int n_shifts) {
    if (n_shifts < 1) throw ValidationError("rank1_lattice_shifted: need n_shifts >= 1");
    UnitPointSet out;
    for (int r = 0; r < n_shifts; ++r) {
        const Point delta{counter_unit(seed, 2 * static_cast<std::uint64_t>(r)),
                          counter_unit(seed, 2 * static_cast<std::uint64_t>(r) + 1)};
        UnitPointSet one = rank1_lattice(m, gen, delta);
        if (r == 0) {
            out = std::move(one);
            out.pts.reserve(out.pts.size() * n_shifts);
        } else {
            out.pts.insert(out.pts.end(), one.pts.begin(), one.pts.end());
        }
    }
    out.n_shifts = n_shifts;
    out.seed = seed;
    return out;
}

UnitPointSet sobol(int m, int dims, const DirectionNumbers& dirs, int precision) {
    dirs.validate();
    if (dims < 1 || static_cast<std::size_t>(dims) > dirs.n_dims())
        throw DimsOutOfRange("sobol: dims must lie in [1, " +
                             std::to_string(dirs.n_dims()) + "]");
    if (m < 0 || m > 32) throw MOutOfRange("sobol: m must lie in [0, 32]");
    if (precision == 0) precision = dirs.precision;
    if (precision < 1 || precision > dirs.precision)
        throw ValidationError("sobol: precision must lie in [1, table precision]");

    const std::size_t n = std::size_t{1} << m;
    UnitPointSet ps;
    ps.kind = PointKind::sobol;
    ps.n_points = n;
    ps.n_dims = dims;
    ps.n_shifts = 1;
    ps.precision = precision;
    ps.pts.resize(n * static_cast<std::size_t>(dims));

    // Truncate table columns to the requested precision (drop digits past it).
    const int drop = dirs.precision - precision;
    std::vector<std::vector<std::uint64_t>> v(dims);
    for (int d = 0; d < dims; ++d) {
        v[d].resize(precision);
        for (int j = 0; j < precision; ++j) v[d][j] = dirs.columns[d][j] >> drop;
    }

    const double scale = std::ldexp(1.0, -precision);
    std::vector<std::uint64_t> state(dims, 0);
    for (int d = 0; d < dims; ++d) ps.pts[d] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        int c = 0; // index of the lowest set bit of i (gray-code ordering)
        while (!((i >> c) & 1u)) ++c;
        for (int d = 0; d < dims; ++d) {
            state[d] ^= v[d][c];
            ps.pts[i * dims + d] = static_cast<double>(state[d]) * scale;
        }
    }
    return ps;
}

namespace {

std::uint64_t to_digits(double x, int precision) {
    return static_cast<std::uint64_t>(std::ldexp(x, precision));
}

double from_digits(std::uint64_t bits, int precision) {
    return std::ldexp(static_cast<double>(bits), -precision);
}

} // namespace

UnitPointSet interlace(const UnitPointSet& base, int alpha) {
    if (alpha != 2 && alpha != 3)
        throw ValidationError("interlace: alpha must be 2 or 3");
    if (base.kind != PointKind::sobol)
        throw KindMismatch("interlace: base must be a Sobol' net");
    if (base.n_dims != alpha * 2)
        throw DimsOutOfRange("interlace: base must hold alpha*2 dimensions");
    if (base.precision * alpha > 53)
        throw PrecisionOverflow("interlace: output would exceed 53 digits; "
                                "generate the base at precision <= " +
                                std::to_string(53 / alpha));

    UnitPointSet out;
    out.kind = alpha == 2 ? PointKind::sobol_interlaced_2 : PointKind::sobol_interlaced_3;
    out.n_points = base.n_points;
    out.n_dims = 2;
    out.n_shifts = base.n_shifts;
    out.precision = base.precision * alpha;
    out.seed = base.seed;
    out.pts.resize(static_cast<std::size_t>(out.n_shifts) * out.n_points * 2);
    const int p = base.precision, q = out.precision;
    for (int r = 0; r < out.n_shifts; ++r) {
        for (std::size_t i = 0; i < out.n_points; ++i) {
            for (int d = 0; d < 2; ++d) {
                std::uint64_t bits = 0;
                for (int k = 0; k < alpha; ++k) {
                    const std::uint64_t src =
                        to_digits(base.at(r, i, alpha * d + k), p);
                    for (int dig = 0; dig < p; ++dig) {
                        const std::uint64_t bit = (src >> (p - 1 - dig)) & 1ull;
                        bits |= bit << (q - 1 - (alpha * dig + k));
                    }
                }
                out.pts[(static_cast<std::size_t>(r) * out.n_points + i) * 2 + d] =
                    from_digits(bits, q);
            }
        }
    }
    return out;
}

UnitPointSet digital_shift(const UnitPointSet& points, std::uint64_t seed) {
    if (points.kind != PointKind::sobol &&
        points.kind != PointKind::sobol_interlaced_2 &&
        points.kind != PointKind::sobol_interlaced_3)
        throw KindMismatch("digital_shift: only digital-net kinds can be "
                           "digit-shifted (lattices take modulo-1 shifts)");
    UnitPointSet out = points;
    out.seed = seed;
    const int p = points.precision;
    for (int r = 0; r < points.n_shifts; ++r) {
        for (int d = 0; d < points.n_dims; ++d) {
            const std::uint64_t mask =
                counter_u64(seed, static_cast<std::uint64_t>(r) * points.n_dims + d) >>
                (64 - p);
            for (std::size_t i = 0; i < points.n_points; ++i) {
                const std::size_t idx =
                    (static_cast<std::size_t>(r) * points.n_points + i) * points.n_dims + d;
                out.pts[idx] = from_digits(to_digits(points.pts[idx], p) ^ mask, p);
            }
        }
    }
    return out;
}

Point map_to_triangle(Point u, const Triangle& tri, int depth) {
    if (depth < 1) throw ValidationError("map_to_triangle: depth must be >= 1");
    Point a = tri.v[0], b = tri.v[1], c = tri.v[2];
    double x1 = u.x, x2 = u.y;
    for (int it = 0; it < depth; ++it) {
        x1 *= 2.0;
        x2 *= 2.0;
        const int d1 = x1 >= 1.0 ? 1 : 0;
        const int d2 = x2 >= 1.0 ? 1 : 0;
        x1 -= d1;
        x2 -= d2;
        const Point ab{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        const Point ac{0.5 * (a.x + c.x), 0.5 * (a.y + c.y)};
        const Point bc{0.5 * (b.x + c.x), 0.5 * (b.y + c.y)};
        switch (2 * d1 + d2) {
            case 0: b = ab; c = ac; break;          // corner cell at a
            case 1: a = ab; c = bc; break;          // corner cell at b
            case 2: a = ac; b = bc; break;          // corner cell at c
            default: a = ab; b = ac; c = bc; break; // medial cell
        }
    }
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

namespace {

// First `want` unit points of the configured generator (sequence prefix for
// net kinds whose natural size 2^m exceeds the count).
std::vector<Point> unit_prefix(PointKind kind, int m, std::size_t want,
                               std::uint64_t seed, int shift_index) {
    const std::uint64_t sub_seed = counter_u64(seed, 7777 + shift_index);
    UnitPointSet base;
    switch (kind) {
        case PointKind::mc:
            base = mc_uniform(std::max<std::size_t>(want, 1), sub_seed);
            break;
        case PointKind::lattice: {
            const Point delta{counter_unit(sub_seed, 0), counter_unit(sub_seed, 1)};
            base = rank1_lattice(m, builtin_generating_vector(), delta);
            break;
        }
        case PointKind::sobol:
            base = digital_shift(sobol(m, 2, builtin_direction_numbers()), sub_seed);
            break;
        case PointKind::sobol_interlaced_2:
            base = digital_shift(
                interlace(sobol(m, 4, builtin_direction_numbers(), 26), 2), sub_seed);
            break;
        case PointKind::sobol_interlaced_3:
            base = digital_shift(
                interlace(sobol(m, 6, builtin_direction_numbers(), 17), 3), sub_seed);
            break;
        default:
            throw KindMismatch("quad_point_set: triangle_mapped is an output kind");
    }
    if (base.n_points < want)
        throw ValidationError("quad_point_set: generator yielded too few points");
    std::vector<Point> out(want);
    for (std::size_t i = 0; i < want; ++i) out[i] = {base.at(0, i, 0), base.at(0, i, 1)};
    return out;
}

} // namespace

UnitPointSet quad_point_set(PointKind kind, int m, const ConvexQuad& quad,
                            std::uint64_t seed, int n_shifts) {
    if (n_shifts < 1) throw ValidationError("quad_point_set: need n_shifts >= 1");
    const auto [t0, t1] = triangulate(quad);
    const double a0 = area(t0), a1 = area(t1);
    const std::size_t n_total = std::size_t{1} << m;
    // Proportional allocation, ties resolved toward the first triangle.
    std::size_t n0 = static_cast<std::size_t>(
        std::floor(static_cast<double>(n_total) * a0 / (a0 + a1) + 0.5));
    n0 = std::min(n0, n_total);
    const std::size_t n1 = n_total - n0;

    UnitPointSet ps;
    ps.kind = PointKind::triangle_mapped;
    ps.quad_base = kind;
    ps.n_points = n_total;
    ps.n_dims = 2;
    ps.n_shifts = n_shifts;
    ps.precision = 53;
    ps.seed = seed;
    ps.pts.resize(static_cast<std::size_t>(n_shifts) * n_total * 2);
    ps.tri_index.resize(static_cast<std::size_t>(n_shifts) * n_total);
    for (int r = 0; r < n_shifts; ++r) {
        // Independent streams per triangle, derived from (seed, triangle, r).
        const auto u0 = unit_prefix(kind, m, n0, counter_u64(seed, 0), r);
        const auto u1 = unit_prefix(kind, m, n1, counter_u64(seed, 1), r);
        std::size_t w = static_cast<std::size_t>(r) * n_total;
        for (std::size_t i = 0; i < n0; ++i, ++w) {
            const Point p = map_to_triangle(u0[i], t0);
            ps.pts[w * 2] = p.x;
            ps.pts[w * 2 + 1] = p.y;
            ps.tri_index[w] = 0;
        }
        for (std::size_t i = 0; i < n1; ++i, ++w) {
            const Point p = map_to_triangle(u1[i], t1);
            ps.pts[w * 2] = p.x;
            ps.pts[w * 2 + 1] = p.y;
            ps.tri_index[w] = 1;
        }
    }
    return ps;
}

namespace {

std::vector<double> replicate(const std::vector<double>& pts, int copies) {
    std::vector<double> out;
    out.reserve(pts.size() * static_cast<std::size_t>(copies));
    for (int r = 0; r < copies; ++r) out.insert(out.end(), pts.begin(), pts.end());
    return out;
}

} // namespace

UnitPointSet make_point_set(PointKind kind, int m, std::uint64_t seed, int n_shifts,
                            const GeneratingVector& gen, const DirectionNumbers& dirs) {
    switch (kind) {
        case PointKind::mc:
            return mc_uniform(std::size_t{1} << m, seed, n_shifts);
        case PointKind::lattice:
            return rank1_lattice_shifted(m, gen, seed, n_shifts);
        case PointKind::sobol: {
            UnitPointSet base = sobol(m, 2, dirs);
            base.n_shifts = n_shifts;
            base.pts = replicate(base.pts, n_shifts);
            return digital_shift(base, seed);
        }
        case PointKind::sobol_interlaced_2: {
            UnitPointSet base = interlace(sobol(m, 4, dirs, 26), 2);
            base.n_shifts = n_shifts;
            base.pts = replicate(base.pts, n_shifts);
            return digital_shift(base, seed);
        }
        case PointKind::sobol_interlaced_3: {
            UnitPointSet base = interlace(sobol(m, 6, dirs, 17), 3);
            base.n_shifts = n_shifts;
            base.pts = replicate(base.pts, n_shifts);
            return digital_shift(base, seed);
        }
        default:
            throw KindMismatch("make_point_set: triangle_mapped requires a quad domain");
    }
}

} // namespace mcm
