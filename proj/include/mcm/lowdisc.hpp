#pragma once
#include "mcm/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mcm {

enum class PointKind {
    mc,
    lattice,
    sobol,
    sobol_interlaced_2,
    sobol_interlaced_3,
    triangle_mapped,
};

std::string kind_name(PointKind k);
PointKind kind_from_name(const std::string& name);

// Rank-1 lattice generating vector in base 2: odd components below 2^max_log2.
struct GeneratingVector {
    int max_log2 = 0;
    std::vector<std::uint32_t> components;

    void validate() const;
};

// Per-dimension binary generating matrices with columns stored as integers:
// column j (1-based) is m_j * 2^(precision-j), upper-triangular with a unit
// diagonal, so digit j of column j is always set.
struct DirectionNumbers {
    int precision = 32;
    std::vector<std::vector<std::uint64_t>> columns; // [dim][j]

    std::size_t n_dims() const { return columns.size(); }
    void validate() const;
};

// The vetted defaults shipped with the repository (also present as plain-text
// files under data/ with the same contents).
const GeneratingVector& builtin_generating_vector();
const DirectionNumbers& builtin_direction_numbers();

GeneratingVector load_generating_vector(const std::string& path);
DirectionNumbers load_direction_numbers(const std::string& path);

// A batch of R point sets of N points each. Coordinates live in [0,1) until
// mapped; triangle_mapped sets carry mapped coordinates plus the index of the
// triangle each point belongs to.
struct UnitPointSet {
    PointKind kind = PointKind::mc;
    std::size_t n_points = 0;
    int n_dims = 2;
    int n_shifts = 1;
    int precision = 53;
    std::uint64_t seed = 0;
    std::vector<double> pts;             // [shift][point][dim], flat
    std::vector<std::uint8_t> tri_index; // triangle_mapped: [shift][point]
    PointKind quad_base = PointKind::mc; // generator behind triangle_mapped sets

    double at(int r, std::size_t n, int d) const {
        return pts[(static_cast<std::size_t>(r) * n_points + n) * n_dims + d];
    }
};

// n independent pseudo-uniform points per shift, counter-based streams.
UnitPointSet mc_uniform(std::size_t n, std::uint64_t seed, int n_shifts = 1);

// 2^m lattice points x_n = frac(n*z/2^m + shift). Throws MOutOfRange when the
// vector's tabulated resolution is exceeded.
UnitPointSet rank1_lattice(int m, const GeneratingVector& gen, Point shift);

// Convenience: R independent modulo-1 shifts drawn from `seed`.
UnitPointSet rank1_lattice_shifted(int m, const GeneratingVector& gen,
                                   std::uint64_t seed, int n_shifts);

// 2^m Sobol' points in gray-code order at the given digit precision.
UnitPointSet sobol(int m, int dims, const DirectionNumbers& dirs, int precision = 0);

// Digit-interlaced net: output dimension d takes its digit alpha*i+k from
// digit i of base dimension alpha*d+k. Base must hold alpha*2 dimensions.
UnitPointSet interlace(const UnitPointSet& base, int alpha);

// Per-dimension XOR of the digit expansion with a mask drawn from
// (seed, shift index). Net kinds only.
UnitPointSet digital_shift(const UnitPointSet& points, std::uint64_t seed);

// Measure-preserving map of the unit square onto a triangle: pairs of base-2
// digits of u select recursive midpoint-subdivision cells; the depth-26
// default exhausts double precision.
Point map_to_triangle(Point u, const Triangle& tri, int depth = 26);

// Triangulates the quad and generates an independent point set per triangle,
// sized proportionally to area (ties favour the first triangle), mapped via
// map_to_triangle. Net kinds use sequence prefixes when counts are not powers
// of two.
UnitPointSet quad_point_set(PointKind kind, int m, const ConvexQuad& quad,
                            std::uint64_t seed, int n_shifts = 1);

// Mission-level dispatcher: the right generator + R randomizations per kind
// (modulo-1 shifts for lattices, digital shifts for nets, independent streams
// for mc).
UnitPointSet make_point_set(PointKind kind, int m, std::uint64_t seed, int n_shifts,
                            const GeneratingVector& gen, const DirectionNumbers& dirs);

} // namespace mcm
