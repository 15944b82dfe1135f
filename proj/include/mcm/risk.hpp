#pragma once
#include "mcm/dynamics.hpp"
#include "mcm/geometry.hpp"
#include "mcm/lowdisc.hpp"
#include "mcm/sensor.hpp"

#include <cstdint>
#include <vector>

namespace mcm {

struct RiskEstimate {
    double value = 1.0;
    std::size_t n_points = 0;
    int n_shifts = 1;
    PointKind kind = PointKind::mc;
    std::vector<double> per_shift;
};

// Trapezoidal quadrature of the detection rate along the trajectory grid.
double exposure(const Trajectory& traj, Point omega, const SensorParams& sensor);

// Targets in meters for every shift, flat [shift][point]. Unit-square sets
// are mapped onto rectangles; triangle-mapped sets pass through unchanged
// (they already live on their quad).
std::vector<Point> map_points(const UnitPointSet& points, const DomainSpec& domain);

// Exposure of every target; the parallel kernel splits over targets and the
// serial reference is kept as the correctness baseline (results must match
// bit for bit since each target's sum is independent).
void exposure_batch(const Trajectory& traj, const std::vector<Point>& targets,
                    const SensorParams& sensor, std::vector<double>& out);
void exposure_batch_serial(const Trajectory& traj, const std::vector<Point>& targets,
                           const SensorParams& sensor, std::vector<double>& out);

// Mean survival exp(-exposure) per shift, averaged over shifts.
RiskEstimate risk_estimate(const Trajectory& traj, const UnitPointSet& points,
                           const DomainSpec& domain, const SensorParams& sensor);

// Fixed post-processing check: 2^14 pseudo-random points on the *initial*
// domain, deterministic in `seed`.
double post_risk_oracle(const Trajectory& traj, const DomainSpec& omega_init,
                        const SensorParams& sensor, std::uint64_t seed);

} // namespace mcm
