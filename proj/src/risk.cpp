#include "mcm/risk.hpp"
#include "mcm/errors.hpp"

#include <cmath>

namespace mcm {

double exposure(const Trajectory& traj, Point omega, const SensorParams& sensor) {
    const std::size_t n = traj.states.size();
    if (n < 2) return 0.0;
    double acc = 0.0;
    double prev = detection_rate(traj.states[0], omega, sensor);
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = detection_rate(traj.states[i], omega, sensor);
        acc += 0.5 * (traj.times[i] - traj.times[i - 1]) * (prev + cur);
        prev = cur;
    }
    return acc;
}

std::vector<Point> map_points(const UnitPointSet& points, const DomainSpec& domain) {
    if (points.n_points == 0) throw EmptyPointSet("map_points: empty point set");
    const std::size_t total =
        static_cast<std::size_t>(points.n_shifts) * points.n_points;
    std::vector<Point> out(total);
    if (points.kind == PointKind::triangle_mapped) {
        // Already generated on the quad itself.
        for (std::size_t i = 0; i < total; ++i)
            out[i] = {points.pts[i * 2], points.pts[i * 2 + 1]};
        return out;
    }
    if (points.n_dims != 2)
        throw KindMismatch("map_points: expected a planar point set");
    const Rect* rect = std::get_if<Rect>(&domain.shape);
    if (!rect)
        throw KindMismatch("map_points: quad domains need a triangle-mapped point set");
    for (std::size_t i = 0; i < total; ++i)
        out[i] = map_unit_to_rect({points.pts[i * 2], points.pts[i * 2 + 1]}, *rect);
    return out;
}

void exposure_batch_serial(const Trajectory& traj, const std::vector<Point>& targets,
                           const SensorParams& sensor, std::vector<double>& out) {
    out.resize(targets.size());
    for (std::size_t j = 0; j < targets.size(); ++j)
        out[j] = exposure(traj, targets[j], sensor);
}

void exposure_batch(const Trajectory& traj, const std::vector<Point>& targets,
                    const SensorParams& sensor, std::vector<double>& out) {
    out.resize(targets.size());
    const std::int64_t n = static_cast<std::int64_t>(targets.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n; ++j)
        out[j] = exposure(traj, targets[j], sensor);
}

RiskEstimate risk_estimate(const Trajectory& traj, const UnitPointSet& points,
                           const DomainSpec& domain, const SensorParams& sensor) {
    const std::vector<Point> targets = map_points(points, domain);
    std::vector<double> exp_buf;
    exposure_batch(traj, targets, sensor, exp_buf);

    RiskEstimate est;
    est.n_points = points.n_points;
    est.n_shifts = points.n_shifts;
    est.kind = points.kind;
    est.per_shift.resize(points.n_shifts);
    // Fixed-order reduction: bit-stable for any worker count.
    for (int r = 0; r < points.n_shifts; ++r) {
        double acc = 0.0;
        const std::size_t base = static_cast<std::size_t>(r) * points.n_points;
        for (std::size_t i = 0; i < points.n_points; ++i)
            acc += std::exp(-exp_buf[base + i]);
        est.per_shift[r] = acc / static_cast<double>(points.n_points);
    }
    double acc = 0.0;
    for (double v : est.per_shift) acc += v;
    est.value = acc / static_cast<double>(points.n_shifts);
    return est;
}

double post_risk_oracle(const Trajectory& traj, const DomainSpec& omega_init,
                        const SensorParams& sensor, std::uint64_t seed) {
    constexpr int kOracleM = 14;
    UnitPointSet pts;
    if (const ConvexQuad* q = std::get_if<ConvexQuad>(&omega_init.shape))
        pts = quad_point_set(PointKind::mc, kOracleM, *q, seed);
    else
        pts = mc_uniform(std::size_t{1} << kOracleM, seed);
    return risk_estimate(traj, pts, omega_init, sensor).value;
}

} // namespace mcm
