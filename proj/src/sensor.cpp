#include "mcm/sensor.hpp"
#include "mcm/dynamics.hpp"
#include "mcm/errors.hpp"

#include <cmath>
#include <limits>

namespace mcm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2Pi = 0.39894228040143267794; // 1/sqrt(2*pi)
constexpr double kLn10 = 2.30258509299404568402;

double deg2rad(double d) { return d * kPi / 180.0; }

// Standard normal CDF.
double phi_n(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// Smooth box over [-half, half] (or [lo, hi] via recentring): the sum of two
// logistics minus one. Both logistic arguments sum to a positive constant, so
// the result always lies in [0, 1].
double smooth_box(double x, double lo, double hi, double slope) {
    return logistic(slope * (x - lo)) + logistic(slope * (hi - x)) - 1.0;
}

// d/dx of smooth_box.
double smooth_box_deriv(double x, double lo, double hi, double slope) {
    const double a = logistic(slope * (x - lo));
    const double b = logistic(slope * (hi - x));
    return slope * (a * (1.0 - a) - b * (1.0 - b));
}

} // namespace

void SensorParams::validate() const {
    if (!(lambda > 0.0)) throw ValidationError("sensor: lambda must be positive");
    if (!(sigma > 0.0)) throw ValidationError("sensor: sigma must be positive");
    if (!(alpha_fov > 0.0 && alpha_fov < 360.0))
        throw ValidationError("sensor: alpha_fov must lie in (0, 360) degrees");
    if (!(p_alpha > 0.0)) throw ValidationError("sensor: p_alpha must be positive");
    if (!(p_eps > 0.0)) throw ValidationError("sensor: p_eps must be positive");
    if (!(h > 0.0)) throw ValidationError("sensor: h must be positive");
    if (!(eps_fov > 0.0)) throw ValidationError("sensor: eps_fov must be positive");
}

double logistic(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double sensor_range(const VehicleState& pose, Point omega, const SensorParams& sp) {
    const double dx = omega.x - pose.x, dy = omega.y - pose.y;
    if (sp.range_norm == RangeNorm::l1) return std::abs(dx) + std::abs(dy);
    return std::hypot(dx, dy);
}

double range_probability(const VehicleState& pose, Point omega, const SensorParams& sp) {
    double rho = sensor_range(pose, omega, sp);
    // Coincident point: clamp the log argument at the machine-epsilon floor,
    // which saturates the CDF to 1.
    rho = std::max(rho, std::numeric_limits<double>::epsilon());
    const double loss = 20.0 * std::log10(rho * (1.0 + sp.a));
    return phi_n((sp.fom - loss) / sp.sigma);
}

double relative_bearing(const VehicleState& pose, Point omega) {
    const double dx = omega.x - pose.x, dy = omega.y - pose.y;
    if (dx == 0.0 && dy == 0.0) return 0.0;
    const double c = std::cos(pose.psi), s = std::sin(pose.psi);
    const double fwd = c * dx + s * dy;  // dx^b
    const double lat = -s * dx + c * dy; // dy^b
    double b = std::atan2(lat, fwd);
    if (b <= -kPi) b = kPi; // wrap convention: (-pi, pi]
    return b;
}

double horizontal_gate(const VehicleState& pose, Point omega, const SensorParams& sp) {
    const double half = deg2rad(sp.alpha_fov) / 2.0;
    return smooth_box(relative_bearing(pose, omega), -half, half, sp.p_alpha);
}

double vertical_gate(const VehicleState& pose, Point omega, const SensorParams& sp) {
    const double rho = sensor_range(pose, omega, sp);
    const double eps_b = std::atan2(-sp.h, rho); // rho = 0 gives -pi/2
    const double lo = deg2rad(sp.eps_de - sp.eps_fov / 2.0);
    const double hi = deg2rad(sp.eps_de + sp.eps_fov / 2.0);
    return smooth_box(eps_b, lo, hi, sp.p_eps);
}

double detection_rate(const VehicleState& pose, Point omega, const SensorParams& sp) {
    return sp.lambda * range_probability(pose, omega, sp) *
           horizontal_gate(pose, omega, sp) * vertical_gate(pose, omega, sp);
}

RateGrad detection_rate_grad(const VehicleState& pose, Point omega, const SensorParams& sp) {
    // Only the euclidean norm is differentiated here; the estimator and
    // optimizer default to it. (The l1 toggle is served by finite differences.)
    const double dx = omega.x - pose.x, dy = omega.y - pose.y;
    const double rho = std::hypot(dx, dy);
    RateGrad g;
    if (rho < 1e-9) { // saturated region around coincidence; locally flat
        g.value = detection_rate(pose, omega, sp);
        return g;
    }

    const double z = (sp.fom - 20.0 * std::log10(rho * (1.0 + sp.a))) / sp.sigma;
    const double p = phi_n(z);
    const double dp_drho = kInvSqrt2Pi * std::exp(-0.5 * z * z) *
                           (-20.0 / (kLn10 * rho * sp.sigma));

    const double half = deg2rad(sp.alpha_fov) / 2.0;
    const double bearing = relative_bearing(pose, omega);
    const double fa = smooth_box(bearing, -half, half, sp.p_alpha);
    const double dfa_db = smooth_box_deriv(bearing, -half, half, sp.p_alpha);

    const double lo = deg2rad(sp.eps_de - sp.eps_fov / 2.0);
    const double hi = deg2rad(sp.eps_de + sp.eps_fov / 2.0);
    const double eps_b = std::atan2(-sp.h, rho);
    const double fe = smooth_box(eps_b, lo, hi, sp.p_eps);
    const double dfe_de = smooth_box_deriv(eps_b, lo, hi, sp.p_eps);
    const double deps_drho = sp.h / (rho * rho + sp.h * sp.h);

    const double drho_dx = -dx / rho, drho_dy = -dy / rho;
    const double db_dx = dy / (rho * rho), db_dy = -dx / (rho * rho);

    g.value = sp.lambda * p * fa * fe;
    const double t_rho = sp.lambda * (dp_drho * fa * fe + p * fa * dfe_de * deps_drho);
    const double t_b = sp.lambda * p * dfa_db * fe;
    g.d_x = t_rho * drho_dx + t_b * db_dx;
    g.d_y = t_rho * drho_dy + t_b * db_dy;
    g.d_psi = -t_b;
    return g;
}

SwathBand swath_band(const SensorParams& sp) {
    // Band edges where the depression angle crosses the window boundaries.
    // Angles at or above horizontal would push the edge to infinity; clamp.
    const double steep = -deg2rad(sp.eps_de - sp.eps_fov / 2.0);
    const double shallow = -deg2rad(sp.eps_de + sp.eps_fov / 2.0);
    const double tiny = 1e-9;
    SwathBand band;
    band.inner = sp.h / std::tan(std::max(steep, tiny));
    band.outer = sp.h / std::tan(std::max(shallow, tiny));
    return band;
}

} // namespace mcm
