#pragma once
#include "mcm/geometry.hpp"

namespace mcm {

enum class RangeNorm { euclidean, l1 };

// Forward-looking sensor model. Angles are stored in degrees (config
// convention) and converted to radians inside the evaluation functions.
struct SensorParams {
    double lambda = 20.0;    // Poisson scan rate (1/s)
    double fom = 72.0;       // figure of merit
    double a = 5.2;          // attenuation multiplier
    double sigma = 9.0;      // spread of the range CDF
    double alpha_fov = 120.0; // horizontal field of view (degrees)
    double p_alpha = 25.0;   // horizontal sigmoid slope
    double eps_fov = 5.0;    // vertical field of view (degrees)
    double eps_de = -6.0;    // downward elevation angle (degrees)
    double p_eps = 400.0;    // vertical sigmoid slope
    double h = 20.0;         // sensor height above the floor (m)
    RangeNorm range_norm = RangeNorm::euclidean;

    void validate() const;
};

struct VehicleState; // dynamics.hpp

// Numerically stable logistic 1/(1+e^-t); exact 0/1 in the far tails.
double logistic(double t);

// Range between vehicle and target under the configured norm.
double sensor_range(const VehicleState& pose, Point omega, const SensorParams& sp);

// CDF factor of the detection rate; strictly decreasing in range.
double range_probability(const VehicleState& pose, Point omega, const SensorParams& sp);

// Bearing of the target in the body frame, 0 dead ahead, +pi/2 to port,
// wrapped to (-pi, pi]. Coincident point returns 0.
double relative_bearing(const VehicleState& pose, Point omega);

// Smooth-box factors in [0,1]: horizontal over bearing, vertical over the
// depression angle of the line of sight.
double horizontal_gate(const VehicleState& pose, Point omega, const SensorParams& sp);
double vertical_gate(const VehicleState& pose, Point omega, const SensorParams& sp);

// lambda * range_probability * horizontal_gate * vertical_gate, in [0, lambda].
double detection_rate(const VehicleState& pose, Point omega, const SensorParams& sp);

// Derivative bundle for the adjoint sweep: gamma and its partials with
// respect to vehicle x, y, psi at fixed target.
struct RateGrad {
    double value = 0.0;
    double d_x = 0.0;
    double d_y = 0.0;
    double d_psi = 0.0;
};
RateGrad detection_rate_grad(const VehicleState& pose, Point omega, const SensorParams& sp);

// Horizontal distances at which the vertical gate crosses 0.5 (band edges of
// the depression-angle window), used for swath sizing of the survey guess.
struct SwathBand {
    double inner = 0.0;
    double outer = 0.0;
    double width() const { return outer - inner; }
};
SwathBand swath_band(const SensorParams& sp);

} // namespace mcm
