#pragma once
#include <array>
#include <cstddef>
#include <vector>

namespace mcm {

struct VehicleParams {
    double v = 2.5;        // speed (m/s)
    double k_gain = 5.0;   // Nomoto gain (1/s)
    double t_const = 0.5;  // Nomoto time constant (s)
    double p_max_deg = 35.0; // rudder deflection bound (degrees)

    double p_max_rad() const;
    void validate() const;
};

struct VehicleState {
    double x = 0.0;   // m
    double y = 0.0;   // m
    double psi = 0.0; // heading (radians)
    double r = 0.0;   // turn rate (radians/s)
};

// Rudder deflections (radians) at K_nodes uniformly spaced times over [0, t_f].
struct ControlSchedule {
    double t_f = 0.0;
    std::vector<double> knots;

    void validate(double p_max_rad) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<VehicleState> states;
    std::vector<double> controls; // applied rudder at each time node
};

// (V cos psi, V sin psi, r, (K p - r)/T)
std::array<double, 4> state_derivative(const VehicleState& s, double p,
                                       const VehicleParams& params);

// Piecewise-linear control interpolation at normalized time tau in [0,1].
double control_at(const ControlSchedule& schedule, double tau);

// Classical RK4 with piecewise-linear control interpolation between knots;
// step = knot spacing / steps_per_knot. Throws NonFiniteState on blow-up.
Trajectory integrate(const VehicleState& s0, const ControlSchedule& schedule,
                     int steps_per_knot, const VehicleParams& params);

// Stage storage for one RK4 step, kept so a reverse sweep can be run without
// re-deriving intermediate states.
struct RkStep {
    std::array<double, 4> s;              // state at step start
    std::array<double, 4> k1, k2, k3, k4; // stage derivatives
    double p0 = 0.0, pm = 0.0, p1 = 0.0;  // controls at start/mid/end of step
};

struct IntegrationTape {
    std::vector<RkStep> steps;
    std::array<double, 4> final_state{};
    double dt = 0.0;
};

IntegrationTape integrate_tape(const VehicleState& s0, const ControlSchedule& schedule,
                               int steps_per_knot, const VehicleParams& params);

Trajectory trajectory_from_tape(const IntegrationTape& tape, const ControlSchedule& schedule);

// V * t_f (constant-speed model).
double path_length(const Trajectory& traj, const VehicleParams& params);

} // namespace mcm
