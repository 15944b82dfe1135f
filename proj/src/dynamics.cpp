#include "mcm/dynamics.hpp"
#include "mcm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mcm {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::array<double, 4> deriv(const std::array<double, 4>& s, double p,
                            const VehicleParams& vp) {
    return {vp.v * std::cos(s[2]), vp.v * std::sin(s[2]), s[3],
            (vp.k_gain * p - s[3]) / vp.t_const};
}
} // namespace

double VehicleParams::p_max_rad() const { return p_max_deg * kPi / 180.0; }

void VehicleParams::validate() const {
    if (!(v > 0.0)) throw ValidationError("vehicle: v must be positive");
    if (!(t_const > 0.0)) throw ValidationError("vehicle: t_const must be positive");
    if (!(p_max_deg > 0.0)) throw ValidationError("vehicle: p_max must be positive");
}

void ControlSchedule::validate(double p_max_rad) const {
    if (!(t_f > 0.0)) throw ValidationError("schedule: t_f must be positive");
    if (knots.size() < 2) throw ValidationError("schedule: need at least 2 knots");
    for (double p : knots)
        if (std::abs(p) > p_max_rad + 1e-12)
            throw ValidationError("schedule: knot exceeds the rudder bound");
}

std::array<double, 4> state_derivative(const VehicleState& s, double p,
                                       const VehicleParams& params) {
    return deriv({s.x, s.y, s.psi, s.r}, p, params);
}

double control_at(const ControlSchedule& schedule, double tau) {
    const std::size_t n = schedule.knots.size();
    double x = std::clamp(tau, 0.0, 1.0) * static_cast<double>(n - 1);
    std::size_t k = std::min(static_cast<std::size_t>(x), n - 2);
    const double w = x - static_cast<double>(k);
    return (1.0 - w) * schedule.knots[k] + w * schedule.knots[k + 1];
}

IntegrationTape integrate_tape(const VehicleState& s0, const ControlSchedule& schedule,
                               int steps_per_knot, const VehicleParams& params) {
    if (steps_per_knot < 1) throw ValidationError("integrate: steps_per_knot must be >= 1");
    const std::size_t n_knots = schedule.knots.size();
    if (n_knots < 2) throw ValidationError("integrate: need at least 2 knots");
    const std::size_t n_steps = (n_knots - 1) * static_cast<std::size_t>(steps_per_knot);
    const double h = schedule.t_f / static_cast<double>(n_steps);
    const double dtau = 1.0 / static_cast<double>(n_steps);

    IntegrationTape tape;
    tape.dt = h;
    tape.steps.resize(n_steps);
    std::array<double, 4> s{s0.x, s0.y, s0.psi, s0.r};
    for (std::size_t i = 0; i < n_steps; ++i) {
        RkStep& st = tape.steps[i];
        st.s = s;
        const double tau = static_cast<double>(i) * dtau;
        st.p0 = control_at(schedule, tau);
        st.pm = control_at(schedule, tau + 0.5 * dtau);
        st.p1 = control_at(schedule, tau + dtau);

        st.k1 = deriv(s, st.p0, params);
        std::array<double, 4> u;
        for (int d = 0; d < 4; ++d) u[d] = s[d] + 0.5 * h * st.k1[d];
        st.k2 = deriv(u, st.pm, params);
        for (int d = 0; d < 4; ++d) u[d] = s[d] + 0.5 * h * st.k2[d];
        st.k3 = deriv(u, st.pm, params);
        for (int d = 0; d < 4; ++d) u[d] = s[d] + h * st.k3[d];
        st.k4 = deriv(u, st.p1, params);

        for (int d = 0; d < 4; ++d)
            s[d] += h / 6.0 * (st.k1[d] + 2.0 * st.k2[d] + 2.0 * st.k3[d] + st.k4[d]);
        for (int d = 0; d < 4; ++d)
            if (!std::isfinite(s[d]))
                throw NonFiniteState("integrate: state became non-finite at step " +
                                     std::to_string(i + 1));
    }
    tape.final_state = s;
    return tape;
}

Trajectory trajectory_from_tape(const IntegrationTape& tape, const ControlSchedule& schedule) {
    const std::size_t n_steps = tape.steps.size();
    Trajectory traj;
    traj.times.resize(n_steps + 1);
    traj.states.resize(n_steps + 1);
    traj.controls.resize(n_steps + 1);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const auto& s = tape.steps[i].s;
        traj.times[i] = static_cast<double>(i) * tape.dt;
        traj.states[i] = {s[0], s[1], s[2], s[3]};
        traj.controls[i] = tape.steps[i].p0;
    }
    traj.times[n_steps] = schedule.t_f;
    const auto& s = tape.final_state;
    traj.states[n_steps] = {s[0], s[1], s[2], s[3]};
    traj.controls[n_steps] = schedule.knots.back();
    return traj;
}

Trajectory integrate(const VehicleState& s0, const ControlSchedule& schedule,
                     int steps_per_knot, const VehicleParams& params) {
    return trajectory_from_tape(integrate_tape(s0, schedule, steps_per_knot, params),
                                schedule);
}

double path_length(const Trajectory& traj, const VehicleParams& params) {
    return params.v * traj.times.back();
}

} // namespace mcm
