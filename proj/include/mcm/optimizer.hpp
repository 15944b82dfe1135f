#pragma once
#include "mcm/dynamics.hpp"
#include "mcm/geometry.hpp"
#include "mcm/lowdisc.hpp"
#include "mcm/risk.hpp"
#include "mcm/sensor.hpp"

#include <cstdint>

namespace mcm {

struct NlpSettings {
    double risk_tolerance = 1e-3; // absolute slack on the risk constraint
    int max_outer = 20;           // augmented-Lagrangian updates
    int max_inner = 200;          // quasi-Newton iterations per outer round
    double penalty_init = 100.0;
    double penalty_growth = 5.0;
    double grad_step = 1e-6;      // relative forward-difference step
    bool time_scaling = true;     // fixed design choice: normalized-time shooting
    int n_knots = 60;             // control nodes over [0, t_f]
    int steps_per_knot = 6;       // integrator resolution between knots
    bool use_adjoint = true;      // reverse-sweep gradient; false = finite differences
    void validate() const;
};

struct Solution {
    ControlSchedule schedule;
    Trajectory trajectory;
    double t_f = 0.0;
    RiskEstimate internal_risk;
    bool converged = false;
    int outer_iterations = 0;
    int inner_iterations = 0; // total across outer rounds
    long n_evaluations = 0;   // risk / merit evaluations
};

// Boustrophedon warm start: straight legs spaced by the vertical-gate band
// width, flown by a proportional waypoint chaser, resampled onto n_knots
// uniform control nodes. A domain thinner than one swath degenerates to a
// single mid-height crossing leg.
ControlSchedule initial_guess(const DomainSpec& domain, Point start,
                              const SensorParams& sensor, const VehicleParams& vehicle,
                              int n_knots);

// Minimizes t_f over (t_f, knots) subject to risk_estimate(...) <= m_risk and
// |p| <= p_max: augmented-Lagrangian outer loop around a projected
// quasi-Newton inner solver on normalized time. Deterministic given inputs.
// converged=false returns the best iterate found (the relaxation loop treats
// that as risk-infeasible).
Solution solve(const DomainSpec& domain, Point start, double m_risk,
               const UnitPointSet& points, const SensorParams& sensor,
               const VehicleParams& vehicle, const NlpSettings& settings,
               const ControlSchedule* guess = nullptr);

// Risk gradient with respect to (t_f, knots) via the integration-tape reverse
// sweep. Exposed for verification against finite differences.
void risk_gradient(const DomainSpec& domain, Point start, const UnitPointSet& points,
                   const SensorParams& sensor, const VehicleParams& vehicle,
                   const ControlSchedule& schedule, int steps_per_knot,
                   double& d_tf, std::vector<double>& d_knots);

struct GradientCheckReport {
    double max_rel_error = 0.0; // max over probes of ||g_adj - g_fd||_inf / ||g_fd||_inf
    double max_abs_error = 0.0;
    int n_probes = 0;
};

// Compares the reverse-sweep gradient against central finite differences at
// random interior schedules drawn from `seed`.
GradientCheckReport gradient_check(const DomainSpec& domain, Point start,
                                   const UnitPointSet& points, const SensorParams& sensor,
                                   const VehicleParams& vehicle, std::uint64_t seed,
                                   int n_probes = 10);

} // namespace mcm
