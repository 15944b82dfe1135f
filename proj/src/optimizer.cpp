#include "mcm/optimizer.hpp"
#include "mcm/errors.hpp"
#include "mcm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace mcm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

// adjoint of the state derivative: J^T v with J = df/ds at heading psi.
// f = (V cos psi, V sin psi, r, (K p - r)/T) depends on s only through psi
// and r, so components 0 and 1 are always zero.
std::array<double, 4> jac_t(double psi, const std::array<double, 4>& v,
                            const VehicleParams& vp) {
    return {0.0, 0.0, vp.v * (-std::sin(psi) * v[0] + std::cos(psi) * v[1]),
            v[2] - v[3] / vp.t_const};
}

double dot4(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// linear-interpolation weights used by control_at, for scattering control
// adjoints back onto the knots
void scatter_control(const ControlSchedule& schedule, double tau, double pbar,
                     std::vector<double>& knot_bar) {
    const std::size_t n = schedule.knots.size();
    const double x = std::clamp(tau, 0.0, 1.0) * static_cast<double>(n - 1);
    const std::size_t k = std::min(static_cast<std::size_t>(x), n - 2);
    const double w = x - static_cast<double>(k);
    knot_bar[k] += (1.0 - w) * pbar;
    knot_bar[k + 1] += w * pbar;
}

// ---------------------------------------------------------------------------
// inner solver: projected L-BFGS with Armijo backtracking on a box

struct BoxProblem {
    std::vector<double> lo, hi;
    // value only (line search) and value+gradient
    std::function<double(const std::vector<double>&)> value;
    std::function<double(const std::vector<double>&, std::vector<double>&)> value_grad;
};

std::vector<double> project(const BoxProblem& prob, std::vector<double> x) {
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::clamp(x[i], prob.lo[i], prob.hi[i]);
    return x;
}

struct InnerResult {
    std::vector<double> x;
    double f = kInf;
    int iterations = 0;
};

InnerResult lbfgs_box(const BoxProblem& prob, std::vector<double> x, int max_iter) {
    constexpr int kMemory = 8;
    constexpr double kArmijo = 1e-4;

    x = project(prob, x);
    std::vector<double> g(x.size());
    double f = prob.value_grad(x, g);

    std::vector<std::vector<double>> mem_s, mem_y;
    std::vector<double> mem_rho;

    InnerResult res;
    int stall = 0;
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;

        // two-loop recursion for d = -H g
        std::vector<double> d(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
        const int m = static_cast<int>(mem_s.size());
        std::vector<double> alpha(m);
        for (int i = m - 1; i >= 0; --i) {
            double si_d = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) si_d += mem_s[i][k] * d[k];
            alpha[i] = mem_rho[i] * si_d;
            for (std::size_t k = 0; k < d.size(); ++k) d[k] -= alpha[i] * mem_y[i][k];
        }
        if (m > 0) {
            double yy = 0.0, sy = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) {
                yy += mem_y[m - 1][k] * mem_y[m - 1][k];
                sy += mem_s[m - 1][k] * mem_y[m - 1][k];
            }
            if (yy > 0.0)
                for (double& v : d) v *= sy / yy;
        }
        for (int i = 0; i < m; ++i) {
            double yi_d = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) yi_d += mem_y[i][k] * d[k];
            const double beta = mem_rho[i] * yi_d;
            for (std::size_t k = 0; k < d.size(); ++k)
                d[k] += (alpha[i] - beta) * mem_s[i][k];
        }

        // fall back to steepest descent when curvature info is unusable
        double gd = 0.0, gn = 0.0, dn = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            gd += g[k] * d[k];
            gn += g[k] * g[k];
            dn += d[k] * d[k];
        }
        if (!(gd < -1e-12 * std::sqrt(gn * dn))) {
            for (std::size_t k = 0; k < d.size(); ++k) d[k] = -g[k];
        }

        // backtracking on the projected path
        bool accepted = false;
        std::vector<double> xn;
        double fn = kInf;
        double step = 1.0;
        for (int ls = 0; ls < 40; ++ls) {
            xn = x;
            for (std::size_t k = 0; k < x.size(); ++k) xn[k] = x[k] + step * d[k];
            xn = project(prob, xn);
            double slope = 0.0;
            bool moved = false;
            for (std::size_t k = 0; k < x.size(); ++k) {
                slope += g[k] * (xn[k] - x[k]);
                if (xn[k] != x[k]) moved = true;
            }
            if (!moved) break;
            fn = prob.value(xn);
            if (fn <= f + kArmijo * std::min(slope, 0.0) &&
                (slope < 0.0 || fn < f)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // no admissible step along this direction

        std::vector<double> gnew(g.size());
        const double fcheck = prob.value_grad(xn, gnew);
        (void)fcheck;

        // curvature pair
        std::vector<double> s(x.size()), y(x.size());
        double sy = 0.0, ss = 0.0, yy2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            s[k] = xn[k] - x[k];
            y[k] = gnew[k] - g[k];
            sy += s[k] * y[k];
            ss += s[k] * s[k];
            yy2 += y[k] * y[k];
        }
        if (sy > 1e-10 * std::sqrt(ss * yy2)) {
            mem_s.push_back(std::move(s));
            mem_y.push_back(std::move(y));
            mem_rho.push_back(1.0 / sy);
            if (static_cast<int>(mem_s.size()) > kMemory) {
                mem_s.erase(mem_s.begin());
                mem_y.erase(mem_y.begin());
                mem_rho.erase(mem_rho.begin());
            }
        }

        const double decrease = f - fn;
        x = std::move(xn);
        f = fn;
        g = std::move(gnew);

        // projected-gradient stationarity
        double pg = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double t = std::clamp(x[k] - g[k], prob.lo[k], prob.hi[k]) - x[k];
            pg = std::max(pg, std::abs(t));
        }
        if (pg < 1e-6 * (1.0 + std::abs(f))) break;
        stall = (decrease < 1e-12 * (1.0 + std::abs(f))) ? stall + 1 : 0;
        if (stall >= 2) break;
    }
    res.x = std::move(x);
    res.f = f;
    return res;
}

} // namespace

void NlpSettings::validate() const {
    if (!(risk_tolerance > 0.0)) throw ValidationError("solver: risk_tolerance must be positive");
    if (max_outer < 1) throw ValidationError("solver: max_outer must be >= 1");
    if (max_inner < 1) throw ValidationError("solver: max_inner must be >= 1");
    if (!(penalty_init > 0.0)) throw ValidationError("solver: penalty_init must be positive");
    if (!(penalty_growth > 1.0)) throw ValidationError("solver: penalty_growth must exceed 1");
    if (!(grad_step > 0.0)) throw ValidationError("solver: grad_step must be positive");
    if (n_knots < 2) throw ValidationError("solver: need at least 2 knots");
    if (steps_per_knot < 1) throw ValidationError("solver: steps_per_knot must be >= 1");
}

ControlSchedule initial_guess(const DomainSpec& domain, Point start,
                              const SensorParams& sensor, const VehicleParams& vehicle,
                              int n_knots) {
    if (n_knots < 2) throw ValidationError("initial_guess: need at least 2 knots");
    const Rect box = bounding_box(domain.shape);
    const double swath = swath_band(sensor).width();
    const double p_max = vehicle.p_max_rad();

    // boustrophedon rows spaced by the swath; a domain thinner than one swath
    // degenerates to a single mid-height crossing leg
    std::vector<Point> wps;
    if (swath >= box.hi.y - box.lo.y) {
        const double ym = 0.5 * (box.lo.y + box.hi.y);
        wps.push_back({box.lo.x, ym});
        wps.push_back({box.hi.x, ym});
    } else {
        double y = box.lo.y + 0.5 * swath;
        bool eastbound = true;
        while (y < box.hi.y + 0.5 * swath - 1e-9) {
            if (eastbound) {
                wps.push_back({box.lo.x, y});
                wps.push_back({box.hi.x, y});
            } else {
                wps.push_back({box.hi.x, y});
                wps.push_back({box.lo.x, y});
            }
            eastbound = !eastbound;
            y += swath;
        }
    }

    // proportional waypoint chaser, integrated with a fine Euler step
    const double dt = 0.02;
    const double reach = 0.25 * swath + 0.5;
    double x = start.x, y = start.y, psi = 0.0, r = 0.0;
    std::vector<double> history;
    std::size_t wi = 0;
    double t = 0.0;
    while (wi < wps.size() && t < 10000.0) {
        const double dx = wps[wi].x - x;
        const double dy = wps[wi].y - y;
        if (std::hypot(dx, dy) < reach) {
            ++wi;
            continue;
        }
        const double err = wrap_angle(std::atan2(dy, dx) - psi);
        const double p = std::clamp(2.0 * err, -p_max, p_max);
        history.push_back(p);
        x += dt * vehicle.v * std::cos(psi);
        y += dt * vehicle.v * std::sin(psi);
        psi += dt * r;
        r += dt * (vehicle.k_gain * p - r) / vehicle.t_const;
        t += dt;
    }

    ControlSchedule schedule;
    if (history.empty()) {
        // start already within reach of every waypoint: run one straight leg
        schedule.t_f = std::max(box.hi.x - box.lo.x, 1.0) / vehicle.v;
        schedule.knots.assign(static_cast<std::size_t>(n_knots), 0.0);
        return schedule;
    }
    schedule.t_f = static_cast<double>(history.size()) * dt;
    schedule.knots.resize(static_cast<std::size_t>(n_knots));
    for (int j = 0; j < n_knots; ++j) {
        const double tj = schedule.t_f * static_cast<double>(j) /
                          static_cast<double>(n_knots - 1);
        const std::size_t idx =
            std::min(static_cast<std::size_t>(tj / dt), history.size() - 1);
        schedule.knots[static_cast<std::size_t>(j)] = history[idx];
    }
    return schedule;
}

void risk_gradient(const DomainSpec& domain, Point start, const UnitPointSet& points,
                   const SensorParams& sensor, const VehicleParams& vehicle,
                   const ControlSchedule& schedule, int steps_per_knot,
                   double& d_tf, std::vector<double>& d_knots) {
    const VehicleState s0{start.x, start.y, 0.0, 0.0};
    const IntegrationTape tape = integrate_tape(s0, schedule, steps_per_knot, vehicle);
    const Trajectory traj = trajectory_from_tape(tape, schedule);
    const std::vector<Point> targets = map_points(points, domain);

    std::vector<double> expo;
    exposure_batch(traj, targets, sensor, expo);

    const double inv_total = 1.0 / static_cast<double>(targets.size());
    std::vector<double> coef(targets.size());
    double tf_direct = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        coef[j] = -std::exp(-expo[j]) * inv_total;
        tf_direct += coef[j] * expo[j];
    }
    tf_direct /= schedule.t_f;

    // trapezoid weights couple every time node to every target; this is the
    // expensive sweep, parallel over nodes with a fixed-order inner sum
    const std::size_t n_steps = tape.steps.size();
    const std::size_t n_nodes = n_steps + 1;
    std::vector<std::array<double, 3>> node_bar(n_nodes);
    const std::int64_t nn = static_cast<std::int64_t>(n_nodes);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nn; ++i) {
        const VehicleState& si = traj.states[static_cast<std::size_t>(i)];
        double ax = 0.0, ay = 0.0, ap = 0.0;
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const RateGrad rg = detection_rate_grad(si, targets[j], sensor);
            ax += coef[j] * rg.d_x;
            ay += coef[j] * rg.d_y;
            ap += coef[j] * rg.d_psi;
        }
        const double w =
            tape.dt * ((i == 0 || i == nn - 1) ? 0.5 : 1.0);
        node_bar[static_cast<std::size_t>(i)] = {w * ax, w * ay, w * ap};
    }

    // reverse sweep through the stored RK4 stages
    d_knots.assign(schedule.knots.size(), 0.0);
    const double h = tape.dt;
    const double dtau = 1.0 / static_cast<double>(n_steps);
    const double kt = vehicle.k_gain / vehicle.t_const;
    std::array<double, 4> sbar{node_bar[n_steps][0], node_bar[n_steps][1],
                               node_bar[n_steps][2], 0.0};
    double hbar_sum = 0.0;
    for (std::size_t ii = n_steps; ii-- > 0;) {
        const RkStep& st = tape.steps[ii];
        const double psi1 = st.s[2];
        const double psi2 = st.s[2] + 0.5 * h * st.k1[2];
        const double psi3 = st.s[2] + 0.5 * h * st.k2[2];
        const double psi4 = st.s[2] + h * st.k3[2];

        std::array<double, 4> kbar4, kbar3, kbar2, kbar1;
        for (int d = 0; d < 4; ++d) kbar4[d] = h / 6.0 * sbar[d];
        const std::array<double, 4> ubar4 = jac_t(psi4, kbar4, vehicle);
        for (int d = 0; d < 4; ++d) kbar3[d] = h / 3.0 * sbar[d] + h * ubar4[d];
        const std::array<double, 4> ubar3 = jac_t(psi3, kbar3, vehicle);
        for (int d = 0; d < 4; ++d) kbar2[d] = h / 3.0 * sbar[d] + 0.5 * h * ubar3[d];
        const std::array<double, 4> ubar2 = jac_t(psi2, kbar2, vehicle);
        for (int d = 0; d < 4; ++d) kbar1[d] = h / 6.0 * sbar[d] + 0.5 * h * ubar2[d];
        const std::array<double, 4> ubar1 = jac_t(psi1, kbar1, vehicle);

        std::array<double, 4> ksum;
        for (int d = 0; d < 4; ++d)
            ksum[d] = st.k1[d] + 2.0 * st.k2[d] + 2.0 * st.k3[d] + st.k4[d];
        hbar_sum += dot4(ksum, sbar) / 6.0 + 0.5 * dot4(st.k1, ubar2) +
                    0.5 * dot4(st.k2, ubar3) + dot4(st.k3, ubar4);

        const double tau = static_cast<double>(ii) * dtau;
        scatter_control(schedule, tau, kt * kbar1[3], d_knots);
        scatter_control(schedule, tau + 0.5 * dtau, kt * (kbar2[3] + kbar3[3]), d_knots);
        scatter_control(schedule, tau + dtau, kt * kbar4[3], d_knots);

        for (int d = 0; d < 4; ++d)
            sbar[d] += ubar1[d] + ubar2[d] + ubar3[d] + ubar4[d];
        sbar[0] += node_bar[ii][0];
        sbar[1] += node_bar[ii][1];
        sbar[2] += node_bar[ii][2];
    }
    d_tf = tf_direct + hbar_sum / static_cast<double>(n_steps);
}

Solution solve(const DomainSpec& domain, Point start, double m_risk,
               const UnitPointSet& points, const SensorParams& sensor,
               const VehicleParams& vehicle, const NlpSettings& settings,
               const ControlSchedule* guess) {
    settings.validate();
    if (!(m_risk > 0.0 && m_risk < 1.0))
        throw ValidationError("solve: requested risk must lie in (0,1)");

    const ControlSchedule warm =
        guess ? *guess : initial_guess(domain, start, sensor, vehicle, settings.n_knots);
    const double t_ref = warm.t_f;
    const double p_max = vehicle.p_max_rad();
    const std::size_t nk = warm.knots.size();
    const VehicleState s0{start.x, start.y, 0.0, 0.0};

    long evals = 0;
    auto schedule_of = [&](const std::vector<double>& th) {
        ControlSchedule s;
        s.t_f = th[0] * t_ref;
        s.knots.resize(nk);
        for (std::size_t k = 0; k < nk; ++k) s.knots[k] = th[k + 1] * p_max;
        return s;
    };
    auto eval_risk = [&](const std::vector<double>& th) -> double {
        const ControlSchedule s = schedule_of(th);
        const Trajectory traj = integrate(s0, s, settings.steps_per_knot, vehicle);
        ++evals;
        return risk_estimate(traj, points, domain, sensor).value;
    };

    double lam = 0.0;
    double mu = settings.penalty_init;

    BoxProblem box;
    box.lo.assign(nk + 1, -1.0);
    box.hi.assign(nk + 1, 1.0);
    box.lo[0] = 0.05;
    box.hi[0] = 2.0;
    auto merit = [&](const std::vector<double>& th) -> double {
        double risk;
        try {
            risk = eval_risk(th);
        } catch (const NonFiniteState&) {
            return kInf; // inadmissible corner of the box; reject the step
        }
        const double c = risk - m_risk;
        const double v = std::max(0.0, lam / mu + c);
        return th[0] + 0.5 * mu * v * v - 0.5 * lam * lam / mu;
    };
    auto merit_grad_adjoint = [&](const std::vector<double>& th,
                                  std::vector<double>& g) -> double {
        double risk;
        try {
            risk = eval_risk(th);
        } catch (const NonFiniteState&) {
            g.assign(th.size(), 0.0);
            return kInf;
        }
        const double c = risk - m_risk;
        const double v = std::max(0.0, lam / mu + c);
        g.assign(th.size(), 0.0);
        g[0] = 1.0;
        if (v > 0.0) {
            double d_tf = 0.0;
            std::vector<double> d_knots;
            risk_gradient(domain, start, points, sensor, vehicle, schedule_of(th),
                          settings.steps_per_knot, d_tf, d_knots);
            ++evals;
            g[0] += mu * v * d_tf * t_ref;
            for (std::size_t k = 0; k < nk; ++k)
                g[k + 1] += mu * v * d_knots[k] * p_max;
        }
        return th[0] + 0.5 * mu * v * v - 0.5 * lam * lam / mu;
    };
    auto merit_grad_fd = [&](const std::vector<double>& th,
                             std::vector<double>& g) -> double {
        const double f0 = merit(th);
        g.assign(th.size(), 0.0);
        std::vector<double> probe = th;
        for (std::size_t k = 0; k < th.size(); ++k) {
            const double hstep = settings.grad_step * std::max(1.0, std::abs(th[k]));
            probe[k] = th[k] + hstep;
            g[k] = (merit(probe) - f0) / hstep;
            probe[k] = th[k];
        }
        return f0;
    };
    box.value = merit;
    if (settings.use_adjoint)
        box.value_grad = merit_grad_adjoint;
    else
        box.value_grad = merit_grad_fd;

    std::vector<double> th(nk + 1);
    th[0] = 1.0;
    for (std::size_t k = 0; k < nk; ++k) th[k + 1] = warm.knots[k] / p_max;

    std::optional<std::vector<double>> best;
    int outer_done = 0;
    int inner_total = 0;
    for (int outer = 0; outer < settings.max_outer; ++outer) {
        outer_done = outer + 1;
        const InnerResult inner = lbfgs_box(box, th, settings.max_inner);
        th = inner.x;
        inner_total += inner.iterations;

        const double risk = eval_risk(th);
        const double c = risk - m_risk;
        if (c <= settings.risk_tolerance) {
            if (!best || th[0] < (*best)[0]) best = th;
            // feasible and essentially active: nothing left to trade
            if (outer >= 2 && c > -5.0 * settings.risk_tolerance) break;
        }
        lam = std::max(0.0, lam + mu * c);
        if (c > settings.risk_tolerance) mu *= settings.penalty_growth;
    }

    Solution sol;
    sol.converged = best.has_value();
    const std::vector<double>& final_th = best ? *best : th;
    sol.schedule = schedule_of(final_th);
    sol.trajectory = integrate(s0, sol.schedule, settings.steps_per_knot, vehicle);
    sol.t_f = sol.schedule.t_f;
    sol.internal_risk = risk_estimate(sol.trajectory, points, domain, sensor);
    sol.outer_iterations = outer_done;
    sol.inner_iterations = inner_total;
    sol.n_evaluations = evals;
    return sol;
}

GradientCheckReport gradient_check(const DomainSpec& domain, Point start,
                                   const UnitPointSet& points, const SensorParams& sensor,
                                   const VehicleParams& vehicle, std::uint64_t seed,
                                   int n_probes) {
    constexpr int kKnots = 12;
    constexpr int kSpk = 6;
    const ControlSchedule base = initial_guess(domain, start, sensor, vehicle, kKnots);
    const double p_max = vehicle.p_max_rad();
    const VehicleState s0{start.x, start.y, 0.0, 0.0};

    auto risk_of = [&](const ControlSchedule& s) {
        const Trajectory traj = integrate(s0, s, kSpk, vehicle);
        return risk_estimate(traj, points, domain, sensor).value;
    };

    GradientCheckReport rep;
    rep.n_probes = n_probes;
    for (int probe = 0; probe < n_probes; ++probe) {
        ControlSchedule s;
        const std::uint64_t base_k = static_cast<std::uint64_t>(probe) * 64;
        s.t_f = base.t_f * (0.7 + 0.6 * counter_unit(seed, base_k));
        s.knots.resize(kKnots);
        for (int k = 0; k < kKnots; ++k)
            s.knots[static_cast<std::size_t>(k)] =
                0.8 * p_max * (2.0 * counter_unit(seed, base_k + 1 + static_cast<std::uint64_t>(k)) - 1.0);

        double d_tf = 0.0;
        std::vector<double> d_knots;
        risk_gradient(domain, start, points, sensor, vehicle, s, kSpk, d_tf, d_knots);

        // central differences over (t_f, knots)
        std::vector<double> fd(1 + kKnots, 0.0);
        {
            const double hstep = 1e-5 * s.t_f;
            ControlSchedule plus = s, minus = s;
            plus.t_f += hstep;
            minus.t_f -= hstep;
            fd[0] = (risk_of(plus) - risk_of(minus)) / (2.0 * hstep);
        }
        for (int k = 0; k < kKnots; ++k) {
            const double hstep = 1e-5 * std::max(std::abs(s.knots[static_cast<std::size_t>(k)]),
                                                 0.1 * p_max);
            ControlSchedule plus = s, minus = s;
            plus.knots[static_cast<std::size_t>(k)] += hstep;
            minus.knots[static_cast<std::size_t>(k)] -= hstep;
            fd[static_cast<std::size_t>(k) + 1] = (risk_of(plus) - risk_of(minus)) / (2.0 * hstep);
        }

        double max_abs = 0.0, fd_scale = 0.0;
        max_abs = std::abs(d_tf - fd[0]);
        fd_scale = std::abs(fd[0]);
        for (int k = 0; k < kKnots; ++k) {
            max_abs = std::max(max_abs, std::abs(d_knots[static_cast<std::size_t>(k)] -
                                                 fd[static_cast<std::size_t>(k) + 1]));
            fd_scale = std::max(fd_scale, std::abs(fd[static_cast<std::size_t>(k) + 1]));
        }
        rep.max_abs_error = std::max(rep.max_abs_error, max_abs);
        rep.max_rel_error =
            std::max(rep.max_rel_error, max_abs / std::max(fd_scale, 1e-12));
    }
    return rep;
}

} // namespace mcm
