#pragma once

// L^2 gradient flow of the energy and the diagnostics evaluated along it.
//
// Direct mode integrates
//   du/dt     = -nabla* nabla u + (1 - |u|^2) u / (2 eps^2),
//   dalpha/dt = -d* d alpha + eps^{-2} <i u, nabla u>,
// in the fixed background trivialization. Coulomb mode adds the gauge
// rotation phi = eps^{-2} Q(current): u picks up i phi u and alpha picks
// up d phi, which keeps d* alpha = 0.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ymh/functional.hpp"
#include "ymh/lattice.hpp"

namespace ymh {

enum class FlowScheme { explicit_euler, imex };
enum class GaugeMode { direct, coulomb };

struct FlowParams {
    double dt = 0.0;  // 0 picks default_dt
    double t_end = 1.0;
    FlowScheme scheme = FlowScheme::imex;
    GaugeMode gauge = GaugeMode::direct;
    // Early stop once the l2 Euler-Lagrange residual drops below this.
    // Negative: 1e-6 sqrt(E(0)). Zero: never stop early.
    double stationarity_tol = -1.0;
    int monitor_stride = 10;
    bool record_density = false;  // keep the energy density of every sample
    bool max_principle = true;    // check max |u| <= 1 + 1e-9 when |u_0| <= 1
    bool check_monotone = true;   // check E_{k+1} <= E_k + 1e-8 E(0)
    double cg_tol = 1e-12;        // relative residual of the implicit u solve
    int cg_max_iter = 2000;
};

struct FlowSample;
// Called with every recorded sample and the state at that time.
using FlowObserver = std::function<void(const FlowSample&, const PairState&)>;

// 0.2 min(h)^2 min(1, eps^2).
double explicit_dt_limit(const Grid& g, double eps);
// The explicit limit, or eps^2 / 4 for IMEX.
double default_dt(const Grid& g, double eps, FlowScheme scheme);
// Throws InvalidArgument for dt <= 0, t_end < 0, a non-positive stride, or
// a step above the stability limit (explicit: the guard; IMEX: eps^2).
void check_params(const Grid& g, double eps, const FlowParams& params);

// One step. Coulomb mode expects d* alpha = 0 on input (see coulomb_project).
PairState step(const PairState& pair, const FlowParams& params);

struct FlowSample {
    double t = 0.0;
    EnergyReport report;            // density kept only with record_density
    double dissipation_residual = 0.0;  // |Delta E - dissipation| / Delta E since t = 0
    double max_xi_plus = 0.0;
    double max_abs_u = 0.0;
    double el_l2 = 0.0;
};

struct Trajectory {
    std::vector<FlowSample> samples;
    PairState final_state;
    double dt = 0.0;
    int monitor_stride = 1;
    long steps = 0;
    bool stationary = false;
    double max_energy_increase = 0.0;  // max_k (E_{k+1} - E_k) / E(0)
    double max_abs_u = 0.0;            // over every step
    double energy_drop = 0.0;          // E(0) - E(end)
    double dissipation = 0.0;          // 2 int int (|u_t|^2 + eps^2 |alpha_t|^2)

    static std::string csv_header();
    std::string csv() const;
};

// Integrates to t_end or stationarity. Throws NumericError on NaN/Inf
// (naming the step), on a max-principle violation or on an energy
// increase above tolerance when the respective checks are on.
Trajectory run(const PairState& pair, const FlowParams& params, const FlowObserver& observer = {});

// xi = eps |omega| - (1 - |u|^2) / (2 eps) per site, |omega| the norm of the
// plaquette-averaged curvature.
FormField discrepancy(const PairState& pair);

// Periodic heat kernel K(t, x, x0) at the sites, normalized so that
// sum K * cell volume = 1. Throws InvalidArgument for t <= 0.
FormField heat_kernel(const Grid& g, double t, const std::array<double, kMaxDim>& x0);

struct MonotonicityPoint {
    double t, phi, psi;
};

struct MonotonicityProfile {
    std::vector<MonotonicityPoint> points;
    double ratio = 0.0;  // max Psi / (Psi(T - 1) + 1)
};

// Phi(t) = sum K(T - t, ., x0) e_t vol and
// Psi(t) = (T - t)^{1 + C2 eps^{2/(n-1)}} e^{zeta(t)} Phi(t) over the samples
// in [T - 1, T), zeta(t) = (C2 n / 2) int_1^t log(T - s) ds. Requires recorded
// densities, T in [2, 3], a sample at T - 1 and no gap wider than the stride.
MonotonicityProfile monotonicity_profile(const Trajectory& traj, double T,
                                         const std::array<double, kMaxDim>& x0, double C2);

struct DensityRatio {
    std::vector<double> radius;
    std::vector<double> ratio;  // r^{2-n} sum_{B_r(x0)} e vol
    double max = 0.0;
};

// Radii eps, sqrt(2) eps, ... up to 1.
DensityRatio density_ratio(const PairState& pair, const std::array<double, kMaxDim>& x0);

}  // namespace ymh
