#pragma once

// Experiment drivers shared by the ymhlab command line and the acceptance
// run. Each *Spec struct carries its own defaults (including every tolerance used
// to judge the outcome); the command line exposes them as config keys.

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "ymh/currents.hpp"
#include "ymh/flow.hpp"
#include "ymh/vortex.hpp"

namespace ymhlab {

// --- vortex ---------------------------------------------------------------

struct VortexSpec {
    std::vector<long> k{0, 1, 2, 3};
    double r_max = 30.0;
    double tol = 1e-10;
    double defect_tol = 5e-3;     // |E / 2 pi |k| - 1|
    double residual_tol = 1e-8;
    double time_limit = 1.0;      // seconds per profile
};

struct VortexRow {
    int k = 0;
    double energy = 0.0, rel_defect = 0.0, residual = 0.0, shooting = 0.0, seconds = 0.0;
    bool pass = false;
};

struct VortexResult {
    std::vector<VortexRow> rows;
    std::vector<ymh::VortexProfile> profiles;
    bool pass = true;
    std::string table() const;
};

VortexResult run_vortex(const VortexSpec& spec);

// --- minimize ---------------------------------------------------------------

struct MinimizeSpec {
    int n = 2;
    double length = 1.0;
    std::vector<long> flux{1};  // upper triangle (01), or (01, 02, 12)
    std::vector<double> eps{0.2, 0.1, 0.05};
    std::vector<long> cells{32, 64, 128};  // grid cells per axis, one per eps
    std::string init = "vortex";  // vortex | random
    double init_core = 2.0;       // wide-core start: profile at init_core * eps
    double init_noise = 0.3;      // amplitude of the smooth phase / modulus noise
    double dt_factor = 0.25;      // dt = dt_factor eps^2
    double t_end = 20.0;
    int stride = 10;
    double energy_tol = 0.10;     // |E / (2 pi target) - 1| at the finest level
    double liminf_slack = 10.0;   // 2 pi M <= E + slack h
    std::uint64_t seed = 1;
};

struct LiminfRow {
    double t = 0.0, energy = 0.0, two_pi_mass = 0.0, slack = 0.0;
    bool ok = true;
};

struct MinimizeLevel {
    double eps = 0.0, h = 0.0;
    int cells = 0;
    double energy = 0.0, ratio = 0.0;  // E / (2 pi target)
    bool stationary = false;
    double t_final = 0.0;
    long steps = 0;
    double mass = 0.0;
    std::vector<long> cls;
    std::vector<LiminfRow> liminf;
    int liminf_violations = 0;
    std::string trajectory_csv;
    ymh::PairState final_state;
    ymh::CubicalCurrent current;
};

struct MinimizeResult {
    double target = 0.0;  // minimal mass in the sector
    std::vector<long> expected_class;
    std::vector<MinimizeLevel> levels;
    bool energy_ok = false, monotone_trend = false, current_ok = false, liminf_ok = false;
    bool pass() const { return energy_ok && current_ok && liminf_ok; }
    std::string table() const;
    std::string liminf_table() const;
};

MinimizeResult run_minimize(const MinimizeSpec& spec);

// --- gamma (recovery side; the liminf side reuses run_minimize) ---------------

inline MinimizeSpec liminf_default() {
    MinimizeSpec s;
    s.n = 3;
    s.flux = {1, 0, 0};
    s.eps = {0.2, 0.1};
    s.cells = {16, 32};
    s.dt_factor = 0.5;
    s.t_end = 2.0;
    s.stride = 5;
    s.energy_tol = 0.15;
    s.init_noise = 0.1;
    return s;
}

struct GammaSpec {
    int axis = 2;                         // loop direction in T^3
    std::vector<double> eps{0.1, 0.05};
    std::vector<long> cells{32, 64};
    std::vector<double> tol{0.15, 0.10};  // |E / (2 pi M) - 1| per level
    double length = 1.0;
    MinimizeSpec liminf = liminf_default();  // the minimizing runs for the liminf ledger
    bool run_liminf = true;
};

struct RecoveryRow {
    double eps = 0.0;
    int cells = 0;
    double energy = 0.0, two_pi_mass = 0.0, ratio = 0.0, tol = 0.0;
    bool current_matches = false;
    bool pass = false;
};

struct GammaResult {
    std::vector<RecoveryRow> recovery;
    MinimizeResult liminf;
    bool recovery_ok = true;
    std::string table() const;
};

GammaResult run_gamma(const GammaSpec& spec);

// --- monotonicity -------------------------------------------------------------

struct MonotonicitySpec {
    std::vector<double> eps{0.2, 0.1, 0.05};
    // n = 2 vortex benchmark on a torus of side length2.
    double length2 = 2.0;
    std::vector<long> cells2{32, 64, 128};
    double T = 2.0;
    double C2 = 1.0;
    double ratio_bound = 10.0;
    double noise = 0.2;   // smooth perturbation of the synthesized vortex
    // n = 3 density table at t = T from smooth random data in the sector
    // flux3 on the unit torus.
    bool run3 = true;
    std::vector<long> cells3{16, 24, 32};
    std::vector<long> flux3{1, 0, 0};
    double dt_factor3 = 1.0;
    double density_bound = 4.0;  // in units of 2 pi
    double dt_factor = 0.25;
    std::uint64_t seed = 1;
};

struct MonotonicityRow {
    double eps = 0.0;
    int cells = 0;
    double psi_ratio = 0.0;
    std::vector<ymh::MonotonicityPoint> series;
};

struct DensityRow {
    double eps = 0.0;
    int cells = 0;
    std::array<double, 3> x0{};
    ymh::DensityRatio table;
};

struct MonotonicityResult {
    std::vector<MonotonicityRow> psi;
    std::vector<DensityRow> density;
    bool psi_ok = true, density_ok = true;
    std::string table() const;
};

MonotonicityResult run_monotonicity(const MonotonicitySpec& spec);

// --- width ----------------------------------------------------------------------

struct WidthSpec {
    std::vector<long> cls{1, 0};
    double length = 1.0;
    long cells = 32;           // flow grid
    long coarse = 4;           // brute-force grid
    double eps = 0.1;
    int level = 3;             // 3^level + 1 family members
    double delta = 0.5;        // transverse modulation of the sweep-out
    double t_flow = 0.0;       // optional member-wise relaxation, reported only
    double dt_factor = 0.25;
    double mass_cap = 6.0;
    double tol_rel = 0.05;     // max E >= 2 pi W (1 - tol_rel)
};

struct WidthMember {
    double s = 0.0, energy_before = 0.0, energy_after = 0.0, mass = 0.0;
};

struct WidthResult {
    std::vector<WidthMember> members;
    double max_energy = 0.0;
    ymh::WidthResult width;
    std::vector<long> family_class;  // of the tightened family, when available
    std::string class_note;
    bool ledger_ok = false;
    std::string table() const;
};

WidthResult run_width(const WidthSpec& spec);

// --- schemas ------------------------------------------------------------------

Schema vortex_schema();
Schema minimize_schema();
Schema gamma_schema();
Schema monotonicity_schema();
Schema width_schema();
Schema flatnorm_schema();

VortexSpec vortex_spec(const Resolved& r);
MinimizeSpec minimize_spec(const Resolved& r, const std::string& prefix = "minimize.");
GammaSpec gamma_spec(const Resolved& r);
MonotonicitySpec monotonicity_spec(const Resolved& r);
WidthSpec width_spec(const Resolved& r);

// Reads a current written by CubicalCurrent::to_csv.
ymh::CubicalCurrent read_current_csv(const std::string& text, ymh::LatticeHandle lattice, int dim, bool dual);

}  // namespace ymhlab
