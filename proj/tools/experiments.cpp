#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "ymh/functional.hpp"

namespace ymhlab {

using namespace ymh;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& v, const char* sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        if constexpr (std::is_floating_point_v<T>)
            s += num(v[i]);
        else
            s += std::to_string(v[i]);
    }
    return s;
}

LatticeHandle torus(int n, long cells, double length, const std::vector<long>& flux) {
    std::vector<int> dims(n, static_cast<int>(cells));
    std::vector<double> lengths(n, length);
    std::vector<double> f(flux.begin(), flux.end());
    if (static_cast<int>(f.size()) != (n == 2 ? 1 : 3))
        throw InvalidArgument("flux needs " + std::to_string(n == 2 ? 1 : 3) + " entries for n = " + std::to_string(n));
    return make_grid(n, dims, lengths, f);
}

// A few low Fourier modes with Gaussian coefficients, real-valued.
class SmoothNoise {
public:
    SmoothNoise(const Grid& g, std::mt19937_64& rng, int kmax = 2) : g_(g) {
        std::normal_distribution<double> N(0.0, 1.0);
        std::uniform_real_distribution<double> U(0.0, kTwoPi);
        const int kz = g.n() == 3 ? kmax : 0;
        for (int a = -kmax; a <= kmax; ++a)
            for (int b = -kmax; b <= kmax; ++b)
                for (int c = -kz; c <= kz; ++c) modes_.push_back({double(a), double(b), double(c), N(rng), U(rng)});
        norm_ = 1.0 / std::sqrt(static_cast<double>(modes_.size()));
    }
    double operator()(std::size_t x) const {
        double s = 0.0;
        for (const auto& m : modes_) {
            double ph = m[4];
            for (int a = 0; a < g_.n(); ++a) ph += kTwoPi * m[a] * g_.position(x, a) / g_.length(a);
            s += m[3] * std::cos(ph);
        }
        return s * norm_;
    }

private:
    const Grid& g_;
    std::vector<std::array<double, 5>> modes_;
    double norm_ = 1.0;
};

void clip_unit(PairState& p) {
    for (cplx& z : p.u.values)
        if (std::abs(z) > 1.0) z /= std::abs(z);
}

// Multiplies u by (1 + a m(x)) e^{i a theta(x)} for smooth m, theta, then clips to |u| <= 1.
void perturb(PairState& p, double amp, std::mt19937_64& rng) {
    if (amp == 0.0) return;
    const Grid& g = p.grid();
    const SmoothNoise m(g, rng), th(g, rng);
    for (std::size_t x = 0; x < g.sites(); ++x) p.u[x] *= (1.0 + amp * m(x)) * std::polar(1.0, amp * kTwoPi * th(x));
    clip_unit(p);
}

PairState smooth_random(LatticeHandle lat, double eps, std::mt19937_64& rng) {
    PairState p = make_pair(lat, eps);
    const Grid& g = p.grid();
    const SmoothNoise re(g, rng), im(g, rng);
    for (std::size_t x = 0; x < g.sites(); ++x) p.u[x] = 4.0 * cplx(re(x), im(x));
    clip_unit(p);
    return p;
}

// Minimal cycle of the flux sector: one dual point (n = 2) or one axis loop per
// nonzero flux entry (n = 3), placed in distinct cells near the middle.
CubicalCurrent sector_cycle(LatticeHandle lat, const std::vector<long>& flux) {
    const Grid& g = lat->grid;
    if (g.n() == 2) {
        CubicalCurrent c(lat, 0, true);
        if (flux[0] != 0) c.add(Cell{{g.dim(0) / 2, g.dim(1) / 2, 0}, 0u}, flux[0]);
        return c;
    }
    CubicalCurrent c(lat, 1, true);
    // flux (01, 02, 12) -> loops along axes 2, 1, 0; the axis-1 loop carries -m02.
    const int axis[3] = {2, 1, 0};
    const long mult[3] = {flux[0], -flux[1], flux[2]};
    for (int i = 0; i < 3; ++i) {
        if (mult[i] == 0) continue;
        Index3 through{g.dim(0) / 2, g.dim(1) / 2, g.dim(2) / 2};
        // Skew loops sit in different transverse slabs.
        through[axis[i]] = 0;
        for (int a = 0; a < 3; ++a)
            if (a != axis[i]) through[a] += i * g.dim(a) / 4;
        c += axis_loop(lat, axis[i], through, mult[i]);
    }
    return c;
}

std::vector<long> sector_class(const std::vector<long>& flux) {
    if (flux.size() == 1) return {flux[0]};
    return {flux[2], -flux[1], flux[0]};
}

double sector_min_mass(int n, double length, const std::vector<long>& flux) {
    double m = 0.0;
    for (long f : flux) m += std::abs(f);
    return n == 2 ? m : m * length;
}

template <typename T>
std::vector<T> per_level(const std::vector<T>& v, std::size_t levels, const char* what) {
    if (v.size() == levels) return v;
    if (v.size() == 1) return std::vector<T>(levels, v[0]);
    throw InvalidArgument(std::string(what) + " needs one entry per eps value");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// --- vortex -------------------------------------------------------------------

VortexResult run_vortex(const VortexSpec& spec) {
    VortexResult res;
    for (long k : spec.k) {
        const auto t0 = std::chrono::steady_clock::now();
        VortexProfile p = solve_profile(static_cast<int>(k), spec.r_max, spec.tol);
        const ProfileEnergy e = profile_energy(p);
        VortexRow row;
        row.seconds = seconds_since(t0);
        row.k = static_cast<int>(k);
        row.energy = e.value;
        row.rel_defect = k == 0 ? std::abs(e.value) : std::abs(e.defect) / (kTwoPi * std::abs(k));
        row.residual = p.max_residual();
        row.shooting = p.shooting_coefficient();
        row.pass = row.rel_defect < spec.defect_tol && row.residual <= spec.residual_tol && row.seconds < spec.time_limit;
        res.pass = res.pass && row.pass;
        res.rows.push_back(row);
        res.profiles.push_back(std::move(p));
    }
    return res;
}

std::string VortexResult::table() const {
    std::string s = "k,energy,energy_over_2pi_k,rel_defect,max_residual,shooting_coefficient,seconds,pass\n";
    for (const auto& r : rows)
        s += std::to_string(r.k) + "," + num(r.energy) + "," + num(r.k ? r.energy / (kTwoPi * std::abs(r.k)) : 0.0) + "," +
             num(r.rel_defect) + "," + num(r.residual) + "," + num(r.shooting) + "," + num(r.seconds) + "," +
             (r.pass ? "1" : "0") + "\n";
    return s;
}

// --- minimize -----------------------------------------------------------------

MinimizeResult run_minimize(const MinimizeSpec& spec) {
    if (spec.n != 2 && spec.n != 3) throw InvalidArgument("minimize: n must be 2 or 3");
    MinimizeResult res;
    res.target = sector_min_mass(spec.n, spec.length, spec.flux);
    res.expected_class = sector_class(spec.flux);
    const auto cells = per_level(spec.cells, spec.eps.size(), "minimize cells");
    std::mt19937_64 rng(spec.seed);

    for (std::size_t i = 0; i < spec.eps.size(); ++i) {
        const double eps = spec.eps[i];
        LatticeHandle lat = torus(spec.n, cells[i], spec.length, spec.flux);
        const Grid& g = lat->grid;
        PairState p;
        if (spec.init == "vortex") {
            const CubicalCurrent cyc = sector_cycle(lat, spec.flux);
            const double e0 = std::min(1.0, spec.init_core * eps);
            p = cyc.empty() ? make_pair(lat, eps) : build_recovery_pair(lat, cyc, e0);
            p.eps = eps;
            perturb(p, spec.init_noise, rng);
        } else if (spec.init == "random") {
            p = smooth_random(lat, eps, rng);
        } else {
            throw InvalidArgument("minimize: unknown init '" + spec.init + "'");
        }

        FlowParams fp;
        fp.dt = spec.dt_factor * eps * eps;
        fp.t_end = spec.t_end;
        fp.monitor_stride = spec.stride;
        MinimizeLevel lv;
        lv.eps = eps;
        lv.cells = static_cast<int>(cells[i]);
        lv.h = g.min_spacing();
        const Trajectory tr = run(p, fp, [&](const FlowSample& s, const PairState& q) {
            LiminfRow row;
            row.t = s.t;
            row.energy = s.report.total;
            row.two_pi_mass = kTwoPi * mass(extract_jacobian_current(q).current);
            row.slack = spec.liminf_slack * lv.h;
            row.ok = row.two_pi_mass <= row.energy + row.slack;
            lv.liminf_violations += row.ok ? 0 : 1;
            lv.liminf.push_back(row);
        });
        lv.energy = tr.samples.back().report.total;
        lv.ratio = res.target > 0.0 ? lv.energy / (kTwoPi * res.target) : lv.energy;
        lv.stationary = tr.stationary;
        lv.t_final = tr.samples.back().t;
        lv.steps = tr.steps;
        lv.trajectory_csv = tr.csv();
        lv.final_state = tr.final_state;
        lv.current = extract_jacobian_current(tr.final_state).current;
        lv.mass = mass(lv.current);
        if (lv.current.dim() == 0 || boundary(lv.current).empty()) lv.cls = homology_class(lv.current);
        res.levels.push_back(std::move(lv));
    }

    const auto& last = res.levels.back();
    res.energy_ok = res.target > 0.0 ? std::abs(last.ratio - 1.0) <= spec.energy_tol : last.energy <= spec.energy_tol;
    res.monotone_trend = true;
    for (std::size_t i = 1; i < res.levels.size(); ++i)
        if (std::abs(res.levels[i].ratio - 1.0) > std::abs(res.levels[i - 1].ratio - 1.0) + 1e-3)
            res.monotone_trend = false;
    res.current_ok = true;
    res.liminf_ok = true;
    for (const auto& lv : res.levels) {
        res.current_ok = res.current_ok && std::abs(lv.mass - res.target) <= 1e-9 * std::max(1.0, res.target) &&
                         lv.cls == res.expected_class;
        res.liminf_ok = res.liminf_ok && lv.liminf_violations == 0;
    }
    return res;
}

std::string MinimizeResult::table() const {
    std::string s = "eps,cells,h,energy,energy_over_2pi_target,stationary,t_final,steps,mass,class,liminf_violations\n";
    for (const auto& l : levels)
        s += num(l.eps) + "," + std::to_string(l.cells) + "," + num(l.h) + "," + num(l.energy) + "," + num(l.ratio) + "," +
             (l.stationary ? "1" : "0") + "," + num(l.t_final) + "," + std::to_string(l.steps) + "," + num(l.mass) +
             ",\"" + join(l.cls) + "\"," + std::to_string(l.liminf_violations) + "\n";
    return s;
}

std::string MinimizeResult::liminf_table() const {
    std::string s = "eps,t,energy,two_pi_mass,slack,ok\n";
    for (const auto& l : levels)
        for (const auto& r : l.liminf)
            s += num(l.eps) + "," + num(r.t) + "," + num(r.energy) + "," + num(r.two_pi_mass) + "," + num(r.slack) + "," +
                 (r.ok ? "1" : "0") + "\n";
    return s;
}

// --- gamma --------------------------------------------------------------------

GammaResult run_gamma(const GammaSpec& spec) {
    GammaResult res;
    if (spec.axis < 0 || spec.axis > 2) throw InvalidArgument("gamma: axis must be 0, 1 or 2");
    const auto cells = per_level(spec.cells, spec.eps.size(), "gamma cells");
    const auto tol = per_level(spec.tol, spec.eps.size(), "gamma tol");
    std::vector<long> flux{0, 0, 0};
    // Loop along axis 2, 1, 0 lives in the flux sector m01, -m02, m12.
    if (spec.axis == 2) flux[0] = 1;
    if (spec.axis == 1) flux[1] = -1;
    if (spec.axis == 0) flux[2] = 1;
    for (std::size_t i = 0; i < spec.eps.size(); ++i) {
        LatticeHandle lat = torus(3, cells[i], spec.length, flux);
        Index3 through{static_cast<int>(cells[i] / 2), static_cast<int>(cells[i] / 2), static_cast<int>(cells[i] / 2)};
        through[spec.axis] = 0;
        const CubicalCurrent loop = axis_loop(lat, spec.axis, through, 1);
        const PairState p = build_recovery_pair(lat, loop, spec.eps[i]);
        RecoveryRow row;
        row.eps = spec.eps[i];
        row.cells = static_cast<int>(cells[i]);
        row.energy = energy(p).total;
        row.two_pi_mass = kTwoPi * mass(loop);
        row.ratio = row.energy / row.two_pi_mass;
        row.tol = tol[i];
        row.current_matches = extract_jacobian_current(p).current == loop;
        row.pass = std::abs(row.ratio - 1.0) <= row.tol && row.current_matches;
        res.recovery_ok = res.recovery_ok && row.pass;
        res.recovery.push_back(row);
    }
    if (spec.run_liminf) res.liminf = run_minimize(spec.liminf);
    return res;
}

std::string GammaResult::table() const {
    std::string s = "eps,cells,energy,two_pi_mass,ratio,tol,current_matches,pass\n";
    for (const auto& r : recovery)
        s += num(r.eps) + "," + std::to_string(r.cells) + "," + num(r.energy) + "," + num(r.two_pi_mass) + "," +
             num(r.ratio) + "," + num(r.tol) + "," + (r.current_matches ? "1" : "0") + "," + (r.pass ? "1" : "0") + "\n";
    return s;
}

// --- monotonicity -------------------------------------------------------------

MonotonicityResult run_monotonicity(const MonotonicitySpec& spec) {
    if (spec.T < 2.0 || spec.T > 3.0) throw InvalidArgument("monotonicity: T must lie in [2, 3]");
    MonotonicityResult res;
    std::mt19937_64 rng(spec.seed);
    const auto cells2 = per_level(spec.cells2, spec.eps.size(), "monotonicity cells2");
    const VortexProfile prof = solve_profile(1);
    for (std::size_t i = 0; i < spec.eps.size(); ++i) {
        const double eps = spec.eps[i];
        LatticeHandle lat = torus(2, cells2[i], spec.length2, {1});
        const double h = lat->grid.spacing(0);
        const std::array<double, 3> x0{0.5 * spec.length2 + 0.3 * h, 0.5 * spec.length2 + 0.2 * h, 0.0};
        PairState p = synthesize_planar(prof, eps, lat, {x0[0], x0[1]});
        perturb(p, spec.noise, rng);

        // 1 / dt is an integer and the sample spacing divides 1, so T - 1 is sampled.
        const long inv = static_cast<long>(std::ceil(1.0 / (spec.dt_factor * eps * eps)));
        long stride = std::max(1L, static_cast<long>(std::floor(0.025 * inv)));
        while (inv % stride) --stride;
        FlowParams fp;
        fp.dt = 1.0 / inv;
        fp.t_end = spec.T;
        fp.monitor_stride = static_cast<int>(stride);
        fp.stationarity_tol = 0.0;
        fp.record_density = true;
        const Trajectory tr = run(p, fp);
        const MonotonicityProfile mp = monotonicity_profile(tr, spec.T, x0, spec.C2);
        MonotonicityRow row;
        row.eps = eps;
        row.cells = static_cast<int>(cells2[i]);
        row.psi_ratio = mp.ratio;
        row.series = mp.points;
        res.psi_ok = res.psi_ok && mp.ratio <= spec.ratio_bound;
        res.psi.push_back(std::move(row));
    }

    if (!spec.run3) return res;
    const auto cells3 = per_level(spec.cells3, spec.eps.size(), "monotonicity cells3");
    for (std::size_t i = 0; i < spec.eps.size(); ++i) {
        const double eps = spec.eps[i];
        LatticeHandle lat = torus(3, cells3[i], 1.0, spec.flux3);
        const PairState p = smooth_random(lat, eps, rng);
        FlowParams fp;
        fp.dt = spec.dt_factor3 * eps * eps;
        fp.t_end = spec.T;
        fp.monitor_stride = 1000000;
        fp.stationarity_tol = 0.0;
        const Trajectory tr = run(p, fp);
        const EnergyReport rep = energy(tr.final_state);
        std::size_t best = 0;
        for (std::size_t x = 0; x < rep.density.values().size(); ++x)
            if (rep.density.values()[x] > rep.density.values()[best]) best = x;
        DensityRow row;
        row.eps = eps;
        row.cells = static_cast<int>(cells3[i]);
        for (int a = 0; a < 3; ++a) row.x0[a] = lat->grid.position(best, a);
        row.table = density_ratio(tr.final_state, row.x0);
        res.density_ok = res.density_ok && row.table.max <= spec.density_bound * kTwoPi;
        res.density.push_back(std::move(row));
    }
    return res;
}

std::string MonotonicityResult::table() const {
    std::string s = "kind,eps,cells,t_or_r,phi_or_ratio,psi\n";
    for (const auto& r : psi)
        for (const auto& pt : r.series)
            s += "psi," + num(r.eps) + "," + std::to_string(r.cells) + "," + num(pt.t) + "," + num(pt.phi) + "," +
                 num(pt.psi) + "\n";
    for (const auto& r : density)
        for (std::size_t i = 0; i < r.table.radius.size(); ++i)
            s += "density," + num(r.eps) + "," + std::to_string(r.cells) + "," + num(r.table.radius[i]) + "," +
                 num(r.table.ratio[i]) + ",\n";
    return s;
}

// --- width --------------------------------------------------------------------

WidthResult run_width(const WidthSpec& spec) {
    if (spec.cls.size() != 2) throw InvalidArgument("width: class needs two entries on T^2");
    WidthResult res;
    LatticeHandle lat = torus(2, spec.cells, spec.length, {0});
    const Grid& g = lat->grid;
    const int members = static_cast<int>(std::lround(std::pow(3.0, spec.level))) + 1;
    // The zeros travel along `perp`; the phase winds across it.
    const int perp = spec.cls[0] != 0 ? 0 : 1;
    const long wind[2] = {spec.cls[1], -spec.cls[0]};

    DiscreteFamily fam;
    fam.m = 1;
    fam.level = spec.level;
    for (int i = 0; i < members; ++i) {
        const double s = static_cast<double>(i) / (members - 1);
        PairState p = make_pair(lat, spec.eps);
        for (std::size_t x = 0; x < g.sites(); ++x) {
            double theta = 0.0;
            for (int a = 0; a < 2; ++a) theta += kTwoPi * wind[a] * g.position(x, a) / g.length(a);
            const double mod = 1.0 + spec.delta * 4.0 * s * (1.0 - s) * std::sin(kTwoPi * g.position(x, perp) / g.length(perp));
            p.u[x] = (1.0 - s) + s * mod * std::polar(1.0, theta);
        }
        for (int a = 0; a < 2; ++a)
            for (double& v : p.alpha.component(a)) v = s * kTwoPi * wind[a] / g.length(a);

        WidthMember w;
        w.s = s;
        w.energy_before = energy(p).total;
        w.energy_after = w.energy_before;
        if (spec.t_flow > 0.0) {
            FlowParams fp;
            fp.dt = spec.dt_factor * spec.eps * spec.eps;
            fp.t_end = spec.t_flow;
            fp.monitor_stride = 1000000;
            fp.max_principle = false;
            w.energy_after = run(p, fp).samples.back().report.total;
        }
        CubicalCurrent cur = extract_jacobian_current(p).current;
        w.mass = mass(cur);
        fam.values.push_back(std::move(cur));
        res.max_energy = std::max(res.max_energy, w.energy_before);
        res.members.push_back(w);
    }
    try {
        res.family_class = almgren_class(fam);
        res.class_note = "ok";
    } catch (const Error& e) {
        res.class_note = e.what();
    }
    res.width = width_bruteforce(spec.cls, torus(2, spec.coarse, spec.length, {0}), spec.mass_cap);
    res.ledger_ok = res.family_class == spec.cls && res.max_energy >= kTwoPi * res.width.width * (1.0 - spec.tol_rel);
    return res;
}

std::string WidthResult::table() const {
    std::string s = "s,energy_before,energy_after,mass\n";
    for (const auto& m : members)
        s += num(m.s) + "," + num(m.energy_before) + "," + num(m.energy_after) + "," + num(m.mass) + "\n";
    return s;
}

// --- schemas --------------------------------------------------------------------

namespace {

std::string b(bool v) { return v ? "true" : "false"; }

void add_minimize(Schema& s, const std::string& p, const MinimizeSpec& d) {
    s.push_back({p + "n", std::to_string(d.n), "torus dimension (2 or 3)"});
    s.push_back({p + "length", num(d.length), "side length of the torus"});
    s.push_back({p + "flux", join(d.flux), "flux sector, upper triangle (01[,02,12])"});
    s.push_back({p + "eps", join(d.eps), "eps values, coarse to fine"});
    s.push_back({p + "cells", join(d.cells), "grid cells per axis for each eps"});
    s.push_back({p + "init", d.init, "initial data: vortex or random"});
    s.push_back({p + "init_core", num(d.init_core), "core width of the vortex start, in units of eps"});
    s.push_back({p + "init_noise", num(d.init_noise), "smooth perturbation amplitude"});
    s.push_back({p + "dt_factor", num(d.dt_factor), "time step in units of eps^2"});
    s.push_back({p + "t_end", num(d.t_end), "final time"});
    s.push_back({p + "stride", std::to_string(d.stride), "steps between samples"});
    s.push_back({p + "energy_tol", num(d.energy_tol), "tolerance on E / (2 pi min mass) at the finest level"});
    s.push_back({p + "liminf_slack", num(d.liminf_slack), "slack of the liminf ledger in units of h"});
    s.push_back({p + "seed", std::to_string(d.seed), "random seed"});
}

}  // namespace

Schema vortex_schema() {
    const VortexSpec d;
    return {{"vortex.k", join(d.k), "degrees"},
            {"vortex.r_max", num(d.r_max), "outer radius"},
            {"vortex.tol", num(d.tol), "shooting tolerance"},
            {"vortex.defect_tol", num(d.defect_tol), "relative energy defect tolerance"},
            {"vortex.residual_tol", num(d.residual_tol), "Bogomolny residual tolerance"},
            {"vortex.time_limit", num(d.time_limit), "seconds allowed per profile"}};
}

Schema minimize_schema() {
    Schema s;
    add_minimize(s, "minimize.", MinimizeSpec{});
    return s;
}

Schema gamma_schema() {
    const GammaSpec d;
    Schema s{{"gamma.axis", std::to_string(d.axis), "loop direction"},
             {"gamma.eps", join(d.eps), "eps values"},
             {"gamma.cells", join(d.cells), "grid cells per axis for each eps"},
             {"gamma.tol", join(d.tol), "relative energy tolerance for each eps"},
             {"gamma.length", num(d.length), "side length of T^3"},
             {"gamma.run_liminf", b(d.run_liminf), "also run the liminf ledger"}};
    add_minimize(s, "gamma.liminf.", d.liminf);
    return s;
}

Schema monotonicity_schema() {
    const MonotonicitySpec d;
    return {{"monotonicity.eps", join(d.eps), "eps values"},
            {"monotonicity.length2", num(d.length2), "side of the T^2 benchmark"},
            {"monotonicity.cells2", join(d.cells2), "T^2 cells per axis for each eps"},
            {"monotonicity.T", num(d.T), "terminal time, in [2, 3]"},
            {"monotonicity.C2", num(d.C2), "constant in the Psi weight"},
            {"monotonicity.ratio_bound", num(d.ratio_bound), "bound on max Psi / (Psi(T - 1) + 1)"},
            {"monotonicity.noise", num(d.noise), "perturbation of the vortex start"},
            {"monotonicity.run3", b(d.run3), "also compute the T^3 density table"},
            {"monotonicity.cells3", join(d.cells3), "T^3 cells per axis for each eps"},
            {"monotonicity.flux3", join(d.flux3), "T^3 flux sector"},
            {"monotonicity.dt_factor3", num(d.dt_factor3), "T^3 time step in units of eps^2"},
            {"monotonicity.density_bound", num(d.density_bound), "bound on the density ratio, units of 2 pi"},
            {"monotonicity.dt_factor", num(d.dt_factor), "T^2 time step in units of eps^2"},
            {"monotonicity.seed", std::to_string(d.seed), "random seed"}};
}

Schema width_schema() {
    const WidthSpec d;
    return {{"width.class", join(d.cls), "Almgren class of the sweep-out"},
            {"width.length", num(d.length), "side of T^2"},
            {"width.cells", std::to_string(d.cells), "flow grid cells per axis"},
            {"width.coarse", std::to_string(d.coarse), "brute-force grid cells per axis"},
            {"width.eps", num(d.eps), "eps"},
            {"width.level", std::to_string(d.level), "family has 3^level + 1 members"},
            {"width.delta", num(d.delta), "transverse modulation"},
            {"width.t_flow", num(d.t_flow), "tightening flow time"},
            {"width.dt_factor", num(d.dt_factor), "time step in units of eps^2"},
            {"width.mass_cap", num(d.mass_cap), "mass cap of the brute-force search"},
            {"width.tol_rel", num(d.tol_rel), "relative slack of the ledger"}};
}

Schema flatnorm_schema() {
    return {{"flatnorm.n", "2", "torus dimension"},
            {"flatnorm.cells", "6", "grid cells per axis"},
            {"flatnorm.length", "1", "side length"},
            {"flatnorm.dim", "0", "current dimension"},
            {"flatnorm.dual", "true", "currents live on the dual complex"},
            {"flatnorm.S", "", "CSV file of the first current"},
            {"flatnorm.T", "", "CSV file of the second current (empty: zero)"},
            {"flatnorm.fill_in", "false", "force P = 0"},
            {"flatnorm.simplex", "false", "use the simplex for 0-currents too"}};
}

VortexSpec vortex_spec(const Resolved& r) {
    VortexSpec s;
    s.k = r.integers("vortex.k");
    s.r_max = r.real("vortex.r_max");
    s.tol = r.real("vortex.tol");
    s.defect_tol = r.real("vortex.defect_tol");
    s.residual_tol = r.real("vortex.residual_tol");
    s.time_limit = r.real("vortex.time_limit");
    return s;
}

MinimizeSpec minimize_spec(const Resolved& r, const std::string& p) {
    MinimizeSpec s;
    s.n = static_cast<int>(r.integer(p + "n"));
    s.length = r.real(p + "length");
    s.flux = r.integers(p + "flux");
    s.eps = r.reals(p + "eps");
    s.cells = r.integers(p + "cells");
    s.init = r.text(p + "init");
    s.init_core = r.real(p + "init_core");
    s.init_noise = r.real(p + "init_noise");
    s.dt_factor = r.real(p + "dt_factor");
    s.t_end = r.real(p + "t_end");
    s.stride = static_cast<int>(r.integer(p + "stride"));
    s.energy_tol = r.real(p + "energy_tol");
    s.liminf_slack = r.real(p + "liminf_slack");
    s.seed = r.u64(p + "seed");
    if (s.eps.empty()) throw ConfigError(p + "eps must not be empty");
    return s;
}

GammaSpec gamma_spec(const Resolved& r) {
    GammaSpec s;
    s.axis = static_cast<int>(r.integer("gamma.axis"));
    s.eps = r.reals("gamma.eps");
    s.cells = r.integers("gamma.cells");
    s.tol = r.reals("gamma.tol");
    s.length = r.real("gamma.length");
    s.run_liminf = r.flag("gamma.run_liminf");
    s.liminf = minimize_spec(r, "gamma.liminf.");
    return s;
}

MonotonicitySpec monotonicity_spec(const Resolved& r) {
    MonotonicitySpec s;
    s.eps = r.reals("monotonicity.eps");
    s.length2 = r.real("monotonicity.length2");
    s.cells2 = r.integers("monotonicity.cells2");
    s.T = r.real("monotonicity.T");
    s.C2 = r.real("monotonicity.C2");
    s.ratio_bound = r.real("monotonicity.ratio_bound");
    s.noise = r.real("monotonicity.noise");
    s.run3 = r.flag("monotonicity.run3");
    s.cells3 = r.integers("monotonicity.cells3");
    s.flux3 = r.integers("monotonicity.flux3");
    s.dt_factor3 = r.real("monotonicity.dt_factor3");
    s.density_bound = r.real("monotonicity.density_bound");
    s.dt_factor = r.real("monotonicity.dt_factor");
    s.seed = r.u64("monotonicity.seed");
    return s;
}

WidthSpec width_spec(const Resolved& r) {
    WidthSpec s;
    s.cls = r.integers("width.class");
    s.length = r.real("width.length");
    s.cells = r.integer("width.cells");
    s.coarse = r.integer("width.coarse");
    s.eps = r.real("width.eps");
    s.level = static_cast<int>(r.integer("width.level"));
    s.delta = r.real("width.delta");
    s.t_flow = r.real("width.t_flow");
    s.dt_factor = r.real("width.dt_factor");
    s.mass_cap = r.real("width.mass_cap");
    s.tol_rel = r.real("width.tol_rel");
    return s;
}

CubicalCurrent read_current_csv(const std::string& text, LatticeHandle lattice, int dim, bool dual) {
    CubicalCurrent c(lattice, dim, dual);
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (lineno == 1 && line.rfind("i0,", 0) == 0)) continue;
        std::istringstream ls(line);
        std::string f[5];
        for (auto& s : f)
            if (!std::getline(ls, s, ',')) throw InvalidArgument("current CSV line " + std::to_string(lineno) + ": expected 5 fields");
        Cell cell;
        try {
            for (int a = 0; a < 3; ++a) cell.base[a] = std::stoi(f[a]);
            if (f[3] != "-")
                for (char ch : f[3]) {
                    if (ch < '0' || ch > '2') throw std::invalid_argument(f[3]);
                    cell.axes |= 1u << (ch - '0');
                }
            if (cell.dim() != dim) throw InvalidArgument("current CSV line " + std::to_string(lineno) + ": cell of wrong dimension");
            c.add(cell, std::stol(f[4]));
        } catch (const std::logic_error&) {
            throw InvalidArgument("current CSV line " + std::to_string(lineno) + ": malformed field");
        }
    }
    return c;
}

}  // namespace ymhlab
