#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "ymh/currents.hpp"
#include "ymh/flow.hpp"
#include "ymh/functional.hpp"
#include "ymh/hodge.hpp"
#include "ymh/vortex.hpp"

using namespace ymh;
using namespace ymh::testing;

namespace {

// One explicit Euler step on T^2 written out site by site.
PairState naive_explicit_step(const PairState& p, double dt) {
    const Grid& g = p.grid();
    const auto& bg = p.lattice->background;
    const double h0 = g.spacing(0), h1 = g.spacing(1), eps2 = p.eps * p.eps;
    const std::size_t S = g.sites();
    auto U = [&](int j, std::size_t x) {
        return bg.link_phase.comp[j][x] * std::polar(1.0, -g.spacing(j) * p.alpha.component(j)[x]);
    };
    std::vector<double> om(S);
    for (std::size_t x = 0; x < S; ++x) {
        const std::size_t x0 = g.neighbor(x, 0, 1), x1 = g.neighbor(x, 1, 1);
        om[x] = bg.curvature.component(0)[x] + (p.alpha.component(1)[x0] - p.alpha.component(1)[x]) / h0 -
                (p.alpha.component(0)[x1] - p.alpha.component(0)[x]) / h1;
    }
    PairState q = p;
    for (std::size_t x = 0; x < S; ++x) {
        cplx lap = 0.0;
        for (int j = 0; j < 2; ++j) {
            const double h = g.spacing(j);
            const std::size_t up = g.neighbor(x, j, 1), dn = g.neighbor(x, j, -1);
            lap += (2.0 * p.u[x] - U(j, x) * p.u[up] - std::conj(U(j, dn)) * p.u[dn]) / (h * h);
        }
        const cplx ru = lap - (1.0 - std::norm(p.u[x])) * p.u[x] / (2.0 * eps2);
        q.u[x] = p.u[x] - dt * ru;

        const double ds0 = (om[x] - om[g.neighbor(x, 1, -1)]) / h1;
        const double ds1 = -(om[x] - om[g.neighbor(x, 0, -1)]) / h0;
        const double c0 = std::imag(std::conj(p.u[x]) * U(0, x) * p.u[g.neighbor(x, 0, 1)]) / h0;
        const double c1 = std::imag(std::conj(p.u[x]) * U(1, x) * p.u[g.neighbor(x, 1, 1)]) / h1;
        q.alpha.component(0)[x] = p.alpha.component(0)[x] - dt * (eps2 * ds0 - c0) / eps2;
        q.alpha.component(1)[x] = p.alpha.component(1)[x] - dt * (eps2 * ds1 - c1) / eps2;
    }
    return q;
}

PairState smooth_pair(LatticeHandle lat, double eps, std::mt19937_64& rng) {
    PairState p = make_pair(lat, eps);
    const Grid& g = p.grid();
    const FormField re = smooth_form(g, 0, rng, 0.4), im = smooth_form(g, 0, rng, 0.4);
    for (std::size_t x = 0; x < g.sites(); ++x) {
        const cplx z(0.5 + re.values()[x], im.values()[x]);
        p.u[x] = std::abs(z) > 1.0 ? z / std::abs(z) : z;
    }
    p.alpha = smooth_form(g, 1, rng, 0.5);
    return p;
}

FlowParams params(FlowScheme s, double t_end, double dt = 0.0) {
    FlowParams f;
    f.scheme = s;
    f.t_end = t_end;
    f.dt = dt;
    f.stationarity_tol = 0.0;
    return f;
}

}  // namespace

TEST_CASE("explicit step matches the site-by-site update") {
    std::mt19937_64 rng(11);
    for (int flux : {0, 1, -2}) {
        auto lat = grid2(12, 1.0, flux);
        const PairState p = random_pair(lat, 0.4, rng, 0.7);
        const double dt = explicit_dt_limit(p.grid(), p.eps);
        const PairState a = step(p, params(FlowScheme::explicit_euler, 1.0, dt));
        const PairState b = naive_explicit_step(p, dt);
        double du = 0.0;
        for (std::size_t x = 0; x < a.u.size(); ++x) du = std::max(du, std::abs(a.u[x] - b.u[x]));
        CHECK(du <= 1e-12);
        CHECK(max_abs_diff(a.alpha.values(), b.alpha.values()) <= 1e-12);
    }
}

TEST_CASE("the zero pair is a fixed point") {
    for (FlowScheme s : {FlowScheme::explicit_euler, FlowScheme::imex}) {
        const PairState z = make_pair(grid2(16), 0.3, {0.0, 0.0});
        const PairState q = step(z, params(s, 1.0));
        CHECK(max_abs_u(q) == 0.0);
        CHECK(max_abs(std::span<const double>(q.alpha.values())) == 0.0);
    }
}

TEST_CASE("flow parameter validation") {
    const PairState p = make_pair(grid2(16), 0.3);
    FlowParams f = params(FlowScheme::explicit_euler, 1.0, 2.0 * explicit_dt_limit(p.grid(), 0.3));
    CHECK_THROWS_AS(step(p, f), InvalidArgument);
    f = params(FlowScheme::imex, 1.0, 0.2);
    CHECK_THROWS_AS(step(p, f), InvalidArgument);
    f = params(FlowScheme::imex, 1.0, -1.0);
    CHECK_THROWS_AS(run(p, f), InvalidArgument);
    f = params(FlowScheme::imex, 1.0);
    f.monitor_stride = 0;
    CHECK_THROWS_AS(run(p, f), InvalidArgument);

    PairState bad = p;
    bad.u[3] = {NAN, 0.0};
    CHECK_THROWS_AS(run(bad, params(FlowScheme::imex, 0.1)), NumericError);
}

TEST_CASE("energy decreases and the maximum principle holds") {
    std::mt19937_64 rng(5);
    for (FlowScheme s : {FlowScheme::explicit_euler, FlowScheme::imex}) {
        for (int flux : {0, 1}) {
            auto lat = grid2(24, 1.0, flux);
            const PairState p = random_pair(lat, 0.2, rng, 0.5);
            const Trajectory tr = run(p, params(s, 0.05));
            CHECK(tr.max_energy_increase <= 1e-8);
            CHECK(tr.max_abs_u <= 1.0 + 1e-9);
            CHECK(tr.samples.back().report.total < tr.samples.front().report.total);
        }
    }
    auto lat3 = grid3(8, 1.0, {0, 0, 1});
    const Trajectory t3 = run(random_pair(lat3, 0.3, rng, 0.5), params(FlowScheme::imex, 0.1));
    CHECK(t3.max_energy_increase <= 1e-8);
    CHECK(t3.max_abs_u <= 1.0 + 1e-9);
}

TEST_CASE("dissipation identity at the explicit guard") {
    std::mt19937_64 rng(9);
    const PairState p = smooth_pair(grid2(32, 1.0, 0), 0.3, rng);
    const double dt = explicit_dt_limit(p.grid(), p.eps);
    const Trajectory a = run(p, params(FlowScheme::explicit_euler, 0.02, dt));
    const Trajectory b = run(p, params(FlowScheme::explicit_euler, 0.02, dt / 2));
    const double ra = a.samples.back().dissipation_residual, rb = b.samples.back().dissipation_residual;
    MESSAGE("dissipation residual " << ra << " -> " << rb);
    CHECK(ra <= 0.01);
    CHECK(rb / ra == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("direct and Coulomb runs agree on gauge-invariant quantities") {
    std::mt19937_64 rng(21);
    const PairState p = smooth_pair(grid2(32, 1.0, 1), 0.2, rng);
    for (FlowScheme s : {FlowScheme::imex}) {
        FlowParams f = params(s, 1.0, 0.0025);
        const Trajectory d = run(p, f);
        f.gauge = GaugeMode::coulomb;
        const Trajectory c = run(p, f);
        CHECK(rel_diff(d.samples.back().report.total, c.samples.back().report.total) < 5e-3);
        double diff = 0.0;
        for (std::size_t x = 0; x < p.u.size(); ++x)
            diff = std::max(diff, std::abs(std::abs(d.final_state.u[x]) - std::abs(c.final_state.u[x])));
        CHECK(diff < 5e-3);
        const FormField dc = d_star(c.final_state.grid(), c.final_state.alpha);
        CHECK(max_abs(std::span<const double>(dc.values())) < 1e-8);
    }
}

TEST_CASE("small perturbations of the vacuum decay") {
    std::mt19937_64 rng(3);
    PairState p = make_pair(grid2(16), 0.3);
    std::normal_distribution<double> N(0.0, 0.01);
    for (auto& z : p.u.values) z += cplx(N(rng), N(rng));
    p.alpha = random_form(p.grid(), 1, rng, 0.01);
    FlowParams f = params(FlowScheme::imex, 20.0);
    f.max_principle = false;
    f.stationarity_tol = 1e-9;
    const Trajectory tr = run(p, f);
    MESSAGE("final energy " << tr.samples.back().report.total);
    CHECK(tr.samples.back().report.total <= 1e-8);
}

TEST_CASE("a synthesized vortex is nearly stationary") {
    const VortexProfile prof = solve_profile(1);
    const double h = 4.0 / 128;
    const PairState p = synthesize_planar(prof, 0.1, grid2(128, 4.0, 1), {2.0 + 0.3 * h, 2.0 + 0.2 * h});
    FlowParams f = params(FlowScheme::imex, 1.0);
    f.monitor_stride = 50;
    const Trajectory tr = run(p, f);
    const double e0 = tr.samples.front().report.total;
    for (const FlowSample& s : tr.samples) CHECK(std::abs(s.report.total / e0 - 1.0) < 1e-3);
}

TEST_CASE("discrepancy on trivial data") {
    const FormField a = discrepancy(make_pair(grid2(8), 0.2));
    for (double v : a.values()) CHECK(v == 0.0);
    const FormField b = discrepancy(make_pair(grid3(4), 0.25, {0.0, 0.0}));
    for (double v : b.values()) CHECK(v == doctest::Approx(-2.0));
}

TEST_CASE("heat kernel normalization and asymptotics") {
    auto lat = grid2(64);
    const Grid& g = lat->grid;
    const std::array<double, 3> x0{0.5, 0.5, 0.0};
    for (double t : {1e-3, 0.01, 0.1, 1.0}) {
        const FormField K = heat_kernel(g, t, x0);
        CHECK(pairwise_sum(K.values()) * g.cell_volume() == doctest::Approx(1.0).epsilon(1e-13));
    }
    const FormField far = heat_kernel(g, 10.0, {0.1, 0.3, 0.0});
    for (double v : far.values()) CHECK(std::abs(v - 1.0) <= 1e-8);

    const double t = 0.01;
    const FormField K = heat_kernel(g, t, x0);
    int checked = 0;
    for (std::size_t x = 0; x < g.sites(); ++x) {
        const double dx = g.position(x, 0) - 0.5, dy = g.position(x, 1) - 0.5;
        const double d2 = dx * dx + dy * dy;
        if (d2 > 0.04) continue;
        const double s = 4.0 * kPi * t * std::exp(d2 / (4.0 * t)) * K.values()[x];
        CHECK(s >= 0.999);
        CHECK(s <= 1.001);
        ++checked;
    }
    CHECK(checked > 100);

    auto lat3 = grid3(16, 2.0);
    const FormField K3 = heat_kernel(lat3->grid, 0.05, {0.3, 1.1, 1.9});
    CHECK(pairwise_sum(K3.values()) * lat3->grid.cell_volume() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(heat_kernel(g, 0.0, x0), InvalidArgument);
}

TEST_CASE("monotonicity quantities vanish on the vacuum") {
    const PairState vac = make_pair(grid2(16), 0.2);
    FlowParams f = params(FlowScheme::imex, 2.0, 0.01);
    f.record_density = true;
    const Trajectory tr = run(vac, f);
    const MonotonicityProfile m = monotonicity_profile(tr, 2.0, {0.5, 0.5, 0.0}, 1.0);
    CHECK(m.points.size() == 10);
    for (const auto& pt : m.points) {
        CHECK(pt.phi == 0.0);
        CHECK(pt.psi == 0.0);
    }
    CHECK(m.ratio == 0.0);
    CHECK_THROWS_AS(monotonicity_profile(tr, 3.5, {0.5, 0.5, 0.0}, 1.0), InvalidArgument);

    f.t_end = 1.5;
    CHECK_THROWS_AS(monotonicity_profile(run(vac, f), 2.0, {0.5, 0.5, 0.0}, 1.0), InvalidArgument);
    f.t_end = 2.0;
    f.record_density = false;
    CHECK_THROWS_AS(monotonicity_profile(run(vac, f), 2.0, {0.5, 0.5, 0.0}, 1.0), InvalidArgument);

    CHECK(density_ratio(vac, {0.5, 0.5, 0.0}).max == 0.0);
}

TEST_CASE("Gaussian weighted energy of a stationary vortex") {
    // Against a point mass of energy 2 pi at the core, Phi(t) approaches
    // 2 pi K(T - t, x0, x0) = 2 pi / (4 pi (T - t)) when the core is much
    // smaller than sqrt(T - t).
    const VortexProfile prof = solve_profile(1);
    auto lat = grid2(128, 4.0, 1);
    const double h = 4.0 / 128;
    const std::array<double, 3> x0{2.0 + 0.3 * h, 2.0 + 0.2 * h, 0.0};
    const PairState p = synthesize_planar(prof, 0.05, lat, {x0[0], x0[1]});
    Trajectory tr;
    tr.final_state = p;
    tr.dt = 0.1;
    tr.monitor_stride = 1;
    const EnergyReport rep = energy(p);
    for (int i = 0; i < 10; ++i) {
        FlowSample s;
        s.t = 1.0 + 0.1 * i;
        s.report = rep;
        tr.samples.push_back(s);
    }
    const MonotonicityProfile m = monotonicity_profile(tr, 2.0, x0, 0.0);
    for (const auto& pt : m.points) {
        const double tau = 2.0 - pt.t;
        const double oracle = rep.total / (4.0 * kPi * tau);
        CHECK(pt.phi == doctest::Approx(oracle).epsilon(0.03));
        CHECK(pt.psi == doctest::Approx(tau * pt.phi));
    }
}

TEST_CASE("density ratio of a straight recovery line") {
    const double eps = 0.1;
    auto lat = grid3(64, 1.0, {1, 0, 0});
    const CubicalCurrent loop = axis_loop(lat, 2, {32, 32, 0}, 1);
    const PairState p = build_recovery_pair(lat, loop, eps);
    const double lam = recovery_lambda(lat->grid, loop, eps, {});
    const double c = 32.5 / 64;
    const DensityRatio dr = density_ratio(p, {c, c, 0.5});
    REQUIRE(!dr.ratio.empty());
    CHECK(dr.radius.front() == doctest::Approx(eps));

    // Energy per unit length of the continuum vortex line within distance
    // rho of its axis, tabulated on a fine radial grid.
    const VortexProfile prof = solve_profile(1);
    const int M = 4000;
    const double smax = 1.0 / eps, ds = smax / M;
    std::vector<double> cum(M + 1, 0.0);
    auto dens = [&](double s) {
        if (s == 0.0) return 0.0;
        const auto v = prof.eval(s);
        const double m = 1.0 - v.f * v.f;
        return (v.df * v.df + (1.0 - v.a) * (1.0 - v.a) * v.f * v.f / (s * s) + (v.da / s) * (v.da / s) + m * m / 4.0) * s;
    };
    for (int i = 1; i <= M; ++i) cum[i] = cum[i - 1] + 0.5 * (dens((i - 1) * ds) + dens(i * ds)) * ds * kTwoPi;
    auto line = [&](double rho) {
        const double x = std::min(rho / eps / ds, double(M));
        const int i = std::min(static_cast<int>(x), M - 1);
        return cum[i] + (x - i) * (cum[i + 1] - cum[i]);
    };
    for (std::size_t i = 0; i < dr.ratio.size(); ++i) {
        const double r = dr.radius[i];
        double oracle = 0.0;
        const int Z = 2000;
        for (int k = 0; k < Z; ++k) {
            const double z = -r + (k + 0.5) * 2.0 * r / Z;
            oracle += line(std::sqrt(std::max(0.0, r * r - z * z))) * 2.0 * r / Z;
        }
        oracle /= r;
        MESSAGE("r " << r << " ratio/2pi " << dr.ratio[i] / kTwoPi << " line oracle/2pi " << oracle / kTwoPi);
        if (r <= lam) CHECK(dr.ratio[i] == doctest::Approx(oracle).epsilon(0.25));
        CHECK(dr.ratio[i] <= 2.2 * kTwoPi);
    }
}
