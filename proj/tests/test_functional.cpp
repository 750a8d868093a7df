#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "ymh/functional.hpp"

using namespace ymh;
using namespace ymh::testing;

namespace {

// Straightforward evaluation of the lattice energy: one loop over sites,
// explicit neighbours, explicit link phases.
double naive_energy(const PairState& p) {
    const Grid& g = p.grid();
    const auto& L = p.lattice->background.link_phase.comp;
    const auto& w0 = p.lattice->background.curvature;
    const double e2 = p.eps * p.eps;
    double grad = 0.0, curv = 0.0, pot = 0.0;
    for (std::size_t x = 0; x < g.sites(); ++x) {
        for (int j = 0; j < g.n(); ++j) {
            const double h = g.spacing(j);
            const cplx U = L[j][x] * std::exp(cplx(0.0, -h * p.alpha.component(j)[x]));
            grad += std::norm((U * p.u[g.neighbor(x, j, 1)] - p.u[x]) / h);
        }
        for (int q = 0; q < g.plane_count(); ++q) {
            const auto [j, k] = g.plane(q);
            const auto& a = p.alpha;
            const double da = (a.component(k)[g.neighbor(x, j, 1)] - a.component(k)[x]) / g.spacing(j) -
                              (a.component(j)[g.neighbor(x, k, 1)] - a.component(j)[x]) / g.spacing(k);
            const double w = w0.component(q)[x] + da;
            curv += e2 * w * w;
        }
        const double m = 1.0 - std::norm(p.u[x]);
        pot += m * m / (4.0 * e2);
    }
    return g.cell_volume() * (grad + curv + pot);
}

double max_rel_field_diff(const FormField& a, const FormField& b) {
    double scale = 1e-300, diff = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        scale = std::max(scale, std::abs(a.values()[i]));
        diff = std::max(diff, std::abs(a.values()[i] - b.values()[i]));
    }
    return diff / scale;
}

}  // namespace

TEST_CASE("energy of the vacuum and of the zero section") {
    auto lat = grid2(8, 2.0);
    CHECK(energy(make_pair(lat, 0.3)).total == 0.0);
    const EnergyReport r = energy(make_pair(lat, 0.3, cplx(0.0, 0.0)));
    CHECK(r.total == doctest::Approx(4.0 / (4 * 0.09)).epsilon(1e-13));
    CHECK(r.gradient == 0.0);
    CHECK(r.curvature == 0.0);
}

TEST_CASE("energy matches the naive double loop") {
    std::mt19937_64 rng(21);
    for (auto lat : {grid2(9, 1.3, 1), grid2(8, 2.0, -2), grid3(5, 1.0, {1, 2, 0})}) {
        for (int trial = 0; trial < 3; ++trial) {
            const PairState p = random_pair(lat, 0.25 + 0.2 * trial, rng, 2.0);
            const EnergyReport r = energy(p);
            CHECK(rel_diff(r.total, naive_energy(p)) < 1e-12);
            CHECK(rel_diff(r.total, r.gradient + r.curvature + r.potential) < 1e-12);
            CHECK(rel_diff(pairwise_sum(r.density.values()) * p.grid().cell_volume(), r.total) < 1e-12);
            CHECK(r.gradient >= 0.0);
            CHECK(r.curvature >= 0.0);
            CHECK(r.potential >= 0.0);
            for (double e : r.density.values()) REQUIRE(e >= 0.0);
        }
    }
}

TEST_CASE("energy CSV row layout") {
    auto lat = grid2(8);
    const EnergyReport r = energy(make_pair(lat, 0.5, cplx(0.0, 0.0)));
    const std::string row = r.csv_row(0.5);
    CHECK(std::count(row.begin(), row.end(), ',') == 6);
    CHECK(EnergyReport::csv_header().rfind("t,total", 0) == 0);
}

TEST_CASE("beta on simple sections") {
    std::mt19937_64 rng(2);
    auto lat = grid2(12, 1.0);
    const Grid& g = lat->grid;
    PairState p = make_pair(lat, 0.5, cplx(0.0, 0.0));
    p.alpha = random_form(g, 1, rng);
    CHECK(beta_form(p).values() == p.alpha.values());

    // Unit section, alpha arbitrary: the lattice current is -sin(h alpha)/h.
    p.u = ScalarField(g.sites(), cplx(1.0, 0.0));
    const FormField b = beta_form(p);
    for (int j = 0; j < 2; ++j)
        for (std::size_t x = 0; x < g.sites(); ++x) {
            const double a = p.alpha.component(j)[x], h = g.spacing(j);
            REQUIRE(b.component(j)[x] == doctest::Approx(a - std::sin(h * a) / h).epsilon(1e-12).scale(1.0));
        }

    // Winding section: the cycle sum is N sin(2 pi w / N), which tends to 2 pi w.
    for (int w : {1, 2, -3}) {
        p.alpha = FormField(g, 1);
        for (std::size_t x = 0; x < g.sites(); ++x) p.u[x] = std::polar(1.0, kTwoPi * w * g.position(x, 0));
        const FormField bw = beta_form(p);
        double sum = 0.0;
        for (int i = 0; i < 12; ++i) sum += bw.component(0)[g.index({i, 5, 0})] * g.spacing(0);
        CHECK(sum == doctest::Approx(12 * std::sin(kTwoPi * w / 12)).epsilon(1e-12));
        const double tw = kTwoPi * w;
        CHECK(std::abs(sum - tw) <= std::abs(tw * tw * tw) / (6.0 * 144.0));
        const FormField J = jacobian_form(p);
        CHECK(max_abs(std::span<const double>(J.values())) < 1e-9);
    }
}

TEST_CASE("Jacobian of the linear section is twice the area form") {
    auto lat = grid2(16, 1.0);
    const Grid& g = lat->grid;
    PairState p = make_pair(lat, 0.5);
    // u = x + i y near the centre; periodicity breaks it only on the seams.
    for (std::size_t x = 0; x < g.sites(); ++x) p.u[x] = cplx(g.position(x, 0) - 0.5, g.position(x, 1) - 0.5);
    const FormField J = jacobian_form(p);
    const JacobianMismatch mm = jacobian_mismatch(p);
    for (int i = 2; i < 12; ++i)
        for (int k = 2; k < 12; ++k) {
            const std::size_t x = g.index({i, k, 0});
            REQUIRE(J.values()[x] == doctest::Approx(2.0).epsilon(1e-12));
            REQUIRE(mm.psi.values()[x] == doctest::Approx(2.0).epsilon(1e-12));
        }
}

TEST_CASE("Jacobian is closed and quantized in every sector") {
    std::mt19937_64 rng(9);
    for (auto lat : {grid2(10, 1.0, 3), grid3(6, 1.0, {1, -1, 2})}) {
        const Grid& g = lat->grid;
        const PairState p = random_pair(lat, 0.3, rng, 3.0);
        const FormField J = jacobian_form(p);
        for (int q = 0; q < g.plane_count(); ++q) {
            const auto [j, k] = g.plane(q);
            for (int s = 0; s < 3; ++s) {
                Index3 slice{s, s, s};
                const double flux = slice_flux(g, J, j, k, slice) / kTwoPi;
                CHECK(std::abs(flux - g.flux(j, k)) < 1e-10);
                CHECK(std::lround(flux) == g.flux(j, k));
            }
        }
        if (g.n() == 3) {
            const FormField dJ = d(g, J);
            CHECK(max_abs(std::span<const double>(dJ.values())) < 1e-9 * max_abs(std::span<const double>(J.values())) / g.min_spacing());
        }
    }
}

TEST_CASE("gauge invariance of the functional") {
    std::mt19937_64 rng(17);
    for (auto lat : {grid2(10, 1.5, -1), grid3(6, 1.0, {0, 1, 0})}) {
        const Grid& g = lat->grid;
        const PairState p = random_pair(lat, 0.2, rng, 2.0);
        const Index3 wind = g.n() == 2 ? Index3{2, -1, 0} : Index3{1, 1, -1};
        const PairState q = gauge_transform(p, random_form(g, 0, rng, 5.0), wind);
        const EnergyReport a = energy(p), b = energy(q);
        CHECK(rel_diff(a.total, b.total) < 1e-12);
        CHECK(max_rel_field_diff(a.density, b.density) < 1e-12);
        CHECK(max_rel_field_diff(stress_trace(p), stress_trace(q)) < 1e-12);
        CHECK(max_rel_field_diff(jacobian_form(p), jacobian_form(q)) < 1e-10);
        CHECK(max_rel_field_diff(jacobian_mismatch(p).psi, jacobian_mismatch(q).psi) < 1e-10);
    }
}

TEST_CASE("stress trace identities") {
    std::mt19937_64 rng(4);
    auto lat = grid2(8, 1.0, 1);
    CHECK(max_abs(std::span<const double>(stress_trace(make_pair(grid2(8), 0.3, 0.0)).values())) == 0.0);
    CHECK(max_abs(std::span<const double>(stress_trace(make_pair(grid2(8), 0.3)).values())) == 0.0);
    const PairState p = random_pair(lat, 0.35, rng);
    const FormField T = stress_trace(p);
    const EnergyReport r = energy(p);
    const FormField w = curvature(p);
    std::vector<double> w2site(p.grid().sites());
    FormField sq = w;
    for (double& v : sq.values()) v *= v;
    plaquettes_to_sites(p.grid(), sq, w2site);
    const double e2 = p.eps * p.eps;
    for (std::size_t x = 0; x < p.grid().sites(); ++x) {
        const double m = 1.0 - std::norm(p.u[x]);
        const double W = m * m / 4.0;
        const double rhs = r.density.values()[x] + e2 * w2site[x] - W / e2;
        REQUIRE(T.values()[x] == doctest::Approx(rhs).epsilon(1e-12).scale(r.density.values()[x]));
        REQUIRE(T.values()[x] <= 2.0 * r.density.values()[x] + 1e-12);
    }
}

TEST_CASE("Euler-Lagrange residual is half the energy gradient") {
    std::mt19937_64 rng(33);
    auto lat = grid2(6, 1.0, 1);
    const PairState p = random_pair(lat, 0.4, rng);
    const ElResidual r = el_residual(p);
    const double V = p.grid().cell_volume();
    const double step = 1e-6;
    auto probe = [&](auto mutate) {
        PairState a = p, b = p;
        mutate(a, step);
        mutate(b, -step);
        return (energy(a).total - energy(b).total) / (2 * step) / (2 * V);
    };
    for (std::size_t x : {0u, 7u, 20u, 35u}) {
        const double gr = probe([x](PairState& s, double t) { s.u[x] += t; });
        const double gi = probe([x](PairState& s, double t) { s.u[x] += cplx(0.0, t); });
        CHECK(gr == doctest::Approx(r.u[x].real()).epsilon(1e-6).scale(1.0));
        CHECK(gi == doctest::Approx(r.u[x].imag()).epsilon(1e-6).scale(1.0));
        for (int j = 0; j < 2; ++j) {
            const double ga = probe([x, j](PairState& s, double t) { s.alpha.component(j)[x] += t; });
            CHECK(ga == doctest::Approx(r.alpha.component(j)[x]).epsilon(1e-6).scale(1.0));
        }
    }
    const ElResidual zero = el_residual(make_pair(grid2(8), 0.2));
    CHECK(zero.max == 0.0);
}
