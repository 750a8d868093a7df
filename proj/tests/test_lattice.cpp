#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "ymh/lattice.hpp"

using namespace ymh;
using namespace ymh::testing;

namespace {

// Product of the four background link phases around every (j,k) plaquette,
// evaluated with explicit neighbour lookups.
double plaquette_phase_error(const Lattice& lat) {
    const Grid& g = lat.grid;
    const auto& L = lat.background.link_phase.comp;
    double worst = 0.0;
    for (int p = 0; p < g.plane_count(); ++p) {
        const auto [j, k] = g.plane(p);
        const auto w0 = lat.background.curvature.component(p);
        for (std::size_t x = 0; x < g.sites(); ++x) {
            const std::size_t xj = g.neighbor(x, j, 1), xk = g.neighbor(x, k, 1);
            const cplx hol = L[j][x] * L[k][xj] * std::conj(L[j][xk]) * std::conj(L[k][x]);
            const cplx want = std::polar(1.0, -g.spacing(j) * g.spacing(k) * w0[x]);
            worst = std::max(worst, std::abs(hol - want));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("grid indexing and periodic shift agree") {
    auto lat = grid3(5);
    const Grid& g = lat->grid;
    CHECK(g.sites() == 125);
    CHECK(g.stride(2) == 1);
    std::vector<double> f(g.sites()), s(g.sites());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = double(i);
    for (int a = 0; a < 3; ++a) {
        for (int step : {-1, 1}) {
            g.shift<double>(f, a, step, s);
            for (std::size_t x = 0; x < g.sites(); ++x) REQUIRE(s[x] == f[g.neighbor(x, a, step)]);
        }
    }
    for (std::size_t x = 0; x < g.sites(); ++x) REQUIRE(g.index(g.coords(x)) == x);
}

TEST_CASE("make_grid rejects malformed input") {
    const int small[2] = {3, 8};
    const int ok[2] = {8, 8};
    const double len[2] = {1.0, 1.0};
    const double zero[1] = {0.0};
    const double half[1] = {0.5};
    const double neg_len[2] = {1.0, -1.0};
    CHECK_THROWS_AS(make_grid(2, small, len, zero), InvalidArgument);
    CHECK_THROWS_AS(make_grid(2, ok, len, half), InvalidArgument);
    CHECK_THROWS_AS(make_grid(2, ok, neg_len, zero), InvalidArgument);
    CHECK_THROWS_AS(make_grid(4, ok, len, zero), InvalidArgument);
}

TEST_CASE("trivial sector has unit link phases") {
    auto lat = grid2(8);
    for (int a = 0; a < 2; ++a)
        for (cplx z : lat->background.link_phase.comp[a]) REQUIRE(z == cplx(1.0, 0.0));
    CHECK(max_abs(std::span<const double>(lat->background.curvature.values())) == 0.0);
}

TEST_CASE("background flux normalization on T2") {
    for (int k : {1, -2, 3}) {
        auto lat = grid2(8, 1.0, k);
        const double total = slice_flux(lat->grid, lat->background.curvature, 0, 1);
        CHECK(total == doctest::Approx(kTwoPi * k).epsilon(1e-14));
        CHECK(plaquette_phase_error(*lat) < 1e-13);
    }
    auto rect = make_grid(2, std::vector<int>{8, 12}, std::vector<double>{1.0, 1.7}, std::vector<double>{2.0});
    CHECK(plaquette_phase_error(*rect) < 1e-13);
}

TEST_CASE("background flux per slice on T3") {
    auto lat = grid3(8, 1.0, {2, 0, 0});
    const Grid& g = lat->grid;
    for (int z = 0; z < 8; ++z) {
        CHECK(slice_flux(g, lat->background.curvature, 0, 1, {0, 0, z}) == doctest::Approx(4 * kPi).epsilon(1e-14));
        CHECK(slice_flux(g, lat->background.curvature, 0, 2, {0, z, 0}) == 0.0);
        CHECK(slice_flux(g, lat->background.curvature, 1, 2, {z, 0, 0}) == 0.0);
    }
    auto mixed = grid3(6, 1.0, {1, -2, 3});
    CHECK(plaquette_phase_error(*mixed) < 1e-13);
}

TEST_CASE("d of constants and d squared") {
    std::mt19937_64 rng(7);
    for (auto lat : {grid2(9, 1.3), grid3(6, 0.8)}) {
        const Grid& g = lat->grid;
        FormField c(g, 0);
        for (double& v : c.values()) v = 3.25;
        CHECK(max_abs(std::span<const double>(d(g, c).values())) == 0.0);

        FormField a(g, 1);
        for (double& v : a.component(0)) v = -1.5;
        CHECK(max_abs(std::span<const double>(d(g, a).values())) == 0.0);

        const FormField th = random_form(g, 0, rng);
        const FormField dth = d(g, th);
        const double scale = max_abs(std::span<const double>(dth.values())) / g.min_spacing();
        CHECK(max_abs(std::span<const double>(d(g, dth).values())) <= 1e-13 * scale);
        if (g.n() == 3) {
            const FormField F = d(g, random_form(g, 1, rng));
            const double s2 = max_abs(std::span<const double>(F.values())) / g.min_spacing();
            CHECK(max_abs(std::span<const double>(d(g, F).values())) <= 1e-13 * s2);
        }
    }
    auto lat = grid2(8);
    CHECK_THROWS_AS(d(lat->grid, FormField(lat->grid, 2)), InvalidArgument);
}

TEST_CASE("d* is the weighted adjoint of d") {
    std::mt19937_64 rng(11);
    for (auto lat : {grid2(10, 2.0), grid3(5, 1.1)}) {
        const Grid& g = lat->grid;
        for (int deg = 0; deg < g.n(); ++deg) {
            const FormField a = random_form(g, deg, rng);
            const FormField b = random_form(g, deg + 1, rng);
            const double lhs = inner(g, d(g, a), b);
            const double rhs = inner(g, a, d_star(g, b));
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), 1.0));
        }
        FormField c(g, 1);
        for (int j = 0; j < g.n(); ++j)
            for (double& v : c.component(j)) v = 0.5 + j;
        CHECK(max_abs(std::span<const double>(d_star(g, c).values())) == 0.0);
    }
}

TEST_CASE("discrete Laplacian symbol on a sine mode") {
    const double L = 1.7;
    auto lat = grid2(16, L);
    const Grid& g = lat->grid;
    FormField th(g, 0);
    for (std::size_t x = 0; x < g.sites(); ++x) th.values()[x] = std::sin(kTwoPi * g.position(x, 0) / L);
    const FormField lap = d_star(g, d(g, th));
    const double h = g.spacing(0);
    const double s = std::sin(kPi * h / L);
    const double lambda = 4.0 / (h * h) * s * s;
    for (std::size_t x = 0; x < g.sites(); ++x) REQUIRE(lap.values()[x] == doctest::Approx(lambda * th.values()[x]).epsilon(1e-12).scale(lambda));
}

TEST_CASE("covariant difference examples") {
    auto lat = grid2(12, 1.0);
    const Grid& g = lat->grid;
    PairState p = make_pair(lat, 0.5);
    for (const auto& c : covariant_diff(*lat, p.u, p.alpha).comp)
        for (cplx z : c) REQUIRE(std::abs(z) == 0.0);

    for (std::size_t x = 0; x < g.sites(); ++x) p.u[x] = std::polar(1.0, kTwoPi * g.position(x, 0));
    for (double& v : p.alpha.component(0)) v = kTwoPi;
    for (const auto& c : covariant_diff(*lat, p.u, p.alpha).comp)
        for (cplx z : c) REQUIRE(std::abs(z) < 1e-12);
}

TEST_CASE("gauge covariance of the covariant difference") {
    std::mt19937_64 rng(3);
    for (auto lat : {grid2(10, 1.0, 2), grid3(6, 1.0, {1, 0, -1})}) {
        const Grid& g = lat->grid;
        const PairState p = random_pair(lat, 0.3, rng);
        const FormField th = random_form(g, 0, rng, 3.0);
        const Index3 wind = g.n() == 2 ? Index3{1, -2, 0} : Index3{1, 0, 2};
        const PairState q = gauge_transform(p, th, wind);
        const LinkField Dp = covariant_diff(*lat, p.u, p.alpha);
        const LinkField Dq = covariant_diff(*lat, q.u, q.alpha);
        double worst = 0.0;
        for (int j = 0; j < g.n(); ++j)
            for (std::size_t x = 0; x < g.sites(); ++x) {
                const cplx rot = q.u[x] / p.u[x];
                worst = std::max(worst, std::abs(Dq.comp[j][x] - rot * Dp.comp[j][x]));
            }
        CHECK(worst < 1e-11);
    }
}

TEST_CASE("constant and winding gauge transformations") {
    std::mt19937_64 rng(5);
    auto lat = grid2(8, 2.0);
    const PairState p = random_pair(lat, 0.4, rng);
    FormField c(lat->grid, 0);
    for (double& v : c.values()) v = 0.75;
    const PairState q = gauge_transform(p, c);
    CHECK(q.alpha.values() == p.alpha.values());
    CHECK(std::abs(q.u[3] - p.u[3] * std::polar(1.0, 0.75)) < 1e-15);

    const PairState w = gauge_transform(p, FormField(lat->grid, 0), {1, 0, 0});
    for (std::size_t x = 0; x < lat->grid.sites(); ++x) {
        REQUIRE(w.alpha.component(0)[x] - p.alpha.component(0)[x] == doctest::Approx(kTwoPi / 2.0));
        REQUIRE(w.alpha.component(1)[x] == p.alpha.component(1)[x]);
    }
}
