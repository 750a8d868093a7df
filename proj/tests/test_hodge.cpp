#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "ymh/functional.hpp"
#include "ymh/hodge.hpp"

using namespace ymh;
using namespace ymh::testing;

namespace {

double norm2(const Grid& g, const FormField& f) { return std::sqrt(inner(g, f, f)); }

FormField mean_free(FormField f) {
    const double m = pairwise_sum(f.values()) / double(f.values().size());
    for (double& v : f.values()) v -= m;
    return f;
}

}  // namespace

TEST_CASE("Poisson solve on zero, eigenmodes and random data") {
    std::mt19937_64 rng(1);
    auto lat = grid2(16, 1.7);
    const Grid& g = lat->grid;
    CHECK(max_abs(std::span<const double>(poisson_solve(g, FormField(g, 0)).values())) == 0.0);

    const double h = g.spacing(0);
    const double s = std::sin(kPi * h / 1.7);
    const double lambda = 4.0 / (h * h) * s * s;
    CHECK(laplace_symbol(g, {1, 0, 0}) == doctest::Approx(lambda));
    FormField f(g, 0);
    for (std::size_t x = 0; x < g.sites(); ++x) f.values()[x] = lambda * std::sin(kTwoPi * g.position(x, 0) / 1.7);
    const FormField th = poisson_solve(g, f);
    for (std::size_t x = 0; x < g.sites(); ++x)
        REQUIRE(th.values()[x] == doctest::Approx(std::sin(kTwoPi * g.position(x, 0) / 1.7)).scale(1.0).epsilon(1e-12));

    for (auto l : {grid2(12, 2.0), grid3(8, 1.0)}) {
        const Grid& gg = l->grid;
        const FormField r = mean_free(random_form(gg, 0, rng));
        const FormField sol = poisson_solve(gg, r);
        CHECK(norm2(gg, d_star(gg, d(gg, sol)) - r) <= 1e-10 * norm2(gg, r));
        CHECK(std::abs(pairwise_sum(sol.values())) < 1e-10);
    }
}

TEST_CASE("Poisson solve rejects a nonzero mean") {
    auto lat = grid2(8);
    FormField f(lat->grid, 0);
    for (double& v : f.values()) v = 1.0;
    CHECK_THROWS_AS(poisson_solve(lat->grid, f), InvalidArgument);
    try {
        poisson_solve(lat->grid, f);
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("1.0") != std::string::npos);
    }
}

TEST_CASE("Hodge Laplacian is componentwise") {
    std::mt19937_64 rng(8);
    for (auto lat : {grid2(8, 1.3), grid3(6, 0.9)}) {
        const Grid& g = lat->grid;
        for (int deg = 1; deg < g.n(); ++deg) {
            const FormField a = random_form(g, deg, rng);
            const FormField lap = d_star(g, d(g, a)) + d(g, d_star(g, a));
            for (int c = 0; c < a.components(); ++c) {
                FormField comp(g, 0);
                std::copy(a.component(c).begin(), a.component(c).end(), comp.values().begin());
                const FormField sl = d_star(g, d(g, comp));
                for (std::size_t x = 0; x < g.sites(); ++x)
                    REQUIRE(lap.component(c)[x] == doctest::Approx(sl.values()[x]).scale(100.0).epsilon(1e-12));
            }
        }
        const FormField b = random_form(g, 1, rng);
        const double tau = 0.37;
        const FormField r = hodge_resolvent(g, b, tau);
        const FormField back = r + tau * (d_star(g, d(g, r)) + d(g, d_star(g, r)));
        CHECK(norm2(g, back - b) < 1e-12 * norm2(g, b));
    }
}

TEST_CASE("Hodge decomposition identities") {
    std::mt19937_64 rng(12);
    for (auto lat : {grid2(10, 1.0), grid3(6, 1.4)}) {
        const Grid& g = lat->grid;
        const FormField th = random_form(g, 0, rng);
        const FormField dth = d(g, th);
        const HodgeSplit s1 = hodge_decompose(g, dth);
        CHECK(norm2(g, s1.exact - dth) < 1e-10 * norm2(g, dth));
        CHECK(norm2(g, s1.coexact) < 1e-10 * norm2(g, dth));
        CHECK(norm2(g, s1.harmonic) < 1e-10 * norm2(g, dth));

        FormField c(g, 1);
        for (double& v : c.component(0)) v = 0.8;
        const HodgeSplit s2 = hodge_decompose(g, c);
        CHECK(max_abs_diff(s2.harmonic.values(), c.values()) < 1e-15);
        CHECK(norm2(g, s2.exact) + norm2(g, s2.coexact) < 1e-14);

        const FormField a = random_form(g, 1, rng);
        const HodgeSplit s = hodge_decompose(g, a);
        const double na = norm2(g, a);
        CHECK(norm2(g, s.exact + s.coexact + s.harmonic - a) < 1e-10 * na);
        CHECK(std::abs(inner(g, s.exact, s.coexact)) < 1e-10 * na * na);
        CHECK(std::abs(inner(g, s.exact, s.harmonic)) < 1e-10 * na * na);
        CHECK(std::abs(inner(g, s.coexact, s.harmonic)) < 1e-10 * na * na);
        CHECK(norm2(g, d_star(g, s.coexact)) < 1e-10 * na / g.min_spacing());
        CHECK(norm2(g, d(g, s.exact)) < 1e-10 * na / g.min_spacing());
    }
}

TEST_CASE("P and Q projection identities") {
    std::mt19937_64 rng(13);
    auto lat = grid3(6, 1.0);
    const Grid& g = lat->grid;
    const FormField l = random_form(g, 1, rng);
    const FormField P = p_project(g, l);
    CHECK(norm2(g, p_project(g, P) - P) < 1e-10 * norm2(g, l));
    CHECK(norm2(g, d_star(g, P)) < 1e-10 * norm2(g, l) / g.min_spacing());
    const FormField th = mean_free(random_form(g, 0, rng));
    CHECK(norm2(g, p_project(g, d(g, th))) < 1e-10 * norm2(g, d(g, th)));
    CHECK(norm2(g, q_operator(g, d(g, th)) + th) < 1e-10 * norm2(g, th));
    FormField hcst(g, 1);
    for (double& v : hcst.component(2)) v = -1.25;
    CHECK(norm2(g, p_project(g, hcst) - hcst) < 1e-14);
}

TEST_CASE("solve_curl inverts d on exact 2-forms") {
    std::mt19937_64 rng(14);
    for (auto lat : {grid2(10, 1.0), grid3(6, 1.0)}) {
        const Grid& g = lat->grid;
        const FormField F = d(g, random_form(g, 1, rng));
        const FormField a = solve_curl(g, F);
        CHECK(norm2(g, d(g, a) - F) < 1e-10 * norm2(g, F));
        CHECK(norm2(g, d_star(g, a)) < 1e-10 * norm2(g, F));
    }
}

TEST_CASE("Coulomb projection and gauge normalization") {
    std::mt19937_64 rng(15);
    for (auto lat : {grid2(10, 1.5, 1), grid3(6, 1.0, {0, 0, 1})}) {
        const Grid& g = lat->grid;
        const PairState p = random_pair(lat, 0.3, rng, 10.0);
        const PairState c = coulomb_project(p);
        CHECK(max_abs(std::span<const double>(d_star(g, c.alpha).values())) < 1e-10 * max_abs(std::span<const double>(p.alpha.values())) / g.min_spacing());
        CHECK(rel_diff(energy(c).total, energy(p).total) < 1e-12);
        const PairState cc = coulomb_project(c);
        CHECK(max_abs_diff(cc.alpha.values(), c.alpha.values()) < 1e-10);

        const PairState n = normalize_gauge(p);
        const auto hc = harmonic_part(g, n.alpha);
        for (int j = 0; j < g.n(); ++j) CHECK(std::abs(hc[j]) <= kPi / g.length(j) + 1e-12);
        CHECK(rel_diff(energy(n).total, energy(p).total) < 1e-12);
        const PairState nn = normalize_gauge(n);
        CHECK(max_abs_diff(nn.alpha.values(), n.alpha.values()) < 1e-10);
    }

    auto lat = grid2(8, 1.0);
    const Grid& g = lat->grid;
    PairState p = make_pair(lat, 0.5);
    for (double& v : p.alpha.component(0)) v = kTwoPi + 0.1;
    const PairState n = normalize_gauge(p);
    CHECK(harmonic_part(g, n.alpha)[0] == doctest::Approx(0.1));

    // Ties go to the smaller integer: l c / 2 pi = 1/2 stays, -1/2 moves up.
    for (double& v : p.alpha.component(0)) v = kPi;
    CHECK(harmonic_part(g, normalize_gauge(p).alpha)[0] == doctest::Approx(kPi));
    for (double& v : p.alpha.component(0)) v = -kPi;
    CHECK(harmonic_part(g, normalize_gauge(p).alpha)[0] == doctest::Approx(kPi));

    const PairState base = make_pair(lat, 0.5);
    const PairState large = gauge_transform(base, FormField(g, 0), {1, -2, 0});
    const PairState back = normalize_gauge(large);
    CHECK(max_abs_diff(back.alpha.values(), base.alpha.values()) < 1e-12);
    for (std::size_t x = 0; x < g.sites(); ++x) REQUIRE(std::abs(back.u[x] - base.u[x]) < 1e-12);
}
