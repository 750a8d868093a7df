#include "ymh/functional.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ymh/kernels.hpp"

namespace ymh {

std::string EnergyReport::csv_header() {
    return "t,total,gradientPart,curvaturePart,potentialPart,maxDensity,maxAbsU";
}

std::string EnergyReport::csv_row(double t) const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", t, total, gradient, curvature,
                  potential, max_density, max_abs_u);
    return buf;
}

void links_to_sites(const Grid& g, const std::array<std::vector<double>, kMaxDim>& v, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> back(g.sites());
    for (int j = 0; j < g.n(); ++j) {
        g.shift<double>(v[j], j, -1, back);
        for (std::size_t x = 0; x < g.sites(); ++x) out[x] += 0.5 * (v[j][x] + back[x]);
    }
}

void plaquettes_to_sites(const Grid& g, const FormField& F, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> a(g.sites()), b(g.sites());
    for (int p = 0; p < g.plane_count(); ++p) {
        const auto [j, k] = g.plane(p);
        const auto f = F.component(p);
        g.shift<double>(f, j, -1, a);  // f(x - e_j)
        g.shift<double>(a, k, -1, b);  // f(x - e_j - e_k)
        for (std::size_t x = 0; x < g.sites(); ++x) a[x] += f[x] + b[x];
        g.shift<double>(f, k, -1, b);  // f(x - e_k)
        for (std::size_t x = 0; x < g.sites(); ++x) out[x] += 0.25 * (a[x] + b[x]);
    }
}

FormField curvature(const PairState& pair) {
    validate(pair);
    const Grid& g = pair.grid();
    return pair.lattice->background.curvature + d(g, pair.alpha);
}

LinkTerms link_terms(const PairState& pair) {
    validate(pair);
    const Grid& g = pair.grid();
    const std::size_t S = g.sites();
    LinkTerms t;
    t.transport = link_transport(*pair.lattice, pair.alpha);
    t.omega = curvature(pair);
    std::vector<cplx> up(S);
    const auto& K = kernels::active();
    for (int j = 0; j < g.n(); ++j) {
        g.shift<cplx>(pair.u.values, j, +1, up);
        t.d2[j].resize(S);
        t.cur[j].resize(S);
        K.link_terms(pair.u.values.data(), up.data(), t.transport.comp[j].data(), 1.0 / g.spacing(j), nullptr,
                     t.d2[j].data(), t.cur[j].data(), S);
    }
    return t;
}

EnergyReport energy(const PairState& pair) { return energy(pair, link_terms(pair)); }

EnergyReport energy(const PairState& pair, const LinkTerms& t) {
    const Grid& g = pair.grid();
    const std::size_t S = g.sites();
    const double eps2 = pair.eps * pair.eps;
    const double V = g.cell_volume();

    std::vector<double> grad(S), curv(S), pot(S);
    links_to_sites(g, t.d2, grad);

    FormField w2 = t.omega;
    for (double& v : w2.values()) v *= v;
    plaquettes_to_sites(g, w2, curv);
    for (double& v : curv) v *= eps2;

    kernels::active().potential_terms(pair.u.values.data(), 0.25 / eps2, 0.0, pot.data(), nullptr, S);

    EnergyReport r;
    r.density = FormField(g, 0);
    auto e = r.density.component(0);
    for (std::size_t x = 0; x < S; ++x) e[x] = grad[x] + curv[x] + pot[x];
    r.gradient = V * pairwise_sum(grad);
    r.curvature = V * pairwise_sum(curv);
    r.potential = V * pairwise_sum(pot);
    r.total = r.gradient + r.curvature + r.potential;
    r.max_density = max_abs(std::span<const double>(e));
    r.max_abs_u = max_abs_u(pair);
    return r;
}

FormField current(const PairState& pair) {
    const LinkTerms t = link_terms(pair);
    FormField j(pair.grid(), 1);
    for (int a = 0; a < pair.grid().n(); ++a) std::copy(t.cur[a].begin(), t.cur[a].end(), j.component(a).begin());
    return j;
}

FormField beta_form(const PairState& pair) { return current(pair) + pair.alpha; }

FormField jacobian_form(const PairState& pair) {
    const Grid& g = pair.grid();
    return d(g, beta_form(pair)) + pair.lattice->background.curvature;
}

JacobianMismatch jacobian_mismatch(const PairState& pair) {
    validate(pair);
    const Grid& g = pair.grid();
    const std::size_t S = g.sites();
    const LinkField U = link_transport(*pair.lattice, pair.alpha);
    const LinkField D = covariant_diff(*pair.lattice, pair.u, pair.alpha);
    const FormField omega = curvature(pair);

    JacobianMismatch r;
    r.psi = FormField(g, 2);
    r.continuum = FormField(g, 2);
    std::vector<double> weights;
    for (int p = 0; p < g.plane_count(); ++p) {
        const auto [j, k] = g.plane(p);
        auto psi = r.psi.component(p);
        auto cont = r.continuum.component(p);
        const auto w = omega.component(p);
        for (std::size_t x = 0; x < S; ++x) {
            const std::size_t xj = g.neighbor(x, j, 1), xk = g.neighbor(x, k, 1), xjk = g.neighbor(xj, k, 1);
            // Derivatives along the two edges meeting at each corner, all
            // expressed in that corner's fibre.
            const cplx a0 = D.comp[j][x], b0 = D.comp[k][x];
            const cplx a1 = std::conj(U.comp[j][x]) * D.comp[j][x], b1 = D.comp[k][xj];
            const cplx a2 = D.comp[j][xk], b2 = std::conj(U.comp[k][x]) * D.comp[k][x];
            const cplx a3 = std::conj(U.comp[j][xk]) * D.comp[j][xk];
            const cplx b3 = std::conj(U.comp[k][xj]) * D.comp[k][xj];
            const double s = std::imag(std::conj(a0) * b0) + std::imag(std::conj(a1) * b1) +
                             std::imag(std::conj(a2) * b2) + std::imag(std::conj(a3) * b3);
            psi[x] = 0.5 * s;
            const double m = 1.0 - 0.25 * (std::norm(pair.u[x]) + std::norm(pair.u[xj]) + std::norm(pair.u[xk]) +
                                           std::norm(pair.u[xjk]));
            cont[x] = psi[x] + m * w[x];
        }
    }
    r.mismatch = jacobian_form(pair) - r.continuum;
    std::vector<double> a(r.mismatch.values().size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(r.mismatch.values()[i]);
    r.l1 = g.cell_volume() * pairwise_sum(a);
    r.max = max_abs(std::span<const double>(a));
    return r;
}

ElResidual el_residual(const PairState& pair) { return el_residual(pair, link_terms(pair)); }

ElResidual el_residual(const PairState& pair, const LinkTerms& t) {
    const Grid& g = pair.grid();
    const std::size_t S = g.sites();
    const double eps2 = pair.eps * pair.eps;
    ElResidual r;
    covariant_laplacian(g, t.transport, pair.u, r.u);
    std::vector<cplx> force(S);
    kernels::active().potential_terms(pair.u.values.data(), 0.0, 0.5 / eps2, nullptr, force.data(), S);
    kernels::active().axpy(-1.0, force.data(), r.u.values.data(), S);

    r.alpha = d_star(g, t.omega);
    r.alpha *= eps2;
    for (int j = 0; j < g.n(); ++j) {
        auto c = r.alpha.component(j);
        for (std::size_t x = 0; x < S; ++x) c[x] -= t.cur[j][x];
    }

    std::vector<double> sq(S + r.alpha.values().size());
    for (std::size_t x = 0; x < S; ++x) sq[x] = std::norm(r.u[x]);
    for (std::size_t i = 0; i < r.alpha.values().size(); ++i) sq[S + i] = r.alpha.values()[i] * r.alpha.values()[i];
    r.l2 = std::sqrt(g.cell_volume() * pairwise_sum(sq));
    r.max = std::sqrt(max_abs(std::span<const double>(sq)));
    return r;
}

FormField stress_trace(const PairState& pair) {
    const Grid& g = pair.grid();
    const LinkTerms t = link_terms(pair);
    FormField out(g, 0);
    auto o = out.component(0);
    links_to_sites(g, t.d2, o);
    FormField w2 = t.omega;
    for (double& v : w2.values()) v *= v;
    std::vector<double> curv(g.sites());
    plaquettes_to_sites(g, w2, curv);
    const double c = 2.0 * pair.eps * pair.eps;
    for (std::size_t x = 0; x < g.sites(); ++x) o[x] += c * curv[x];
    return out;
}

}  // namespace ymh
