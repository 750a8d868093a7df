#include "ymh/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ymh/hodge.hpp"
#include "ymh/kernels.hpp"

namespace ymh {

namespace {

double dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return s;
}

bool finite(const std::vector<cplx>& v) {
    for (const cplx& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

bool finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

FormField current_form(const Grid& g, const LinkTerms& t) {
    FormField c(g, 1);
    for (int j = 0; j < g.n(); ++j) std::copy(t.cur[j].begin(), t.cur[j].end(), c.component(j).begin());
    return c;
}

// Solves (I + dt nabla* nabla) x = b by conjugate gradients; x holds the
// initial guess on entry.
void solve_u(const Grid& g, const LinkField& transport, const std::vector<cplx>& b, double dt, double tol,
             int max_iter, ScalarField& x) {
    const std::size_t S = g.sites();
    const auto& K = kernels::active();
    ScalarField Ap(S), lap(S);
    auto apply = [&](const ScalarField& in, ScalarField& out) {
        covariant_laplacian(g, transport, in, lap);
        out.values = in.values;
        K.axpy(dt, lap.values.data(), out.values.data(), S);
    };
    apply(x, Ap);
    std::vector<cplx> r(b);
    K.axpy(-1.0, Ap.values.data(), r.data(), S);
    ScalarField p(S);
    p.values = r;
    double rr = dot(r, r);
    const double stop = tol * tol * std::max(dot(b, b), 1e-300);
    for (int it = 0; it < max_iter; ++it) {
        if (rr <= stop) return;
        apply(p, Ap);
        const double a = rr / dot(p.values, Ap.values);
        K.axpy(a, p.values.data(), x.values.data(), S);
        K.axpy(-a, Ap.values.data(), r.data(), S);
        const double rn = dot(r, r);
        const double beta = rn / rr;
        rr = rn;
        for (std::size_t i = 0; i < S; ++i) p[i] = r[i] + beta * p[i];
    }
    if (rr > stop) throw NumericError("implicit u solve did not converge in " + std::to_string(max_iter) + " iterations");
}

struct Advance {
    PairState next;
    double rate = 0.0;  // vol sum (|u_t|^2 + eps^2 |alpha_t|^2), gauge part removed
};

Advance advance(const PairState& p, const LinkTerms& t, const FlowParams& prm, double dt) {
    const Grid& g = p.grid();
    const std::size_t S = g.sites();
    const double eps2 = p.eps * p.eps;
    const bool coulomb = prm.gauge == GaugeMode::coulomb;
    Advance out;
    out.next = p;
    PairState& q = out.next;

    FormField phi, dphi;
    if (coulomb) {
        phi = q_operator(g, current_form(g, t));
        phi *= 1.0 / eps2;
        dphi = d(g, phi);
    }

    // Covariant velocities (without the gauge rotation).
    ScalarField ut(S);
    FormField at(g, 1);

    if (prm.scheme == FlowScheme::explicit_euler) {
        const ElResidual r = el_residual(p, t);
        for (std::size_t x = 0; x < S; ++x) ut[x] = -r.u[x];
        at = r.alpha;
        at *= -1.0 / eps2;
        q.u = p.u;
        kernels::active().axpy(dt, ut.values.data(), q.u.values.data(), S);
        q.alpha = p.alpha + dt * at;
        if (coulomb) {
            for (std::size_t x = 0; x < S; ++x) q.u[x] += dt * cplx(0.0, phi.values()[x]) * p.u[x];
            q.alpha += dt * dphi;
        }
    } else {
        std::vector<cplx> b(p.u.values);
        std::vector<cplx> force(S);
        kernels::active().potential_terms(p.u.values.data(), 0.0, 0.5 / eps2, nullptr, force.data(), S);
        kernels::active().axpy(dt, force.data(), b.data(), S);
        solve_u(g, t.transport, b, dt, prm.cg_tol, prm.cg_max_iter, q.u);
        for (std::size_t x = 0; x < S; ++x) ut[x] = (q.u[x] - p.u[x]) / dt;

        FormField f = current_form(g, t);
        if (coulomb) f += eps2 * dphi;  // P(current)
        f *= dt / eps2;
        f += p.alpha;
        if (coulomb) {
            q.alpha = hodge_resolvent(g, f, dt);
        } else {
            const HodgeSplit s = hodge_decompose(g, f);
            q.alpha = s.exact + hodge_resolvent(g, s.coexact + s.harmonic, dt);
        }
        at = q.alpha - p.alpha;
        at *= 1.0 / dt;
        if (coulomb)
            for (std::size_t x = 0; x < S; ++x) q.u[x] *= std::polar(1.0, dt * phi.values()[x]);
    }

    std::vector<double> sq(S + at.values().size());
    for (std::size_t x = 0; x < S; ++x) sq[x] = std::norm(ut[x]);
    for (std::size_t i = 0; i < at.values().size(); ++i) sq[S + i] = eps2 * at.values()[i] * at.values()[i];
    out.rate = g.cell_volume() * pairwise_sum(sq);
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double wrapped(double d, double l) { return d - l * std::round(d / l); }

// One-dimensional periodic heat kernel at x = i h, normalized to sum h = 1.
std::vector<double> heat_1d(int N, double l, double t, double x0) {
    const double h = l / N;
    std::vector<double> v(N);
    const double cut = 40.0;  // e^{-40} < 1e-17
    for (int i = 0; i < N; ++i) {
        const double dx = wrapped(i * h - x0, l);
        double s = 0.0;
        if (t <= l * l / (4.0 * kPi)) {
            const int M = static_cast<int>(std::ceil(std::sqrt(4.0 * t * cut) / l)) + 1;
            for (int m = -M; m <= M; ++m) {
                const double y = dx + m * l;
                s += std::exp(-y * y / (4.0 * t));
            }
            s /= std::sqrt(4.0 * kPi * t);
        } else {
            s = 1.0;
            for (int k = 1;; ++k) {
                const double e = 4.0 * kPi * kPi * k * k * t / (l * l);
                if (e > cut) break;
                s += 2.0 * std::exp(-e) * std::cos(kTwoPi * k * dx / l);
            }
            s /= l;
        }
        v[i] = s;
    }
    const double total = std::accumulate(v.begin(), v.end(), 0.0) * h;
    for (double& x : v) x /= total;
    return v;
}

}  // namespace

double explicit_dt_limit(const Grid& g, double eps) {
    const double h = g.min_spacing();
    return 0.2 * h * h * std::min(1.0, eps * eps);
}

double default_dt(const Grid& g, double eps, FlowScheme scheme) {
    return scheme == FlowScheme::explicit_euler ? explicit_dt_limit(g, eps) : 0.25 * eps * eps;
}

void check_params(const Grid& g, double eps, const FlowParams& prm) {
    if (!(prm.dt > 0.0)) throw InvalidArgument("flow: dt must be positive");
    if (!(prm.t_end >= 0.0)) throw InvalidArgument("flow: t_end must be non-negative");
    if (prm.monitor_stride <= 0) throw InvalidArgument("flow: monitor stride must be positive");
    if (prm.scheme == FlowScheme::explicit_euler) {
        const double lim = explicit_dt_limit(g, eps);
        if (prm.dt > lim * (1.0 + 1e-12))
            throw InvalidArgument("flow: explicit dt " + fmt(prm.dt) + " exceeds the stability guard " + fmt(lim));
    } else if (prm.dt > eps * eps * (1.0 + 1e-12)) {
        throw InvalidArgument("flow: IMEX dt " + fmt(prm.dt) + " exceeds eps^2 = " + fmt(eps * eps));
    }
}

PairState step(const PairState& pair, const FlowParams& params) {
    validate(pair);
    FlowParams prm = params;
    if (prm.dt == 0.0) prm.dt = default_dt(pair.grid(), pair.eps, prm.scheme);
    check_params(pair.grid(), pair.eps, prm);
    PairState next = advance(pair, link_terms(pair), prm, prm.dt).next;
    if (!finite(next.u.values) || !finite(next.alpha.values()))
        throw NumericError("flow: non-finite value at step 1");
    return next;
}

Trajectory run(const PairState& pair, const FlowParams& params, const FlowObserver& observer) {
    validate(pair);
    FlowParams prm = params;
    if (prm.dt == 0.0) prm.dt = default_dt(pair.grid(), pair.eps, prm.scheme);
    check_params(pair.grid(), pair.eps, prm);

    Trajectory tr;
    tr.dt = prm.dt;
    PairState p = prm.gauge == GaugeMode::coulomb ? coulomb_project(pair) : pair;

    const long nsteps = static_cast<long>(std::ceil(prm.t_end / prm.dt - 1e-9));
    const bool armed = prm.max_principle && max_abs_u(p) <= 1.0 + 1e-12;
    double e0 = 0.0, e_prev = 0.0, tol = prm.stationarity_tol;
    tr.max_abs_u = max_abs_u(p);

    for (long k = 0;; ++k) {
        const double t = std::min(k * prm.dt, prm.t_end);
        const LinkTerms terms = link_terms(p);
        EnergyReport rep = energy(p, terms);
        if (!std::isfinite(rep.total)) throw NumericError("flow: non-finite energy at step " + std::to_string(k));
        if (k == 0) {
            e0 = rep.total;
            if (tol < 0.0) tol = 1e-6 * std::sqrt(e0);
        } else {
            const double inc = (rep.total - e_prev) / std::max(e0, 1e-300);
            tr.max_energy_increase = std::max(tr.max_energy_increase, inc);
            if (prm.check_monotone && rep.total > e_prev + 1e-8 * e0)
                throw NumericError("flow: energy increased by " + fmt(rep.total - e_prev) + " at step " +
                                   std::to_string(k));
        }
        e_prev = rep.total;

        const bool last = k >= nsteps;
        if (k % prm.monitor_stride == 0 || last) {
            FlowSample s;
            s.t = t;
            const ElResidual res = el_residual(p, terms);
            s.el_l2 = res.l2;
            const FormField xi = discrepancy(p);
            for (double v : xi.values()) s.max_xi_plus = std::max(s.max_xi_plus, v);
            s.max_abs_u = rep.max_abs_u;
            const double drop = e0 - rep.total;
            s.dissipation_residual = (drop == 0.0 && tr.dissipation == 0.0)
                                         ? 0.0
                                         : std::abs(drop - tr.dissipation) / std::max(std::abs(drop), 1e-300);
            if (!prm.record_density) rep.density = FormField();
            s.report = std::move(rep);
            tr.samples.push_back(std::move(s));
            if (observer) observer(tr.samples.back(), p);
            if (tol > 0.0 && res.l2 < tol) {
                tr.stationary = true;
                break;
            }
        }
        if (last) break;

        const double h = std::min(prm.dt, prm.t_end - k * prm.dt);
        Advance a = advance(p, terms, prm, h);
        if (!finite(a.next.u.values) || !finite(a.next.alpha.values()))
            throw NumericError("flow: non-finite value at step " + std::to_string(k + 1));
        tr.dissipation += 2.0 * h * a.rate;
        p = std::move(a.next);
        ++tr.steps;
        const double mu = max_abs_u(p);
        tr.max_abs_u = std::max(tr.max_abs_u, mu);
        if (armed && mu > 1.0 + 1e-9)
            throw NumericError("flow: max |u| = " + fmt(mu) + " above 1 at step " + std::to_string(k + 1));
    }
    tr.energy_drop = e0 - tr.samples.back().report.total;
    tr.monitor_stride = prm.monitor_stride;
    tr.final_state = std::move(p);
    return tr;
}

std::string Trajectory::csv_header() {
    return "t,E,gradientPart,curvaturePart,potentialPart,dissipationResidual,maxXiPlus,maxAbsU,maxDensity";
}

std::string Trajectory::csv() const {
    std::ostringstream os;
    os << csv_header() << '\n';
    for (const FlowSample& s : samples) {
        os << fmt(s.t) << ',' << fmt(s.report.total) << ',' << fmt(s.report.gradient) << ','
           << fmt(s.report.curvature) << ',' << fmt(s.report.potential) << ',' << fmt(s.dissipation_residual) << ','
           << fmt(s.max_xi_plus) << ',' << fmt(s.max_abs_u) << ',' << fmt(s.report.max_density) << '\n';
    }
    return os.str();
}

FormField discrepancy(const PairState& pair) {
    validate(pair);
    const Grid& g = pair.grid();
    const FormField om = curvature(pair);
    FormField xi(g, 0);
    auto out = xi.component(0);
    for (std::size_t x = 0; x < g.sites(); ++x) {
        double s2 = 0.0;
        for (int p = 0; p < g.plane_count(); ++p) {
            const Plane pl = g.plane(p);
            const auto w = om.component(p);
            const std::size_t a = g.neighbor(x, pl.j, -1), b = g.neighbor(x, pl.k, -1), c = g.neighbor(a, pl.k, -1);
            const double avg = 0.25 * (std::abs(w[x]) + std::abs(w[a]) + std::abs(w[b]) + std::abs(w[c]));
            s2 += avg * avg;
        }
        out[x] = pair.eps * std::sqrt(s2) - (1.0 - std::norm(pair.u[x])) / (2.0 * pair.eps);
    }
    return xi;
}

FormField heat_kernel(const Grid& g, double t, const std::array<double, kMaxDim>& x0) {
    if (!(t > 0.0)) throw InvalidArgument("heat_kernel: t must be positive");
    std::array<std::vector<double>, kMaxDim> k1;
    for (int a = 0; a < g.n(); ++a) k1[a] = heat_1d(g.dim(a), g.length(a), t, x0[a]);
    FormField K(g, 0);
    auto v = K.component(0);
    for (std::size_t x = 0; x < g.sites(); ++x) {
        const Index3 c = g.coords(x);
        double s = 1.0;
        for (int a = 0; a < g.n(); ++a) s *= k1[a][c[a]];
        v[x] = s;
    }
    return K;
}

MonotonicityProfile monotonicity_profile(const Trajectory& traj, double T, const std::array<double, kMaxDim>& x0,
                                         double C2) {
    if (T < 2.0 || T > 3.0) throw InvalidArgument("monotonicity_profile: T must lie in [2, 3]");
    if (traj.samples.empty()) throw InvalidArgument("monotonicity_profile: empty trajectory");
    const PairState& fin = traj.final_state;
    const Grid& g = fin.grid();
    const int n = g.n();
    const double gap = traj.monitor_stride * traj.dt * (1.0 + 1e-9) + 1e-12;
    const double t0 = T - 1.0, slack = 1e-9 * T;

    std::vector<const FlowSample*> win;
    for (const FlowSample& s : traj.samples)
        if (s.t >= t0 - slack && s.t < T - slack) win.push_back(&s);
    if (win.empty() || win.front()->t > t0 + slack)
        throw InvalidArgument("monotonicity_profile: no sample at T - 1 = " + fmt(t0));
    if (T - win.back()->t > gap)
        throw InvalidArgument("monotonicity_profile: trajectory ends at " + fmt(win.back()->t) + " before T");
    for (std::size_t i = 1; i < win.size(); ++i)
        if (win[i]->t - win[i - 1]->t > gap)
            throw InvalidArgument("monotonicity_profile: gap after t = " + fmt(win[i - 1]->t) +
                                  " exceeds the monitor stride");

    const double expo = 1.0 + C2 * std::pow(fin.eps, 2.0 / (n - 1));
    const double vol = g.cell_volume();
    auto prim = [&](double s) {  // antiderivative of log(T - s)
        const double r = T - s;
        return -r * std::log(r) + r;
    };
    MonotonicityProfile out;
    double psi0 = 0.0, psimax = 0.0;
    for (const FlowSample* s : win) {
        if (s->report.density.values().size() != g.sites())
            throw InvalidArgument("monotonicity_profile: trajectory was run without record_density");
        const double tau = T - s->t;
        const FormField K = heat_kernel(g, tau, x0);
        std::vector<double> prod(g.sites());
        for (std::size_t x = 0; x < g.sites(); ++x) prod[x] = K.values()[x] * s->report.density.values()[x];
        const double phi = vol * pairwise_sum(prod);
        const double zeta = 0.5 * C2 * n * (prim(s->t) - prim(1.0));
        const double psi = std::pow(tau, expo) * std::exp(zeta) * phi;
        if (out.points.empty()) psi0 = psi;
        psimax = std::max(psimax, psi);
        out.points.push_back({s->t, phi, psi});
    }
    out.ratio = psimax / (psi0 + 1.0);
    return out;
}

DensityRatio density_ratio(const PairState& pair, const std::array<double, kMaxDim>& x0) {
    const Grid& g = pair.grid();
    const EnergyReport rep = energy(pair);
    const std::size_t S = g.sites();
    std::vector<double> dist(S);
    for (std::size_t x = 0; x < S; ++x) {
        double s = 0.0;
        for (int a = 0; a < g.n(); ++a) {
            const double dx = wrapped(g.position(x, a) - x0[a], g.length(a));
            s += dx * dx;
        }
        dist[x] = std::sqrt(s);
    }
    std::vector<std::size_t> order(S);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    DensityRatio out;
    std::size_t i = 0;
    double acc = 0.0;
    const double vol = g.cell_volume();
    for (int k = 0;; ++k) {
        const double r = pair.eps * std::pow(std::sqrt(2.0), k);
        if (r > 1.0 + 1e-12) break;
        while (i < S && dist[order[i]] <= r) acc += rep.density.values()[order[i++]];
        const double ratio = std::pow(r, 2.0 - g.n()) * acc * vol;
        out.radius.push_back(r);
        out.ratio.push_back(ratio);
        out.max = std::max(out.max, ratio);
    }
    return out;
}

}  // namespace ymh
