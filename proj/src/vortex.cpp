#include "ymh/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

#include "ymh/hodge.hpp"

namespace ymh {

namespace {

struct FA {
    double f, a;
};

FA rhs(double r, FA s, int k) { return {(k - s.a) * s.f / r, r * (1.0 - s.f * s.f) / 2.0}; }

FA rk4(double r, double h, FA s, int k) {
    const FA k1 = rhs(r, s, k);
    const FA k2 = rhs(r + h / 2, {s.f + h / 2 * k1.f, s.a + h / 2 * k1.a}, k);
    const FA k3 = rhs(r + h / 2, {s.f + h / 2 * k2.f, s.a + h / 2 * k2.a}, k);
    const FA k4 = rhs(r + h, {s.f + h * k3.f, s.a + h * k3.a}, k);
    return {s.f + h / 6 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f), s.a + h / 6 * (k1.a + 2 * k2.a + 2 * k3.a + k4.a)};
}

FA series(double r, double c, int k) {
    const double f = c * std::pow(r, k) * std::exp(-r * r / 8.0);
    const double a = r * r / 4.0 - c * c * std::pow(r, 2 * k + 2) / (4.0 * (k + 1));
    return {f, a};
}

enum class Outcome { overshoot, undershoot, reached };

struct Shot {
    Outcome outcome = Outcome::reached;
    std::size_t stop = 0;  // first index where the trajectory left the band
    std::vector<FA> y;
};

Shot shoot(double c, int k, const std::vector<double>& mesh) {
    Shot s;
    s.y.resize(mesh.size());
    s.y[0] = series(mesh[0], c, k);
    for (std::size_t i = 1; i < mesh.size(); ++i) {
        s.y[i] = rk4(mesh[i - 1], mesh[i] - mesh[i - 1], s.y[i - 1], k);
        if (s.y[i].f > 1.0) {
            s.outcome = Outcome::overshoot;
            s.stop = i;
            s.y.resize(i + 1);
            return s;
        }
        if (s.y[i].a > k) {
            s.outcome = Outcome::undershoot;
            s.stop = i;
            s.y.resize(i + 1);
            return s;
        }
    }
    s.stop = mesh.size();
    return s;
}

double hermite(double t, double h, double y0, double y1, double m0, double m1) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

double hermite_d(double t, double h, double y0, double y1, double m0, double m1) {
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y0 + (-6 * t2 + 6 * t) * y1) / h + (3 * t2 - 4 * t + 1) * m0 + (3 * t2 - 2 * t) * m1;
}

}  // namespace

VortexProfile solve_profile(int k, double r_max, double tol, const ProfileOptions& opt) {
    VortexProfile p;
    p.k_ = k;
    p.r_max_ = r_max;
    if (k == 0) return p;
    if (r_max < 20.0) throw InvalidArgument("solve_profile: r_max must be at least 20");
    if (!(opt.r0 > 0.0 && opt.dr > 0.0 && opt.geometric > 0.0)) throw InvalidArgument("solve_profile: bad mesh options");
    const int K = std::abs(k);
    p.sign_ = k > 0 ? 1 : -1;
    p.r0_ = opt.r0;

    std::vector<double> mesh{opt.r0};
    while (mesh.back() < r_max) {
        const double r = mesh.back();
        mesh.push_back(std::min(r_max, r + std::min(opt.geometric * r, opt.dr)));
    }

    double lo = 1e-8, hi = 10.0;
    Shot slo = shoot(lo, K, mesh), shi = shoot(hi, K, mesh);
    if (slo.outcome != Outcome::undershoot || shi.outcome != Outcome::overshoot) {
        throw NumericError("solve_profile: shooting interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "] does not bracket the vortex (k = " + std::to_string(k) + ")");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) break;
        Shot s = shoot(mid, K, mesh);
        if (s.outcome == Outcome::overshoot) {
            hi = mid;
            shi = std::move(s);
        } else {
            lo = mid;
            slo = std::move(s);
        }
        if ((hi - lo) <= 1e-16 * hi) break;
    }
    if ((hi - lo) > std::max(tol, 1e-14) * hi) throw NumericError("solve_profile: bisection did not converge");
    p.c_ = lo;

    // Splice where both bracketing trajectories agree and 1 - f is small.
    const std::size_t common = std::min(slo.y.size(), shi.y.size());
    std::size_t is = 0;
    for (std::size_t i = 1; i < common; ++i) {
        const double g = 1.0 - slo.y[i].f;
        if (g < opt.splice_tol && slo.y[i].a < K) {
            is = i;
            break;
        }
    }
    if (is == 0) throw NumericError("solve_profile: trajectory never reached the splice tolerance");
    if (std::abs(slo.y[is].f - shi.y[is].f) > 1e-3 * opt.splice_tol) {
        throw NumericError("solve_profile: bracketing trajectories disagree at the splice point");
    }
    const double rs = mesh[is];
    p.r_splice_ = rs;
    p.tail_c_ = (1.0 - slo.y[is].f) / std::cyl_bessel_k(0.0, rs);

    p.r_ = mesh;
    p.f_.resize(mesh.size());
    p.a_.resize(mesh.size());
    p.df_.resize(mesh.size());
    p.da_.resize(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double r = mesh[i];
        FA y;
        if (i < is) {
            y = slo.y[i];
        } else {
            y = {1.0 - p.tail_c_ * std::cyl_bessel_k(0.0, r), K - p.tail_c_ * r * std::cyl_bessel_k(1.0, r)};
        }
        const FA d = rhs(r, y, K);
        p.f_[i] = y.f;
        p.a_[i] = y.a;
        p.df_[i] = d.f;
        p.da_[i] = d.a;
    }
    if (p.f_.back() < 1.0 - std::max(tol, 1e-6)) throw NumericError("solve_profile: f(r_max) below 1 - tol");
    return p;
}

VortexProfile::Value VortexProfile::eval_abs(double r) const {
    const int K = std::abs(k_);
    if (K == 0) return {1.0, 0.0, 0.0, 0.0};
    r = std::abs(r);
    if (r >= r_max_) return {1.0, double(K), 0.0, 0.0};
    if (r < r0_) {
        const FA s = series(r, c_, K);
        const FA d = r > 0.0 ? rhs(r, s, K) : FA{K == 1 ? c_ : 0.0, 0.0};
        return {s.f, s.a, d.f, d.a};
    }
    auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t i = static_cast<std::size_t>(it - r_.begin());
    i = std::clamp<std::size_t>(i, 1, r_.size() - 1) - 1;
    const double h = r_[i + 1] - r_[i];
    const double t = (r - r_[i]) / h;
    return {hermite(t, h, f_[i], f_[i + 1], df_[i], df_[i + 1]), hermite(t, h, a_[i], a_[i + 1], da_[i], da_[i + 1]),
            hermite_d(t, h, f_[i], f_[i + 1], df_[i], df_[i + 1]), hermite_d(t, h, a_[i], a_[i + 1], da_[i], da_[i + 1])};
}

VortexProfile::Value VortexProfile::eval(double r) const {
    Value v = eval_abs(r);
    if (sign_ < 0) {
        v.a = -v.a;
        v.da = -v.da;
    }
    return v;
}

double VortexProfile::max_residual() const {
    const int K = std::abs(k_);
    if (K == 0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < r_.size(); ++i) {
        const double r = 0.5 * (r_[i] + r_[i + 1]);
        const Value v = eval_abs(r);
        worst = std::max(worst, std::abs(v.df - (K - v.a) * v.f / r));
        worst = std::max(worst, std::abs(v.da / r - (1.0 - v.f * v.f) / 2.0));
    }
    return worst;
}

ProfileEnergy profile_energy(const VortexProfile& p) {
    ProfileEnergy e;
    const int K = std::abs(p.k());
    if (K == 0) return e;
    static constexpr double xg[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    auto density = [&](double r) {
        const auto v = p.eval(r);
        const double a = std::abs(v.a), da = std::abs(v.da);
        const double m = 1.0 - v.f * v.f;
        return (v.df * v.df + (K - a) * (K - a) * v.f * v.f / (r * r) + (da / r) * (da / r) + m * m / 4.0) * r;
    };
    std::vector<double> knots{0.0};
    knots.insert(knots.end(), p.r().begin(), p.r().end());
    std::vector<double> parts;
    parts.reserve(knots.size());
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i], b = knots[i + 1];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (int q = 0; q < 3; ++q) s += wg[q] * density(mid + half * xg[q]);
        parts.push_back(s * half);
    }
    e.value = kTwoPi * pairwise_sum(parts);
    e.defect = e.value - kTwoPi * K;
    return e;
}

void write_profile_csv(const VortexProfile& p, std::ostream& os) {
    os << "r,f,a,residual_f,residual_a\n";
    const int K = std::abs(p.k());
    char buf[160];
    for (std::size_t i = 0; i < p.r().size(); ++i) {
        const double r = p.r()[i];
        const auto v = p.eval(r);
        const double a = std::abs(v.a);
        const double rf = v.df - (K - a) * v.f / r;
        const double ra = std::abs(v.da) / r - (1.0 - v.f * v.f) / 2.0;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.3e,%.3e\n", r, v.f, v.a, rf, ra);
        os << buf;
    }
}

// ---------------------------------------------------------------------------
// Synthesis

namespace {

struct CoreGeometry {
    int j, k;        // transverse plane, j < k
    int plane;       // plane index
    double cj, ck;   // core position
    int degree;
    int cell_j, cell_k;  // plaquette containing the core
    const VortexProfile* profile;
};

double wrap_min_image(double d, double L) { return d - L * std::round(d / L); }

double smooth_cut(double r, double lambda) {
    if (r <= lambda) return 1.0;
    if (r >= 2.0 * lambda) return 0.0;
    const double t = (r - lambda) / lambda;
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int m = 1; m <= n; ++m) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * m - 1.0) * z * p1 - (m - 1.0) * p2) / m;
            }
            const double dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                x[i] = 0.5 * (1.0 - z);
                w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
                break;
            }
        }
    }
}

}  // namespace

PairState synthesize_cores(LatticeHandle lattice, double eps, const std::vector<VortexCore>& cores,
                           const std::vector<VortexProfile>& profiles, const SynthesisOptions& opt) {
    PairState pair = make_pair(lattice, eps);
    const Grid& g = pair.grid();
    const int n = g.n();
    const std::size_t S = g.sites();
    if (!(opt.lambda > 0.0)) throw InvalidArgument("synthesis needs a positive glueing radius");

    std::vector<CoreGeometry> geo;
    std::array<long, 3> plane_degree{0, 0, 0};
    for (const VortexCore& c : cores) {
        CoreGeometry cg{};
        if (n == 2) {
            cg.j = 0;
            cg.k = 1;
        } else {
            if (c.axis < 0 || c.axis > 2) throw InvalidArgument("vortex line needs an axis in 3D");
            cg.j = c.axis == 0 ? 1 : 0;
            cg.k = c.axis == 2 ? 1 : 2;
        }
        cg.plane = g.plane_index(cg.j, cg.k);
        cg.cj = c.pos[0] - g.length(cg.j) * std::floor(c.pos[0] / g.length(cg.j));
        cg.ck = c.pos[1] - g.length(cg.k) * std::floor(c.pos[1] / g.length(cg.k));
        cg.degree = c.degree;
        const double uj = cg.cj / g.spacing(cg.j), uk = cg.ck / g.spacing(cg.k);
        const double fj = uj - std::floor(uj), fk = uk - std::floor(uk);
        if (fj < 1e-9 || fj > 1 - 1e-9 || fk < 1e-9 || fk > 1 - 1e-9) {
            throw InvalidArgument("vortex core lies on a lattice link; move it inside a plaquette");
        }
        cg.cell_j = static_cast<int>(std::floor(uj)) % g.dim(cg.j);
        cg.cell_k = static_cast<int>(std::floor(uk)) % g.dim(cg.k);
        if (c.degree == 0) continue;
        cg.profile = nullptr;
        for (const VortexProfile& p : profiles)
            if (std::abs(p.k()) == std::abs(c.degree)) cg.profile = &p;
        if (!cg.profile) throw InvalidArgument("no profile for vortex degree " + std::to_string(c.degree));
        plane_degree[cg.plane] += c.degree;
        geo.push_back(cg);
    }
    for (int p = 0; p < g.plane_count(); ++p) {
        const auto [j, k] = g.plane(p);
        if (plane_degree[p] != g.flux(j, k)) {
            throw InvalidArgument("vortex degrees (" + std::to_string(plane_degree[p]) +
                                  ") do not match the flux sector m_" + std::to_string(j) + std::to_string(k) + " = " +
                                  std::to_string(g.flux(j, k)));
        }
    }

    // Flat background with the vortex fluxes concentrated on core plaquettes.
    FormField F = pair.lattice->background.curvature;
    F *= -1.0;
    for (const CoreGeometry& c : geo) {
        const double q = kTwoPi * c.degree / (g.spacing(c.j) * g.spacing(c.k));
        auto comp = F.component(c.plane);
        for (std::size_t x = 0; x < S; ++x) {
            const Index3 xc = g.coords(x);
            if (xc[c.j] == c.cell_j && xc[c.k] == c.cell_k) comp[x] += q;
        }
    }
    FormField alpha_v = solve_curl(g, F);
    {
        const LinkField U = link_transport(*pair.lattice, alpha_v);
        for (int a = 0; a < n; ++a) {
            cplx hol(1.0, 0.0);
            for (int t = 0; t < g.dim(a); ++t) {
                Index3 c{0, 0, 0};
                c[a] = t;
                hol *= U.comp[a][g.index(c)];
            }
            const double shift = std::arg(hol) / g.length(a);
            for (double& v : alpha_v.component(a)) v += shift;
        }
    }
    const LinkField U = link_transport(*pair.lattice, alpha_v);
    std::vector<cplx> v(S);
    v[0] = 1.0;
    for (std::size_t x = 1; x < S; ++x) {
        const Index3 c = g.coords(x);
        int a = n - 1;
        while (c[a] == 0) --a;
        const std::size_t y = x - g.stride(a);
        v[x] = std::conj(U.comp[a][y]) * v[y];
        v[x] /= std::abs(v[x]);
    }

    const double lambda = opt.lambda;
    std::vector<double> modulus(S, 1.0);
    FormField c0(g, 1);
    std::vector<double> gx, gw;
    gauss_rule(std::max(2, opt.link_quadrature), gx, gw);

    for (const CoreGeometry& c : geo) {
        const VortexProfile& prof = *c.profile;
        const int sgn = c.degree > 0 ? 1 : -1;
        const double K = std::abs(c.degree);
        const double hj = g.spacing(c.j), hk = g.spacing(c.k);
        const double Lj = g.length(c.j), Lk = g.length(c.k);
        auto rel = [&](std::size_t x) {
            const Index3 xc = g.coords(x);
            return std::array<double, 2>{wrap_min_image(xc[c.j] * hj - c.cj, Lj), wrap_min_image(xc[c.k] * hk - c.ck, Lk)};
        };
        auto atilde = [&](double r) { return smooth_cut(r, lambda) * std::abs(prof.eval(r / eps).a); };
        for (std::size_t x = 0; x < S; ++x) {
            const auto p = rel(x);
            const double r = std::hypot(p[0], p[1]);
            if (r >= 2.0 * lambda) continue;
            const double f = prof.eval(r / eps).f;
            modulus[x] *= 1.0 - smooth_cut(r, lambda) * (1.0 - f);
        }
        for (int dir = 0; dir < 2; ++dir) {
            const int axis = dir == 0 ? c.j : c.k;
            const double h = g.spacing(axis);
            auto comp = c0.component(axis);
            for (std::size_t x = 0; x < S; ++x) {
                const auto p0 = rel(x);
                const double p1[2] = {p0[0] + (dir == 0 ? h : 0.0), p0[1] + (dir == 1 ? h : 0.0)};
                const double r0 = std::hypot(p0[0], p0[1]), r1 = std::hypot(p1[0], p1[1]);
                // Closest approach of the segment to the core.
                const double along = dir == 0 ? -p0[0] : -p0[1];
                const double t = std::clamp(along / h, 0.0, 1.0);
                const double rmin = std::hypot(p0[0] + (dir == 0 ? t * h : 0.0), p0[1] + (dir == 1 ? t * h : 0.0));
                if (rmin >= 2.0 * lambda) continue;
                // Integral of chi * a d theta (smooth: a ~ r^2 at the core).
                double s = 0.0;
                for (std::size_t q = 0; q < gx.size(); ++q) {
                    const double X = p0[0] + (dir == 0 ? gx[q] * h : 0.0);
                    const double Y = p0[1] + (dir == 1 ? gx[q] * h : 0.0);
                    const double r2 = X * X + Y * Y;
                    const double dth = dir == 0 ? -Y * h / r2 : X * h / r2;
                    s += gw[q] * atilde(std::sqrt(r2)) * dth;
                }
                // Minus K times the integral of chi d theta.
                double cut;
                if (std::max(r0, r1) <= lambda) {
                    cut = wrap_angle(std::atan2(p1[1], p1[0]) - std::atan2(p0[1], p0[0]));
                } else {
                    cut = 0.0;
                    for (std::size_t q = 0; q < gx.size(); ++q) {
                        const double X = p0[0] + (dir == 0 ? gx[q] * h : 0.0);
                        const double Y = p0[1] + (dir == 1 ? gx[q] * h : 0.0);
                        const double r2 = X * X + Y * Y;
                        const double dth = dir == 0 ? -Y * h / r2 : X * h / r2;
                        cut += gw[q] * smooth_cut(std::sqrt(r2), lambda) * dth;
                    }
                }
                comp[x] += sgn * (s - K * cut) / h;
            }
        }
    }

    for (std::size_t x = 0; x < S; ++x) pair.u[x] = modulus[x] * v[x];
    pair.alpha = alpha_v + c0;
    return pair;
}

PairState synthesize_planar(const VortexProfile& profile, double eps, LatticeHandle grid2,
                            std::array<double, 2> center) {
    const Grid& g = grid2->grid;
    if (g.n() != 2) throw InvalidArgument("synthesize_planar needs a 2D grid");
    if (g.flux(0, 1) != profile.k()) {
        throw InvalidArgument("vortex degree " + std::to_string(profile.k()) + " does not match the flux sector " +
                              std::to_string(g.flux(0, 1)));
    }
    if (eps > g.min_length() / 10.0) throw InvalidArgument("synthesize_planar: eps must be at most min l / 10");
    VortexCore core;
    core.pos[0] = center[0];
    core.pos[1] = center[1];
    core.degree = profile.k();
    SynthesisOptions opt;
    opt.lambda = g.min_length() / 6.0;
    std::vector<VortexCore> cores;
    if (profile.k() != 0) cores.push_back(core);
    return synthesize_cores(grid2, eps, cores, {profile}, opt);
}

// ---------------------------------------------------------------------------
// Recovery pairs

namespace {

struct LoopSpec {
    VortexCore core;
    int axis;
};

std::vector<VortexCore> cycle_to_cores(const Grid& g, const CubicalCurrent& cycle) {
    if (!cycle.dual()) throw InvalidArgument("recovery cycles live on the dual grid");
    const int n = g.n();
    if (cycle.dim() != n - 2) throw InvalidArgument("recovery cycle must have dimension n - 2");
    std::vector<VortexCore> cores;
    if (n == 2) {
        for (const auto& [cell, m] : cycle.cells()) {
            VortexCore c;
            c.pos[0] = (cell.base[0] + 0.5) * g.spacing(0);
            c.pos[1] = (cell.base[1] + 0.5) * g.spacing(1);
            c.degree = static_cast<int>(m);
            cores.push_back(c);
        }
        return cores;
    }
    // Group dual links by axis and transverse position; each group must be
    // a full loop with constant multiplicity.
    std::map<std::tuple<int, int, int>, std::map<int, long>> groups;
    for (const auto& [cell, m] : cycle.cells()) {
        if (cell.dim() != 1) throw InvalidArgument("recovery cycle must consist of links");
        const int l = __builtin_ctz(cell.axes);
        const int j = l == 0 ? 1 : 0, k = l == 2 ? 1 : 2;
        groups[{l, cell.base[j], cell.base[k]}][cell.base[l]] += m;
    }
    for (const auto& [key, line] : groups) {
        const auto [l, bj, bk] = key;
        const int j = l == 0 ? 1 : 0, k = l == 2 ? 1 : 2;
        const long m = line.begin()->second;
        if (static_cast<int>(line.size()) != g.dim(l)) {
            throw InvalidArgument("recovery cycle is not a union of straight closed axis loops");
        }
        for (const auto& [t, mm] : line) {
            if (mm != m) throw InvalidArgument("recovery loop has non-constant multiplicity");
        }
        // Plaquette (x; j, k) is dual to the link (x - e_l, l) with sign eps_{jkl}.
        const int sign = (l == 1) ? -1 : 1;
        VortexCore c;
        c.axis = l;
        c.pos[0] = (bj + 0.5) * g.spacing(j);
        c.pos[1] = (bk + 0.5) * g.spacing(k);
        c.degree = static_cast<int>(sign * m);
        cores.push_back(c);
    }
    return cores;
}

double core_distance(const Grid& g, const VortexCore& a, const VortexCore& b) {
    if (g.n() == 2) {
        const double dx = wrap_min_image(a.pos[0] - b.pos[0], g.length(0));
        const double dy = wrap_min_image(a.pos[1] - b.pos[1], g.length(1));
        return std::hypot(dx, dy);
    }
    auto coord = [](const VortexCore& c, int axis) {
        const int j = c.axis == 0 ? 1 : 0;
        return axis == j ? c.pos[0] : c.pos[1];
    };
    if (a.axis == b.axis) {
        const int j = a.axis == 0 ? 1 : 0, k = a.axis == 2 ? 1 : 2;
        return std::hypot(wrap_min_image(a.pos[0] - b.pos[0], g.length(j)),
                          wrap_min_image(a.pos[1] - b.pos[1], g.length(k)));
    }
    const int m = 3 - a.axis - b.axis;
    return std::abs(wrap_min_image(coord(a, m) - coord(b, m), g.length(m)));
}

}  // namespace

double recovery_lambda(const Grid& g, const CubicalCurrent& cycle, double eps, const RecoveryOptions& opt) {
    const std::vector<VortexCore> cores = cycle_to_cores(g, cycle);
    double dmin = g.min_length();
    for (std::size_t i = 0; i < cores.size(); ++i) {
        if (g.n() == 3) {
            const int j = cores[i].axis == 0 ? 1 : 0, k = cores[i].axis == 2 ? 1 : 2;
            dmin = std::min({dmin, g.length(j), g.length(k)});
        }
        for (std::size_t q = i + 1; q < cores.size(); ++q) {
            const double dd = core_distance(g, cores[i], cores[q]);
            if (dd < opt.min_separation * eps) {
                throw InvalidArgument("recovery loops are closer than " + std::to_string(opt.min_separation) +
                                      " eps");
            }
            dmin = std::min(dmin, dd);
        }
    }
    const double cap = 0.45 * dmin / 2.0;
    if (opt.lambda > 0.0) return std::min(opt.lambda, cap);
    return std::min(opt.c_lambda * std::pow(eps, 0.75), cap);
}

PairState build_recovery_pair(LatticeHandle lattice, const CubicalCurrent& cycle, double eps,
                              const RecoveryOptions& opt) {
    const Grid& g = lattice->grid;
    if (cycle.lattice() && !cycle.grid().same_shape(g)) throw InvalidArgument("cycle lives on a different grid");
    const std::vector<VortexCore> cores = cycle_to_cores(g, cycle);
    const double lambda = recovery_lambda(g, cycle, eps, opt);
    std::vector<VortexProfile> profiles;
    for (const VortexCore& c : cores) {
        const int K = std::abs(c.degree);
        if (K == 0) continue;
        bool have = false;
        for (const auto& p : profiles) have = have || p.k() == K;
        if (!have) profiles.push_back(solve_profile(K));
    }
    SynthesisOptions so;
    so.lambda = lambda;
    return synthesize_cores(std::move(lattice), eps, cores, profiles, so);
}

}  // namespace ymh
