#include "ymh/hodge.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace ymh {

namespace {

struct FftwBuffer {
    fftw_complex* data = nullptr;
    explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
        if (!data) throw NumericError("FFTW allocation failed");
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// Plans are created once per shape and only executed afterwards through the
// new-array interface, which FFTW allows from any thread.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [dims, p] : plans_) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.backward);
        }
    }

    PlanPair get(int n, const Index3& dims) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, dims);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::size_t total = 1;
        for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(dims[a]);
        FftwBuffer a(total), b(total);
        PlanPair p;
        p.forward = fftw_plan_dft(n, dims.data(), a.data, b.data, FFTW_FORWARD, FFTW_ESTIMATE);
        p.backward = fftw_plan_dft(n, dims.data(), a.data, b.data, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!p.forward || !p.backward) throw NumericError("FFTW planning failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::pair<int, Index3>, PlanPair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

// Symbol values in storage order; the 1-D factors are tabulated per axis.
std::vector<double> symbol_table(const Grid& g) {
    std::array<std::vector<double>, kMaxDim> axis;
    for (int a = 0; a < g.n(); ++a) {
        const int N = g.dim(a);
        const double h = g.spacing(a);
        axis[a].resize(N);
        for (int k = 0; k < N; ++k) {
            const double s = std::sin(kPi * k / N);
            axis[a][k] = 4.0 / (h * h) * s * s;
        }
    }
    std::vector<double> lam(g.sites());
    for (std::size_t x = 0; x < g.sites(); ++x) {
        const Index3 c = g.coords(x);
        double l = 0.0;
        for (int a = 0; a < g.n(); ++a) l += axis[a][c[a]];
        lam[x] = l;
    }
    return lam;
}

void check_form(const Grid& g, const FormField& f, int degree, const char* what) {
    if (f.degree() != degree || f.sites() != g.sites()) {
        throw InvalidArgument(std::string(what) + ": expected a " + std::to_string(degree) + "-form on the grid");
    }
}

}  // namespace

double laplace_symbol(const Grid& g, const Index3& k) {
    double l = 0.0;
    for (int a = 0; a < g.n(); ++a) {
        const double s = std::sin(kPi * k[a] / g.dim(a));
        l += 4.0 / (g.spacing(a) * g.spacing(a)) * s * s;
    }
    return l;
}

void spectral_apply(const Grid& g, std::span<const double> in, std::span<double> out,
                    const std::function<double(double)>& multiplier) {
    const std::size_t S = g.sites();
    if (in.size() != S || out.size() != S) throw InvalidArgument("spectral_apply: size mismatch");
    const PlanPair plans = plan_cache().get(g.n(), g.dims());
    FftwBuffer a(S), b(S);
    for (std::size_t x = 0; x < S; ++x) {
        a.data[x][0] = in[x];
        a.data[x][1] = 0.0;
    }
    fftw_execute_dft(plans.forward, a.data, b.data);
    const std::vector<double> lam = symbol_table(g);
    const double norm = 1.0 / static_cast<double>(S);
    for (std::size_t x = 0; x < S; ++x) {
        const double m = multiplier(lam[x]) * norm;
        b.data[x][0] *= m;
        b.data[x][1] *= m;
    }
    fftw_execute_dft(plans.backward, b.data, a.data);
    for (std::size_t x = 0; x < S; ++x) out[x] = a.data[x][0];
}

FormField poisson_solve(const Grid& g, const FormField& f) {
    check_form(g, f, 0, "poisson_solve");
    std::vector<double> absf(f.values().size());
    for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::abs(f.values()[i]);
    const double V = g.cell_volume();
    const double mean = V * pairwise_sum(f.values());
    const double scale = V * pairwise_sum(absf);
    if (std::abs(mean) > 1e-10 * std::max(scale, 1e-300) && std::abs(mean) > 1e-300) {
        throw InvalidArgument("poisson_solve: right-hand side has nonzero integral " + std::to_string(mean));
    }
    FormField theta(g, 0);
    spectral_apply(g, f.component(0), theta.component(0), [](double lam) { return lam > 0.0 ? 1.0 / lam : 0.0; });
    return theta;
}

FormField hodge_resolvent(const Grid& g, const FormField& f, double tau) {
    if (f.sites() != g.sites()) throw InvalidArgument("hodge_resolvent: form does not live on the grid");
    if (!(tau >= 0.0)) throw InvalidArgument("hodge_resolvent: negative time step");
    FormField out(g, f.degree());
    for (int c = 0; c < f.components(); ++c) {
        spectral_apply(g, f.component(c), out.component(c), [tau](double lam) { return 1.0 / (1.0 + tau * lam); });
    }
    return out;
}

FormField solve_curl(const Grid& g, const FormField& F) {
    check_form(g, F, 2, "solve_curl");
    FormField G(g, 2);
    for (int c = 0; c < F.components(); ++c) {
        const double mean = pairwise_sum(F.component(c)) / static_cast<double>(g.sites());
        const double scale = max_abs(F.component(c));
        if (std::abs(mean) > 1e-10 * std::max(scale, 1.0)) {
            throw InvalidArgument("solve_curl: 2-form component has nonzero mean " + std::to_string(mean));
        }
        spectral_apply(g, F.component(c), G.component(c), [](double lam) { return lam > 0.0 ? 1.0 / lam : 0.0; });
    }
    return d_star(g, G);
}

std::array<double, kMaxDim> harmonic_part(const Grid& g, const FormField& alpha) {
    check_form(g, alpha, 1, "harmonic_part");
    std::array<double, kMaxDim> c{0.0, 0.0, 0.0};
    for (int j = 0; j < g.n(); ++j) c[j] = pairwise_sum(alpha.component(j)) / static_cast<double>(g.sites());
    return c;
}

HodgeSplit hodge_decompose(const Grid& g, const FormField& alpha) {
    check_form(g, alpha, 1, "hodge_decompose");
    HodgeSplit s;
    s.harmonic = FormField(g, 1);
    const auto c = harmonic_part(g, alpha);
    for (int j = 0; j < g.n(); ++j)
        for (double& v : s.harmonic.component(j)) v = c[j];
    FormField div = d_star(g, alpha);
    // d* of a periodic form integrates to zero; remove the rounding residue.
    const double m = pairwise_sum(div.values()) / static_cast<double>(g.sites());
    for (double& v : div.values()) v -= m;
    s.exact = d(g, poisson_solve(g, div));
    s.coexact = alpha - s.exact - s.harmonic;
    return s;
}

FormField q_operator(const Grid& g, const FormField& lambda) {
    check_form(g, lambda, 1, "q_operator");
    FormField div = d_star(g, lambda);
    const double m = pairwise_sum(div.values()) / static_cast<double>(g.sites());
    for (double& v : div.values()) v -= m;
    FormField q = poisson_solve(g, div);
    q *= -1.0;
    return q;
}

FormField p_project(const Grid& g, const FormField& lambda) { return lambda + d(g, q_operator(g, lambda)); }

PairState coulomb_project(const PairState& pair) {
    validate(pair);
    return gauge_transform(pair, q_operator(pair.grid(), pair.alpha));
}

PairState normalize_gauge(const PairState& pair) {
    PairState p = coulomb_project(pair);
    const Grid& g = p.grid();
    const auto c = harmonic_part(g, p.alpha);
    Index3 wind{0, 0, 0};
    for (int j = 0; j < g.n(); ++j) {
        const double t = g.length(j) * c[j] / kTwoPi;
        wind[j] = -static_cast<int>(std::ceil(t - 0.5));
    }
    if (wind == Index3{0, 0, 0}) return p;
    return gauge_transform(p, FormField(g, 0), wind);
}

}  // namespace ymh
