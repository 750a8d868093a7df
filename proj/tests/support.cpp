#include "support.hpp"

#include <algorithm>
#include <cmath>

namespace ymh::testing {

LatticeHandle grid2(int N, double L, int flux) {
    const int dims[2] = {N, N};
    const double lengths[2] = {L, L};
    const double f[1] = {static_cast<double>(flux)};
    return make_grid(2, dims, lengths, f);
}

LatticeHandle grid3(int N, double L, std::array<int, 3> flux) {
    const int dims[3] = {N, N, N};
    const double lengths[3] = {L, L, L};
    const double f[3] = {double(flux[0]), double(flux[1]), double(flux[2])};
    return make_grid(3, dims, lengths, f);
}

FormField random_form(const Grid& g, int degree, std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> U(-scale, scale);
    FormField f(g, degree);
    for (double& v : f.values()) v = U(rng);
    return f;
}

FormField smooth_form(const Grid& g, int degree, std::mt19937_64& rng, double scale, int modes) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    FormField f(g, degree);
    for (int c = 0; c < f.components(); ++c) {
        auto comp = f.component(c);
        for (int m = 0; m < modes; ++m) {
            Index3 k{0, 0, 0};
            for (int a = 0; a < g.n(); ++a) k[a] = static_cast<int>(std::lround(2.0 * U(rng)));
            const double amp = scale * U(rng), ph = kPi * U(rng);
            for (std::size_t x = 0; x < g.sites(); ++x) {
                double arg = ph;
                for (int a = 0; a < g.n(); ++a) arg += kTwoPi * k[a] * g.position(x, a) / g.length(a);
                comp[x] += amp * std::sin(arg);
            }
        }
    }
    return f;
}

PairState random_pair(LatticeHandle lat, double eps, std::mt19937_64& rng, double alpha_scale) {
    PairState p = make_pair(lat, eps);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (auto& v : p.u.values) v = std::polar(U(rng), kTwoPi * U(rng));
    p.alpha = random_form(p.grid(), 1, rng, alpha_scale);
    return p;
}

double rel_diff(double a, double b) {
    const double s = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return a.size() == b.size() ? m : INFINITY;
}

namespace {

double match(std::vector<std::pair<int, Index3>>& pts, std::size_t from, const Grid& g) {
    while (from < pts.size() && pts[from].first == 0) ++from;
    if (from == pts.size()) return 0.0;
    const auto p = pts[from];
    pts[from].first = 0;
    double best = 1.0 + match(pts, from + 1, g);
    for (std::size_t q = from + 1; q < pts.size(); ++q) {
        if (pts[q].first != -p.first) continue;
        double d = 0.0;
        for (int a = 0; a < g.n(); ++a) {
            const int diff = std::abs(p.second[a] - pts[q].second[a]);
            d += std::min(diff, g.dim(a) - diff) * g.spacing(a);
        }
        if (d >= 2.0) continue;
        const int keep = pts[q].first;
        pts[q].first = 0;
        best = std::min(best, d + match(pts, from + 1, g));
        pts[q].first = keep;
    }
    pts[from].first = p.first;
    return best;
}

}  // namespace

double flat0_bruteforce(const CubicalCurrent& R) {
    std::vector<std::pair<int, Index3>> pts;
    for (const auto& [c, m] : R.cells())
        for (long t = 0; t < std::abs(m); ++t) pts.emplace_back(m > 0 ? 1 : -1, c.base);
    return match(pts, 0, R.grid());
}

CubicalCurrent random_points(LatticeHandle lat, std::mt19937_64& rng, int max_mass) {
    const Grid& g = lat->grid;
    CubicalCurrent T(lat, 0);
    std::uniform_int_distribution<int> count(0, max_mass);
    std::uniform_int_distribution<std::size_t> site(0, g.sites() - 1);
    std::uniform_int_distribution<int> sign(0, 1);
    const int k = count(rng);
    for (int i = 0; i < k; ++i) T.add(Cell{g.coords(site(rng)), 0u}, sign(rng) ? 1 : -1);
    return T;
}

}  // namespace ymh::testing
