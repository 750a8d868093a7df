#include "ymh/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ymh/kernels.hpp"

namespace ymh {

Grid::Grid(int n, Index3 dims, std::array<double, kMaxDim> lengths, FluxMatrix flux)
    : n_(n), dims_(dims), lengths_(lengths), flux_(flux) {
    if (n != 2 && n != 3) throw InvalidArgument("grid dimension must be 2 or 3, got " + std::to_string(n));
    for (int a = 0; a < kMaxDim; ++a) {
        if (a >= n) {
            dims_[a] = 1;
            lengths_[a] = 1.0;
            continue;
        }
        if (dims_[a] < 4) {
            throw InvalidArgument("grid axis " + std::to_string(a) + " needs at least 4 sites, got " +
                                  std::to_string(dims_[a]));
        }
        if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a])) {
            throw InvalidArgument("grid axis " + std::to_string(a) + " has non-positive length");
        }
    }
    for (int j = 0; j < kMaxDim; ++j) {
        for (int k = 0; k < kMaxDim; ++k) {
            if (flux_[j][k] != -flux_[k][j]) throw InvalidArgument("flux matrix must be antisymmetric");
            if ((j >= n || k >= n) && flux_[j][k] != 0) {
                throw InvalidArgument("flux entry outside the grid dimension");
            }
        }
    }
    cell_volume_ = 1.0;
    sites_ = 1;
    for (int a = 0; a < n; ++a) {
        spacing_[a] = lengths_[a] / dims_[a];
        cell_volume_ *= spacing_[a];
        sites_ *= static_cast<std::size_t>(dims_[a]);
    }
    strides_[2] = 1;
    strides_[1] = static_cast<std::size_t>(dims_[2]);
    strides_[0] = strides_[1] * static_cast<std::size_t>(dims_[1]);
}

double Grid::min_spacing() const {
    double m = spacing_[0];
    for (int a = 1; a < n_; ++a) m = std::min(m, spacing_[a]);
    return m;
}

double Grid::min_length() const {
    double m = lengths_[0];
    for (int a = 1; a < n_; ++a) m = std::min(m, lengths_[a]);
    return m;
}

double Grid::volume() const {
    double v = 1.0;
    for (int a = 0; a < n_; ++a) v *= lengths_[a];
    return v;
}

Plane Grid::plane(int p) const {
    static constexpr Plane planes[3] = {{0, 1}, {0, 2}, {1, 2}};
    return planes[p];
}

int Grid::plane_index(int j, int k) const {
    if (j > k) std::swap(j, k);
    if (j == 0 && k == 1) return 0;
    if (j == 0 && k == 2) return 1;
    return 2;
}

int Grid::components(int degree) const {
    switch (degree) {
        case 0:
            return 1;
        case 1:
            return n_;
        case 2:
            return plane_count();
        case 3:
            if (n_ == 3) return 1;
            break;
        default:
            break;
    }
    throw InvalidArgument("no " + std::to_string(degree) + "-cells on a " + std::to_string(n_) +
                          "-dimensional grid");
}

Index3 Grid::coords(std::size_t idx) const {
    Index3 c{0, 0, 0};
    for (int a = 0; a < n_; ++a) {
        c[a] = static_cast<int>((idx / strides_[a]) % static_cast<std::size_t>(dims_[a]));
    }
    return c;
}

std::size_t Grid::index(const Index3& c) const {
    std::size_t idx = 0;
    for (int a = 0; a < n_; ++a) {
        int v = c[a] % dims_[a];
        if (v < 0) v += dims_[a];
        idx += static_cast<std::size_t>(v) * strides_[a];
    }
    return idx;
}

std::size_t Grid::neighbor(std::size_t idx, int axis, int step) const {
    const int N = dims_[axis];
    const std::size_t s = strides_[axis];
    const int c = static_cast<int>((idx / s) % static_cast<std::size_t>(N));
    const int cn = ((c + step) % N + N) % N;
    return idx - static_cast<std::size_t>(c) * s + static_cast<std::size_t>(cn) * s;
}

bool Grid::same_shape(const Grid& o) const {
    return n_ == o.n_ && dims_ == o.dims_ && lengths_ == o.lengths_ && flux_ == o.flux_;
}

// ---------------------------------------------------------------------------

FormField::FormField(const Grid& grid, int degree)
    : degree_(degree),
      components_(grid.components(degree)),
      sites_(grid.sites()),
      values_(static_cast<std::size_t>(components_) * sites_, 0.0) {}

namespace {

void check_same(const FormField& a, const FormField& b) {
    if (a.degree() != b.degree() || a.values().size() != b.values().size()) {
        throw InvalidArgument("form degree or shape mismatch");
    }
}

}  // namespace

FormField& FormField::operator+=(const FormField& o) {
    check_same(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

FormField& FormField::operator-=(const FormField& o) {
    check_same(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

FormField& FormField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

FormField operator+(FormField a, const FormField& b) { return a += b; }
FormField operator-(FormField a, const FormField& b) { return a -= b; }
FormField operator*(double s, FormField a) { return a *= s; }

// ---------------------------------------------------------------------------

LatticeHandle make_grid(int n, std::span<const int> dims, std::span<const double> lengths,
                        std::span<const double> flux_upper) {
    if (n != 2 && n != 3) throw InvalidArgument("grid dimension must be 2 or 3");
    if (dims.size() != static_cast<std::size_t>(n) || lengths.size() != static_cast<std::size_t>(n)) {
        throw InvalidArgument("dims and lengths must have one entry per axis");
    }
    const std::size_t planes = n == 2 ? 1 : 3;
    if (flux_upper.size() != planes) {
        throw InvalidArgument("flux needs " + std::to_string(planes) + " upper-triangle entries");
    }
    static constexpr Plane order[3] = {{0, 1}, {0, 2}, {1, 2}};
    FluxMatrix flux{};
    for (std::size_t p = 0; p < planes; ++p) {
        const double m = flux_upper[p];
        if (!std::isfinite(m) || m != std::round(m) || std::abs(m) > 1e6) {
            throw InvalidArgument("flux entries must be integers, got " + std::to_string(m));
        }
        flux[order[p].j][order[p].k] = static_cast<int>(m);
        flux[order[p].k][order[p].j] = -static_cast<int>(m);
    }
    Index3 d3{1, 1, 1};
    std::array<double, kMaxDim> l3{1.0, 1.0, 1.0};
    for (int a = 0; a < n; ++a) {
        d3[a] = dims[a];
        l3[a] = lengths[a];
    }

    auto lat = std::make_shared<Lattice>();
    lat->grid = Grid(n, d3, l3, flux);
    const Grid& g = lat->grid;
    const std::size_t S = g.sites();

    for (int a = 0; a < n; ++a) lat->background.link_phase.comp[a].assign(S, cplx(1.0, 0.0));
    lat->background.curvature = FormField(g, 2);

    // Landau gauge per plane: k-links carry exp(-i h_k B x_j); the j-links
    // leaving the last slice in direction j carry the compensating transition
    // function exp(+2 pi i m idx_k / N_k). Every plaquette then has holonomy
    // exp(-i h_j h_k B), including the seam.
    for (int p = 0; p < g.plane_count(); ++p) {
        const auto [j, k] = g.plane(p);
        const int m = g.flux(j, k);
        const double B = kTwoPi * m / (g.length(j) * g.length(k));
        auto curv = lat->background.curvature.component(p);
        std::fill(curv.begin(), curv.end(), B);
        if (m == 0) continue;
        auto& Lj = lat->background.link_phase.comp[j];
        auto& Lk = lat->background.link_phase.comp[k];
        for (std::size_t x = 0; x < S; ++x) {
            const Index3 c = g.coords(x);
            Lk[x] *= std::polar(1.0, -g.spacing(k) * B * (c[j] * g.spacing(j)));
            if (c[j] == g.dim(j) - 1) {
                Lj[x] *= std::polar(1.0, kTwoPi * m * static_cast<double>(c[k]) / g.dim(k));
            }
        }
    }
    return lat;
}

double inner(const Grid& grid, const FormField& a, const FormField& b) {
    check_same(a, b);
    std::vector<double> prod(a.values().size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a.values()[i] * b.values()[i];
    return grid.cell_volume() * pairwise_sum(prod);
}

namespace {

// out += s * (f(x + e_axis) - f(x)) / h_axis
void add_forward(const Grid& g, std::span<const double> f, int axis, double s, std::span<double> out,
                 std::vector<double>& tmp) {
    tmp.resize(f.size());
    g.shift<double>(f, axis, +1, tmp);
    const double w = s / g.spacing(axis);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] += w * (tmp[i] - f[i]);
}

// out += s * (f(x) - f(x - e_axis)) / h_axis
void add_backward(const Grid& g, std::span<const double> f, int axis, double s, std::span<double> out,
                  std::vector<double>& tmp) {
    tmp.resize(f.size());
    g.shift<double>(f, axis, -1, tmp);
    const double w = s / g.spacing(axis);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] += w * (f[i] - tmp[i]);
}

}  // namespace

FormField d(const Grid& g, const FormField& f) {
    if (f.sites() != g.sites()) throw InvalidArgument("form does not live on this grid");
    const int deg = f.degree();
    if (deg < 0 || deg > 2 || (deg == 2 && g.n() == 2)) {
        throw InvalidArgument("d is undefined on " + std::to_string(deg) + "-forms in dimension " +
                              std::to_string(g.n()));
    }
    FormField out(g, deg + 1);
    std::vector<double> tmp;
    if (deg == 0) {
        for (int j = 0; j < g.n(); ++j) add_forward(g, f.component(0), j, 1.0, out.component(j), tmp);
    } else if (deg == 1) {
        for (int p = 0; p < g.plane_count(); ++p) {
            const auto [j, k] = g.plane(p);
            add_forward(g, f.component(k), j, 1.0, out.component(p), tmp);
            add_forward(g, f.component(j), k, -1.0, out.component(p), tmp);
        }
    } else {
        // (dF)_{012} = D_0 F_12 - D_1 F_02 + D_2 F_01
        add_forward(g, f.component(2), 0, 1.0, out.component(0), tmp);
        add_forward(g, f.component(1), 1, -1.0, out.component(0), tmp);
        add_forward(g, f.component(0), 2, 1.0, out.component(0), tmp);
    }
    return out;
}

FormField d_star(const Grid& g, const FormField& f) {
    if (f.sites() != g.sites()) throw InvalidArgument("form does not live on this grid");
    const int deg = f.degree();
    if (deg < 1 || deg > 3 || (deg == 3 && g.n() == 2)) {
        throw InvalidArgument("d* is undefined on " + std::to_string(deg) + "-forms in dimension " +
                              std::to_string(g.n()));
    }
    FormField out(g, deg - 1);
    std::vector<double> tmp;
    if (deg == 1) {
        for (int j = 0; j < g.n(); ++j) add_backward(g, f.component(j), j, -1.0, out.component(0), tmp);
    } else if (deg == 2) {
        for (int p = 0; p < g.plane_count(); ++p) {
            const auto [j, k] = g.plane(p);
            add_backward(g, f.component(p), j, -1.0, out.component(k), tmp);
            add_backward(g, f.component(p), k, 1.0, out.component(j), tmp);
        }
    } else {
        add_backward(g, f.component(0), 0, -1.0, out.component(2), tmp);
        add_backward(g, f.component(0), 1, 1.0, out.component(1), tmp);
        add_backward(g, f.component(0), 2, -1.0, out.component(0), tmp);
    }
    return out;
}

double slice_flux(const Grid& g, const FormField& F, int j, int k, const Index3& slice) {
    if (F.degree() != 2) throw InvalidArgument("slice_flux needs a 2-form");
    if (j == k || j < 0 || k < 0 || j >= g.n() || k >= g.n()) throw InvalidArgument("bad plane");
    double sign = 1.0;
    if (j > k) {
        std::swap(j, k);
        sign = -1.0;
    }
    const auto comp = F.component(g.plane_index(j, k));
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(g.dim(j)) * g.dim(k));
    Index3 c = slice;
    for (int a = 0; a < g.dim(j); ++a) {
        for (int b = 0; b < g.dim(k); ++b) {
            c[j] = a;
            c[k] = b;
            vals.push_back(comp[g.index(c)]);
        }
    }
    return sign * pairwise_sum(vals) * g.spacing(j) * g.spacing(k);
}

LinkField link_transport(const Lattice& lat, const FormField& alpha) {
    const Grid& g = lat.grid;
    if (alpha.degree() != 1 || alpha.sites() != g.sites()) throw InvalidArgument("alpha must be a 1-form on the grid");
    LinkField U;
    for (int j = 0; j < g.n(); ++j) {
        const auto a = alpha.component(j);
        const auto& L = lat.background.link_phase.comp[j];
        const double h = g.spacing(j);
        auto& out = U.comp[j];
        out.resize(g.sites());
        for (std::size_t x = 0; x < g.sites(); ++x) {
            const double phi = -h * a[x];
            const cplx e(std::cos(phi), std::sin(phi));
            out[x] = L[x] * e;
        }
    }
    return U;
}

LinkField covariant_diff(const Lattice& lat, const ScalarField& u, const FormField& alpha) {
    const Grid& g = lat.grid;
    if (u.size() != g.sites()) throw InvalidArgument("u does not live on this grid");
    const LinkField U = link_transport(lat, alpha);
    LinkField D;
    std::vector<cplx> up(g.sites());
    const auto& K = kernels::active();
    for (int j = 0; j < g.n(); ++j) {
        g.shift<cplx>(u.values, j, +1, up);
        D.comp[j].resize(g.sites());
        K.link_terms(u.values.data(), up.data(), U.comp[j].data(), 1.0 / g.spacing(j), D.comp[j].data(), nullptr,
                     nullptr, g.sites());
    }
    return D;
}

void covariant_laplacian(const Grid& g, const LinkField& U, const ScalarField& u, ScalarField& out) {
    const std::size_t S = g.sites();
    out.values.assign(S, cplx(0.0, 0.0));
    std::vector<cplx> nb(S), Ub(S);
    const auto& K = kernels::active();
    for (int j = 0; j < g.n(); ++j) {
        const double s = 1.0 / (g.spacing(j) * g.spacing(j));
        g.shift<cplx>(u.values, j, +1, nb);
        K.hop_accumulate(u.values.data(), nb.data(), U.comp[j].data(), s, false, out.values.data(), S);
        g.shift<cplx>(u.values, j, -1, nb);
        g.shift<cplx>(U.comp[j], j, -1, Ub);
        K.hop_accumulate(u.values.data(), nb.data(), Ub.data(), s, true, out.values.data(), S);
    }
}

// ---------------------------------------------------------------------------

PairState make_pair(LatticeHandle lattice, double eps, cplx fill) {
    if (!lattice) throw InvalidArgument("pair needs a lattice");
    PairState p;
    p.u = ScalarField(lattice->grid.sites(), fill);
    p.alpha = FormField(lattice->grid, 1);
    p.eps = eps;
    p.lattice = std::move(lattice);
    validate(p);
    return p;
}

void validate(const PairState& p) {
    if (!p.lattice) throw InvalidArgument("pair has no lattice");
    if (!(p.eps > 0.0 && p.eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1], got " + std::to_string(p.eps));
    const Grid& g = p.grid();
    if (p.u.size() != g.sites()) throw InvalidArgument("u does not live on the pair's grid");
    if (p.alpha.degree() != 1 || p.alpha.sites() != g.sites() || p.alpha.components() != g.n()) {
        throw InvalidArgument("alpha does not live on the pair's grid");
    }
}

double max_abs_u(const PairState& p) { return max_abs(std::span<const cplx>(p.u.values)); }

PairState gauge_transform(const PairState& pair, const FormField& theta, const Index3& winding) {
    validate(pair);
    const Grid& g = pair.grid();
    if (theta.degree() != 0 || theta.sites() != g.sites()) throw InvalidArgument("theta must be a 0-form on the grid");
    PairState out = pair;
    const auto th = theta.component(0);
    for (std::size_t x = 0; x < g.sites(); ++x) {
        double phase = th[x];
        const Index3 c = g.coords(x);
        for (int a = 0; a < g.n(); ++a) {
            if (winding[a] != 0) phase += kTwoPi * winding[a] * static_cast<double>(c[a]) / g.dim(a);
        }
        out.u[x] = pair.u[x] * cplx(std::cos(phase), std::sin(phase));
    }
    out.alpha += d(g, theta);
    for (int a = 0; a < g.n(); ++a) {
        if (winding[a] == 0) continue;
        const double shift = kTwoPi * winding[a] / g.length(a);
        for (double& v : out.alpha.component(a)) v += shift;
    }
    return out;
}

}  // namespace ymh
