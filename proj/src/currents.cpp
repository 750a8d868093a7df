#include "ymh/currents.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "ymh/hodge.hpp"

namespace ymh {

namespace {

std::vector<unsigned> axis_masks(int n, int d) {
    std::vector<unsigned> out;
    for (unsigned m = 0; m < (1u << n); ++m)
        if (__builtin_popcount(m) == d) out.push_back(m);
    return out;
}

std::vector<int> axes_of(unsigned mask) {
    std::vector<int> a;
    for (int i = 0; i < kMaxDim; ++i)
        if (mask & (1u << i)) a.push_back(i);
    return a;
}

Index3 wrap(const Grid& g, Index3 b) {
    for (int a = 0; a < kMaxDim; ++a) {
        const int N = g.dim(a);
        b[a] = ((b[a] % N) + N) % N;
    }
    return b;
}

// Enumerates all cells of one dimension with a dense index.
struct CellIndex {
    const Grid* g;
    std::vector<unsigned> masks;
    std::size_t S;

    CellIndex(const Grid& grid, int d) : g(&grid), masks(axis_masks(grid.n(), d)), S(grid.sites()) {}
    std::size_t size() const { return masks.size() * S; }
    std::size_t of(const Cell& c) const {
        const auto it = std::find(masks.begin(), masks.end(), c.axes);
        return static_cast<std::size_t>(it - masks.begin()) * S + g->index(c.base);
    }
    Cell at(std::size_t i) const { return Cell{g->coords(i % S), masks[i / S]}; }
};

// Faces of a cell with their boundary signs.
template <typename F>
void for_each_face(const Grid& g, const Cell& c, F&& f) {
    const std::vector<int> ax = axes_of(c.axes);
    for (std::size_t i = 0; i < ax.size(); ++i) {
        const long s = (i % 2 == 0) ? 1 : -1;
        const unsigned fa = c.axes & ~(1u << ax[i]);
        Index3 up = c.base;
        up[ax[i]] += 1;
        f(Cell{wrap(g, up), fa}, s);
        f(Cell{c.base, fa}, -s);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// CubicalCurrent

CubicalCurrent::CubicalCurrent(LatticeHandle lattice, int dim, bool dual)
    : lattice_(std::move(lattice)), dim_(dim), dual_(dual) {
    if (!lattice_) throw InvalidArgument("current needs a lattice");
    if (dim < 0 || dim > lattice_->grid.n()) throw InvalidArgument("current dimension out of range");
}

Cell CubicalCurrent::canonical(Cell c) const {
    const Grid& g = grid();
    if (c.axes >> g.n()) throw InvalidArgument("cell spans an axis beyond the grid dimension");
    if (c.dim() != dim_) throw InvalidArgument("cell dimension does not match the current");
    return Cell{wrap(g, c.base), c.axes};
}

void CubicalCurrent::add(Cell c, long m) {
    if (m == 0) return;
    c = canonical(c);
    auto it = cells_.find(c);
    if (it == cells_.end()) {
        cells_.emplace(c, m);
    } else if ((it->second += m) == 0) {
        cells_.erase(it);
    }
}

long CubicalCurrent::multiplicity(Cell c) const {
    auto it = cells_.find(canonical(c));
    return it == cells_.end() ? 0 : it->second;
}

void CubicalCurrent::check_compatible(const CubicalCurrent& o) const {
    if (!lattice_ || !o.lattice_) throw InvalidArgument("current without a lattice");
    if (!grid().same_shape(o.grid()) || dim_ != o.dim_ || dual_ != o.dual_) {
        throw InvalidArgument("currents live on different complexes");
    }
}

CubicalCurrent& CubicalCurrent::operator+=(const CubicalCurrent& o) {
    check_compatible(o);
    for (const auto& [c, m] : o.cells_) add(c, m);
    return *this;
}

CubicalCurrent& CubicalCurrent::operator-=(const CubicalCurrent& o) {
    check_compatible(o);
    for (const auto& [c, m] : o.cells_) add(c, -m);
    return *this;
}

CubicalCurrent CubicalCurrent::operator-() const {
    CubicalCurrent r = *this;
    for (auto& [c, m] : r.cells_) m = -m;
    return r;
}

bool CubicalCurrent::operator==(const CubicalCurrent& o) const {
    return dim_ == o.dim_ && dual_ == o.dual_ && cells_ == o.cells_;
}

std::string CubicalCurrent::to_csv() const {
    std::ostringstream os;
    os << "i0,i1,i2,axes,multiplicity\n";
    for (const auto& [c, m] : cells_) {
        os << c.base[0] << ',' << c.base[1] << ',' << c.base[2] << ',';
        const auto ax = axes_of(c.axes);
        if (ax.empty()) os << '-';
        for (int a : ax) os << a;
        os << ',' << m << '\n';
    }
    return os.str();
}

CubicalCurrent operator+(CubicalCurrent a, const CubicalCurrent& b) { return a += b; }
CubicalCurrent operator-(CubicalCurrent a, const CubicalCurrent& b) { return a -= b; }

double cell_measure(const Grid& g, const Cell& c) {
    double m = 1.0;
    for (int a : axes_of(c.axes)) m *= g.spacing(a);
    return m;
}

double mass(const CubicalCurrent& T) {
    if (T.empty()) return 0.0;
    std::vector<double> parts;
    parts.reserve(T.cells().size());
    for (const auto& [c, m] : T.cells()) parts.push_back(std::abs(double(m)) * cell_measure(T.grid(), c));
    return pairwise_sum(parts);
}

CubicalCurrent boundary(const CubicalCurrent& T) {
    if (T.dim() == 0) throw InvalidArgument("boundary of a 0-current");
    CubicalCurrent b(T.lattice(), T.dim() - 1, T.dual());
    for (const auto& [c, m] : T.cells()) for_each_face(T.grid(), c, [&](Cell f, long s) { b.add(f, s * m); });
    return b;
}

CubicalCurrent axis_loop(LatticeHandle lattice, int axis, const Index3& through, long m, bool dual) {
    const Grid& g = lattice->grid;
    if (axis < 0 || axis >= g.n()) throw InvalidArgument("axis_loop: bad axis");
    CubicalCurrent T(lattice, 1, dual);
    for (int t = 0; t < g.dim(axis); ++t) {
        Index3 b = through;
        b[axis] = t;
        T.add(Cell{b, 1u << axis}, m);
    }
    return T;
}

// ---------------------------------------------------------------------------
// Flat norm

namespace {

struct MinCostFlow {
    struct Arc {
        int to;
        long cap;
        double cost;
    };
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> adj;

    explicit MinCostFlow(int nodes) : adj(nodes) {}

    int add(int u, int v, long cap, double cost) {
        adj[u].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({v, cap, cost});
        adj[v].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({u, 0, -cost});
        return static_cast<int>(arcs.size()) - 2;
    }
    long flow(int arc) const { return arcs[arc ^ 1].cap; }

    long run(int s, int t) {
        const int V = static_cast<int>(adj.size());
        long total = 0;
        std::vector<double> dist(V);
        std::vector<int> via(V);
        std::vector<char> queued(V);
        for (;;) {
            std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
            std::fill(via.begin(), via.end(), -1);
            std::deque<int> q{s};
            dist[s] = 0.0;
            queued[s] = 1;
            while (!q.empty()) {
                const int u = q.front();
                q.pop_front();
                queued[u] = 0;
                for (int id : adj[u]) {
                    const Arc& a = arcs[id];
                    if (a.cap <= 0) continue;
                    if (dist[u] + a.cost < dist[a.to] - 1e-12) {
                        dist[a.to] = dist[u] + a.cost;
                        via[a.to] = id;
                        if (!queued[a.to]) {
                            queued[a.to] = 1;
                            q.push_back(a.to);
                        }
                    }
                }
            }
            if (via[t] < 0) break;
            long push = std::numeric_limits<long>::max();
            for (int v = t; v != s; v = arcs[via[v] ^ 1].to) push = std::min(push, arcs[via[v]].cap);
            for (int v = t; v != s; v = arcs[via[v] ^ 1].to) {
                arcs[via[v]].cap -= push;
                arcs[via[v] ^ 1].cap += push;
            }
            total += push;
        }
        return total;
    }
};

FlatNormResult flat_norm_flow(const CubicalCurrent& R, const FlatNormOptions& opt) {
    const Grid& g = R.grid();
    const int S = static_cast<int>(g.sites());
    const int z = S, s = S + 1, t = S + 2;
    constexpr long inf = std::numeric_limits<long>::max() / 4;
    MinCostFlow mcf(S + 3);
    long net = 0, need = 0;
    for (const auto& [c, m] : R.cells()) {
        const int v = static_cast<int>(g.index(c.base));
        if (m > 0) {
            mcf.add(v, t, m, 0.0);
            need += m;
        } else {
            mcf.add(s, v, -m, 0.0);
        }
        net += m;
    }
    if (opt.fill_in && net != 0) throw InvalidArgument("flat_norm: fill-in requested for a difference with nonzero degree");
    std::vector<int> zin(S, -1), zout(S, -1);
    if (!opt.fill_in) {
        if (net > 0) mcf.add(s, z, net, 0.0);
        if (net < 0) {
            mcf.add(z, t, -net, 0.0);
            need += -net;
        }
        for (int v = 0; v < S; ++v) {
            zin[v] = mcf.add(z, v, inf, 1.0);
            zout[v] = mcf.add(v, z, inf, 1.0);
        }
    }
    std::vector<std::array<int, 2>> edge(static_cast<std::size_t>(S) * g.n());
    for (int v = 0; v < S; ++v) {
        for (int a = 0; a < g.n(); ++a) {
            const int w = static_cast<int>(g.neighbor(v, a, 1));
            edge[v * g.n() + a] = {mcf.add(v, w, inf, g.spacing(a)), mcf.add(w, v, inf, g.spacing(a))};
        }
    }
    if (mcf.run(s, t) != need) throw NumericError("flat_norm: flow did not saturate the demands");

    FlatNormResult r;
    r.method = "min-cost-flow";
    r.P = CubicalCurrent(R.lattice(), 0, R.dual());
    r.Q = CubicalCurrent(R.lattice(), 1, R.dual());
    for (int v = 0; v < S; ++v) {
        if (!opt.fill_in) r.P.add(Cell{g.coords(v), 0u}, mcf.flow(zin[v]) - mcf.flow(zout[v]));
        for (int a = 0; a < g.n(); ++a) {
            const auto [fw, bw] = edge[v * g.n() + a];
            r.Q.add(Cell{g.coords(v), 1u << a}, mcf.flow(fw) - mcf.flow(bw));
        }
    }
    r.value = mass(r.P) + mass(r.Q);
    return r;
}

// Dense primal simplex: minimize c x subject to A x = b, x >= 0.
class Simplex {
public:
    Simplex(std::size_t m, std::size_t n) : m_(m), n_(n), w_(n + 1), T_((m + 1) * (n + 1), 0.0), basis_(m, -1) {}

    double& a(std::size_t i, std::size_t j) { return T_[i * w_ + j]; }
    double& rhs(std::size_t i) { return T_[i * w_ + n_]; }
    void set_basis(std::size_t i, std::size_t j) { basis_[i] = static_cast<long>(j); }

    // Requires every row to have its basic column as a unit column and b >= 0.
    void optimize(const std::vector<double>& cost, const std::vector<char>& banned) {
        double* z = &T_[m_ * w_];
        for (std::size_t j = 0; j <= n_; ++j) z[j] = j < n_ ? cost[j] : 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = &T_[i * w_];
            for (std::size_t j = 0; j <= n_; ++j) z[j] -= cb * row[j];
        }
        bool bland = false;
        int degenerate = 0;
        for (long iter = 0;; ++iter) {
            if (iter > 200000) throw NumericError("flat_norm: simplex iteration limit");
            long e = -1;
            double best = -1e-10;
            for (std::size_t j = 0; j < n_; ++j) {
                if (banned[j] || z[j] >= -1e-10) continue;
                if (bland) {
                    e = static_cast<long>(j);
                    break;
                }
                if (z[j] < best) {
                    best = z[j];
                    e = static_cast<long>(j);
                }
            }
            if (e < 0) return;
            long r = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double v = a(i, e);
                if (v <= 1e-10) continue;
                const double q = rhs(i) / v;
                if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && r >= 0 && basis_[i] < basis_[r])) {
                    ratio = std::min(ratio, q);
                    r = static_cast<long>(i);
                }
            }
            if (r < 0) throw NumericError("flat_norm: linear program is unbounded");
            if (ratio < 1e-12) {
                if (++degenerate > 50) bland = true;
            } else {
                degenerate = 0;
            }
            pivot(r, e);
        }
    }

    void pivot(std::size_t r, std::size_t e) {
        double* pr = &T_[r * w_];
        const double inv = 1.0 / pr[e];
        nz_.clear();
        for (std::size_t j = 0; j <= n_; ++j) {
            if (pr[j] == 0.0) continue;
            pr[j] *= inv;
            nz_.push_back(j);
        }
        pr[e] = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* row = &T_[i * w_];
            const double f = row[e];
            if (f == 0.0) continue;
            for (std::size_t j : nz_) row[j] -= f * pr[j];
            row[e] = 0.0;
        }
        basis_[r] = static_cast<long>(e);
    }

    std::vector<double> solution() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = T_[i * w_ + n_];
        return x;
    }
    long basic(std::size_t i) const { return basis_[i]; }
    std::size_t rows() const { return m_; }

private:
    std::size_t m_, n_, w_;
    std::vector<double> T_;
    std::vector<long> basis_;
    std::vector<std::size_t> nz_;
};

FlatNormResult flat_norm_lp(const CubicalCurrent& R, const FlatNormOptions& opt) {
    const Grid& g = R.grid();
    const int d = R.dim();
    const CellIndex rows(g, d), cols(g, d + 1);
    const std::size_t m = rows.size(), nq = cols.size();
    const std::size_t np = opt.fill_in ? 0 : 2 * m;
    const std::size_t nstruct = np + 2 * nq;
    const std::size_t nart = opt.fill_in ? m : 0;
    const std::size_t N = nstruct + nart;
    if (double(m) * double(N) > 2e7) throw InvalidArgument("flat_norm: grid too large for the dense linear program");

    std::vector<double> b(m, 0.0);
    for (const auto& [c, mult] : R.cells()) b[rows.of(c)] = double(mult);
    std::vector<double> sign(m);
    for (std::size_t i = 0; i < m; ++i) sign[i] = b[i] < 0 ? -1.0 : 1.0;

    Simplex lp(m, N);
    std::vector<double> cost(N, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        lp.rhs(i) = sign[i] * b[i];
        if (!opt.fill_in) {
            const double w = cell_measure(g, rows.at(i));
            lp.a(i, i) = sign[i];
            lp.a(i, m + i) = -sign[i];
            cost[i] = cost[m + i] = w;
            lp.set_basis(i, sign[i] > 0 ? i : m + i);
        } else {
            lp.a(i, nstruct + i) = 1.0;
            lp.set_basis(i, nstruct + i);
        }
    }
    for (std::size_t q = 0; q < nq; ++q) {
        const Cell c = cols.at(q);
        const double w = cell_measure(g, c);
        cost[np + q] = cost[np + nq + q] = w;
        for_each_face(g, c, [&](Cell f, long s) {
            const std::size_t i = rows.of(f);
            lp.a(i, np + q) += sign[i] * s;
            lp.a(i, np + nq + q) -= sign[i] * s;
        });
    }
    std::vector<char> banned(N, 0);
    if (opt.fill_in) {
        std::vector<double> phase1(N, 0.0);
        for (std::size_t j = nstruct; j < N; ++j) phase1[j] = 1.0;
        lp.optimize(phase1, banned);
        const auto x = lp.solution();
        double infeas = 0.0;
        for (std::size_t j = nstruct; j < N; ++j) infeas += x[j];
        if (infeas > 1e-8) throw InvalidArgument("flat_norm: the difference is not a boundary; no fill-in exists");
        for (std::size_t i = 0; i < lp.rows(); ++i) {
            if (lp.basic(i) < static_cast<long>(nstruct)) continue;
            for (std::size_t j = 0; j < nstruct; ++j) {
                if (std::abs(lp.a(i, j)) > 1e-9) {
                    lp.pivot(i, j);
                    break;
                }
            }
        }
        for (std::size_t j = nstruct; j < N; ++j) banned[j] = 1;
    }
    lp.optimize(cost, banned);
    const auto x = lp.solution();

    FlatNormResult r;
    r.method = "simplex";
    r.P = CubicalCurrent(R.lattice(), d, R.dual());
    r.Q = CubicalCurrent(R.lattice(), d + 1, R.dual());
    double value = 0.0;
    auto take = [&](double v, const Cell& c, CubicalCurrent& T) {
        const double rv = std::round(v);
        if (std::abs(v - rv) > opt.integrality_tol) r.integral = false;
        T.add(c, static_cast<long>(rv));
        value += std::abs(v) * cell_measure(g, c);
    };
    if (!opt.fill_in)
        for (std::size_t i = 0; i < m; ++i) take(x[i] - x[m + i], rows.at(i), r.P);
    for (std::size_t q = 0; q < nq; ++q) take(x[np + q] - x[np + nq + q], cols.at(q), r.Q);
    r.value = r.integral ? mass(r.P) + mass(r.Q) : value;
    return r;
}

}  // namespace

FlatNormResult flat_norm(const CubicalCurrent& S, const CubicalCurrent& T, const FlatNormOptions& opt) {
    const CubicalCurrent R = S - T;
    if (R.dim() >= R.grid().n()) throw InvalidArgument("flat_norm: current dimension must be below n");
    if (R.empty()) {
        FlatNormResult r;
        r.P = CubicalCurrent(R.lattice(), R.dim(), R.dual());
        r.Q = CubicalCurrent(R.lattice(), R.dim() + 1, R.dual());
        r.method = R.dim() == 0 && !opt.force_simplex ? "min-cost-flow" : "simplex";
        return r;
    }
    return R.dim() == 0 && !opt.force_simplex ? flat_norm_flow(R, opt) : flat_norm_lp(R, opt);
}

// ---------------------------------------------------------------------------
// Jacobian currents and homology

JacobianCurrent extract_jacobian_current(const PairState& pair, double threshold) {
    validate(pair);
    if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("jacobian current threshold must lie in (0, 1)");
    const Grid& g = pair.grid();
    const int n = g.n();
    const std::size_t S = g.sites();
    const LinkField U = link_transport(*pair.lattice, pair.alpha);
    const FormField omega = curvature(pair);
    JacobianCurrent out;
    out.current = CubicalCurrent(pair.lattice, n - 2, true);
    for (std::size_t x = 0; x < S; ++x)
        if (pair.u[x] == cplx(0.0, 0.0)) out.needs_jitter = true;

    auto inc = [&](int axis, std::size_t x) {
        const std::size_t y = g.neighbor(x, axis, 1);
        return std::arg(std::conj(pair.u[x]) * U.comp[axis][x] * pair.u[y]);
    };
    FormField density(g, 2);
    for (int p = 0; p < g.plane_count(); ++p) {
        const auto [j, k] = g.plane(p);
        const int l = 3 - j - k;
        const long orient = (n == 3 && l == 1) ? -1 : 1;
        const double area = g.spacing(j) * g.spacing(k);
        auto dens = density.component(p);
        auto om = omega.component(p);
        for (std::size_t x = 0; x < S; ++x) {
            const std::size_t xj = g.neighbor(x, j, 1), xk = g.neighbor(x, k, 1);
            const double circ = inc(j, x) + inc(k, xj) - inc(j, xk) - inc(k, x) + area * om[x];
            const long w = std::lround(circ / kTwoPi);
            dens[x] = w / area;
            if (w == 0) continue;
            Index3 b = g.coords(x);
            if (n == 3) {
                b[l] -= 1;
                out.current.add(Cell{b, 1u << l}, orient * w);
            } else {
                out.current.add(Cell{b, 0u}, w);
            }
        }
    }
    FormField diff = jacobian_form(pair);
    diff *= 1.0 / kTwoPi;
    diff -= density;
    // Mean-free per component up to rounding; remove it before inverting d.
    for (int p = 0; p < diff.components(); ++p) {
        auto c = diff.component(p);
        const double mean = pairwise_sum(c) / double(S);
        for (double& v : c) v -= mean;
    }
    const FormField fill = solve_curl(g, diff);
    std::vector<double> absf(fill.values().size());
    for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::abs(fill.values()[i]);
    out.residual = g.cell_volume() * pairwise_sum(absf);
    return out;
}

std::vector<long> homology_class(const CubicalCurrent& T) {
    const Grid& g = T.grid();
    if (T.dim() > 0 && !boundary(T).empty()) throw InvalidArgument("homology_class: current is not a cycle");
    const auto masks = axis_masks(g.n(), T.dim());
    std::vector<long> cls(masks.size(), 0);
    for (const auto& [c, m] : T.cells()) {
        const auto it = std::find(masks.begin(), masks.end(), c.axes);
        bool on = true;
        for (int a : axes_of(c.axes)) on = on && c.base[a] == 0;
        if (on) cls[it - masks.begin()] += m;
    }
    return cls;
}

// ---------------------------------------------------------------------------
// Discrete families

int DiscreteFamily::side() const {
    if (m == 1) return static_cast<int>(values.size());
    const int s = static_cast<int>(std::lround(std::sqrt(double(values.size()))));
    return s;
}

const CubicalCurrent& DiscreteFamily::at(int i, int j) const {
    return values.at(m == 1 ? static_cast<std::size_t>(i) : static_cast<std::size_t>(i) * side() + j);
}

CubicalCurrent& DiscreteFamily::at(int i, int j) {
    return values.at(m == 1 ? static_cast<std::size_t>(i) : static_cast<std::size_t>(i) * side() + j);
}

DiscreteFamily make_family(int m, int level, const CubicalCurrent& fill) {
    if (m != 1 && m != 2) throw InvalidArgument("families have one or two parameters");
    if (level < 0 || level > 8) throw InvalidArgument("family level out of range");
    DiscreteFamily f;
    f.m = m;
    f.level = level;
    int side = 1;
    for (int i = 0; i < level; ++i) side *= 3;
    side += 1;
    f.values.assign(m == 1 ? side : side * side, fill);
    return f;
}

namespace {

template <typename F>
void for_each_edge(const DiscreteFamily& phi, F&& f) {
    const int s = phi.side();
    if (phi.m == 1) {
        for (int i = 0; i + 1 < s; ++i) f(phi.at(i), phi.at(i + 1));
        return;
    }
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) {
            if (i + 1 < s) f(phi.at(i, j), phi.at(i + 1, j));
            if (j + 1 < s) f(phi.at(i, j), phi.at(i, j + 1));
        }
}

CubicalCurrent fill_in(const CubicalCurrent& from, const CubicalCurrent& to) {
    FlatNormOptions o;
    o.fill_in = true;
    return flat_norm(to, from, o).Q;
}

// Length of the part of the segment p + t e_axis, t in [0, h], inside the
// periodic ball of radius r about the origin (positions relative to the centre).
double segment_in_ball(const Grid& g, std::array<double, 3> p, int axis, double h, double r) {
    double perp2 = 0.0;
    for (int a = 0; a < g.n(); ++a) {
        if (a == axis) continue;
        const double L = g.length(a);
        const double v = p[a] - L * std::round(p[a] / L);
        perp2 += v * v;
    }
    if (perp2 >= r * r) return 0.0;
    const double half = std::sqrt(r * r - perp2);
    const double L = g.length(axis);
    const double s0 = p[axis] - L * std::round(p[axis] / L);
    double len = 0.0;
    for (int shift = -1; shift <= 1; ++shift) {
        const double a0 = s0 + shift * L;
        const double lo = std::max(0.0, -half - a0), hi = std::min(h, half - a0);
        if (hi > lo) len += hi - lo;
    }
    return len;
}

}  // namespace

double fineness(const DiscreteFamily& phi) {
    double f = 0.0;
    for_each_edge(phi, [&](const CubicalCurrent& a, const CubicalCurrent& b) { f = std::max(f, flat_norm(a, b).value); });
    return f;
}

double concentration(const DiscreteFamily& phi, double r) {
    double best = 0.0;
    for (const CubicalCurrent& T : phi.values) {
        if (T.empty()) continue;
        const Grid& g = T.grid();
        if (!(r > 0.0 && 2.0 * r < g.min_length())) throw InvalidArgument("concentration: radius out of range");
        if (T.dim() > 1) throw InvalidArgument("concentration is implemented for 0- and 1-currents");
        const double off = T.dual() ? 0.5 : 0.0;
        auto pos = [&](const Index3& b) {
            std::array<double, 3> p{0, 0, 0};
            for (int a = 0; a < g.n(); ++a) p[a] = (b[a] + off) * g.spacing(a);
            return p;
        };
        std::vector<std::array<double, 3>> centres;
        for (const auto& [c, m] : T.cells()) {
            centres.push_back(pos(c.base));
            if (c.dim() == 1) {
                Index3 e = c.base;
                e[__builtin_ctz(c.axes)] += 1;
                centres.push_back(pos(e));
            }
        }
        for (const auto& ctr : centres) {
            double total = 0.0;
            for (const auto& [c, m] : T.cells()) {
                auto p = pos(c.base);
                for (int a = 0; a < 3; ++a) p[a] -= ctr[a];
                if (c.dim() == 0) {
                    double d2 = 0.0;
                    for (int a = 0; a < g.n(); ++a) {
                        const double v = p[a] - g.length(a) * std::round(p[a] / g.length(a));
                        d2 += v * v;
                    }
                    if (d2 <= r * r) total += std::abs(double(m));
                } else {
                    const int ax = __builtin_ctz(c.axes);
                    total += std::abs(double(m)) * segment_in_ball(g, p, ax, g.spacing(ax), r);
                }
            }
            best = std::max(best, total);
        }
    }
    return best;
}

std::vector<long> almgren_class(const DiscreteFamily& phi, const AlmgrenOptions& opt) {
    if (phi.values.empty()) throw InvalidArgument("almgren_class: empty family");
    const Grid& g = phi.values.front().grid();
    const double cap = opt.max_fineness > 0.0 ? opt.max_fineness : g.min_length() / 4.0;
    const double f = fineness(phi);
    if (f > cap) {
        throw InvalidArgument("almgren_class: fineness " + std::to_string(f) + " exceeds the fill-in threshold " +
                              std::to_string(cap));
    }
    const int s = phi.side();
    if (phi.m == 1) {
        if (!(phi.values.front() == phi.values.back())) {
            throw InvalidArgument("almgren_class: a one-parameter family must return to its starting cycle");
        }
        CubicalCurrent total = fill_in(phi.at(0), phi.at(1));
        for (int i = 1; i + 1 < s; ++i) total += fill_in(phi.at(i), phi.at(i + 1));
        return homology_class(total);
    }

    // m = 2: label top cells by the square fill-ins.
    const int n = g.n();
    const int d = phi.values.front().dim();
    if (d != n - 2) throw InvalidArgument("almgren_class: two-parameter families need (n-2)-cycles");
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            if ((i == 0 || j == 0 || i == s - 1 || j == s - 1) && !phi.at(i, j).empty()) {
                throw InvalidArgument("almgren_class: boundary vertices of a two-parameter family must map to 0");
            }
    const std::size_t S = g.sites();
    std::vector<CubicalCurrent> horiz, vert;  // (i,j)->(i+1,j) and (i,j)->(i,j+1)
    horiz.reserve(static_cast<std::size_t>(s) * s);
    vert.reserve(static_cast<std::size_t>(s) * s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) {
            horiz.push_back(i + 1 < s ? fill_in(phi.at(i, j), phi.at(i + 1, j)) : CubicalCurrent());
            vert.push_back(j + 1 < s ? fill_in(phi.at(i, j), phi.at(i, j + 1)) : CubicalCurrent());
        }
    auto id = [s](int i, int j) { return static_cast<std::size_t>(i) * s + j; };
    std::vector<long> total(S, 0);
    const unsigned top = (1u << n) - 1;
    for (int i = 0; i + 1 < s; ++i)
        for (int j = 0; j + 1 < s; ++j) {
            CubicalCurrent sq = horiz[id(i, j)];
            sq += vert[id(i + 1, j)];
            sq -= horiz[id(i, j + 1)];
            sq -= vert[id(i, j)];
            if (sq.empty()) continue;
            std::vector<long> label(S, 0);
            std::vector<char> seen(S, 0);
            std::deque<std::size_t> q{0};
            seen[0] = 1;
            while (!q.empty()) {
                const std::size_t x = q.front();
                q.pop_front();
                for (int a = 0; a < n; ++a) {
                    const std::size_t y = g.neighbor(x, a, 1);
                    const long sgn = (a % 2 == 0) ? 1 : -1;
                    const long want = label[x] - sgn * sq.multiplicity(Cell{g.coords(y), top & ~(1u << a)});
                    if (!seen[y]) {
                        seen[y] = 1;
                        label[y] = want;
                        q.push_back(y);
                    } else if (label[y] != want) {
                        throw NumericError("almgren_class: a square fill-in is not null-homologous (family not fine enough)");
                    }
                }
            }
            std::vector<long> sorted = label;
            std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
            const long shift = sorted[sorted.size() / 2];
            for (std::size_t x = 0; x < S; ++x) total[x] += label[x] - shift;
        }
    for (std::size_t x = 1; x < S; ++x)
        if (total[x] != total[0]) throw NumericError("almgren_class: assembled n-chain is not a multiple of the torus");
    return {total[0]};
}

DiscreteFamily concatenate(const DiscreteFamily& a, const DiscreteFamily& b) {
    if (a.m != 1 || b.m != 1) throw InvalidArgument("concatenate: one-parameter families only");
    if (a.values.empty() || b.values.empty() || !(a.values.back() == b.values.front())) {
        throw InvalidArgument("concatenate: end of the first family must equal the start of the second");
    }
    DiscreteFamily c;
    c.m = 1;
    c.level = std::max(a.level, b.level);
    c.values = a.values;
    c.values.insert(c.values.end(), b.values.begin() + 1, b.values.end());
    return c;
}

DiscreteFamily refine(const DiscreteFamily& phi) {
    if (phi.m != 1) throw InvalidArgument("refine: one-parameter families only");
    DiscreteFamily r;
    r.m = 1;
    r.level = phi.level + 1;
    const int s = phi.side();
    r.values.push_back(phi.at(0));
    for (int i = 0; i + 1 < s; ++i) {
        const CubicalCurrent Q = fill_in(phi.at(i), phi.at(i + 1));
        std::vector<std::pair<Cell, long>> units;
        for (const auto& [c, m] : Q.cells())
            for (long t = 0; t < std::abs(m); ++t) units.emplace_back(c, m > 0 ? 1 : -1);
        CubicalCurrent cur = phi.at(i);
        std::size_t next = 0;
        for (int part = 1; part <= 2; ++part) {
            const std::size_t until = units.size() * part / 3;
            if (until > next) {
                CubicalCurrent chunk(Q.lattice(), Q.dim(), Q.dual());
                for (; next < until; ++next) chunk.add(units[next].first, units[next].second);
                cur += boundary(chunk);
            }
            r.values.push_back(cur);
        }
        r.values.push_back(phi.at(i + 1));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Brute-force widths

WidthResult width_bruteforce(const std::vector<long>& cls, LatticeHandle grid, double mass_cap,
                             std::size_t state_budget) {
    const Grid& g = grid->grid;
    if (g.n() != 2 || g.dim(0) > 6 || g.dim(1) > 6) throw InvalidArgument("width_bruteforce: tiny 2D grids only");
    if (cls.size() != 2) throw InvalidArgument("width_bruteforce: class must have two components");
    const int S = static_cast<int>(g.sites());
    const long cmax0 = std::abs(cls[0]) + 2, cmax1 = std::abs(cls[1]) + 2;

    // State: signed multiplicity per site, then the running crossing counts.
    using State = std::string;
    auto encode_target = [&] {
        State t(S + 2, '\0');
        t[S] = static_cast<char>(cls[0]);
        t[S + 1] = static_cast<char>(cls[1]);
        return t;
    };
    const State start(S + 2, '\0'), target = encode_target();

    WidthResult res;
    if (start == target) return res;
    for (int W = 1; W <= static_cast<int>(std::floor(mass_cap + 1e-12)); ++W) {
        std::unordered_set<State> seen{start};
        std::deque<State> q{start};
        while (!q.empty()) {
            const State st = q.front();
            q.pop_front();
            int m = 0;
            for (int x = 0; x < S; ++x) m += std::abs(int(st[x]));
            for (int x = 0; x < S; ++x)
                for (int a = 0; a < 2; ++a)
                    for (int sgn = -1; sgn <= 1; sgn += 2) {
                        // Add sgn * boundary of the link (x, a): +1 at the head, -1 at the tail.
                        const int y = static_cast<int>(g.neighbor(x, a, 1));
                        State nx = st;
                        const int oy = nx[y], ox = nx[x];
                        nx[y] = static_cast<char>(oy + sgn);
                        nx[x] = static_cast<char>(ox - sgn);
                        const int nm = m - std::abs(oy) - std::abs(ox) + std::abs(oy + sgn) + std::abs(ox - sgn);
                        if (nm > W) continue;
                        if (g.coords(x)[a] == 0) {
                            const long c = nx[S + a] + sgn;
                            if (std::abs(c) > (a == 0 ? cmax0 : cmax1)) continue;
                            nx[S + a] = static_cast<char>(c);
                        }
                        if (nx == target) {
                            res.width = W;
                            res.states += seen.size();
                            return res;
                        }
                        if (seen.insert(nx).second) {
                            if (res.states + seen.size() > state_budget) {
                                res.width = W;
                                res.lower_bound_only = true;
                                res.states += seen.size();
                                return res;
                            }
                            q.push_back(std::move(nx));
                        }
                    }
        }
        res.states += seen.size();
    }
    res.width = mass_cap;
    res.lower_bound_only = true;
    return res;
}

}  // namespace ymh
