#pragma once

// Integral cubical currents on the periodic grid: mass, boundary, flat
// norm, Jacobian currents of pairs, homology classes, and the bookkeeping
// for discrete families of cycles (fineness, concentration, Almgren class,
// brute-force widths).
//
// A d-cell is a base site plus a set of d axes (bitmask). It is the cube
// spanned by h_i e_i, i in the set, oriented by the increasing axis order.
// A current may live on the primal grid or on the dual grid, whose
// vertices sit at the cube centres x + (h/2)(1, ..., 1); Jacobian currents
// are dual.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ymh/functional.hpp"

namespace ymh {

struct Cell {
    Index3 base{0, 0, 0};
    unsigned axes = 0;  // bit i set <=> e_i spans the cell

    int dim() const { return __builtin_popcount(axes); }
    auto operator<=>(const Cell&) const = default;
};

class CubicalCurrent {
public:
    CubicalCurrent() = default;
    CubicalCurrent(LatticeHandle lattice, int dim, bool dual = false);

    const Grid& grid() const { return lattice_->grid; }
    const LatticeHandle& lattice() const { return lattice_; }
    int dim() const { return dim_; }
    bool dual() const { return dual_; }

    // Adds m to the multiplicity of the cell (base is wrapped periodically).
    void add(Cell c, long m);
    long multiplicity(Cell c) const;
    const std::map<Cell, long>& cells() const { return cells_; }
    bool empty() const { return cells_.empty(); }

    CubicalCurrent& operator+=(const CubicalCurrent& o);
    CubicalCurrent& operator-=(const CubicalCurrent& o);
    CubicalCurrent operator-() const;
    bool operator==(const CubicalCurrent& o) const;

    // Cell id, axes, multiplicity per row.
    std::string to_csv() const;

private:
    void check_compatible(const CubicalCurrent& o) const;
    Cell canonical(Cell c) const;

    LatticeHandle lattice_;
    int dim_ = 0;
    bool dual_ = false;
    std::map<Cell, long> cells_;
};

CubicalCurrent operator+(CubicalCurrent a, const CubicalCurrent& b);
CubicalCurrent operator-(CubicalCurrent a, const CubicalCurrent& b);

// Product of the spacings along the cell's axes.
double cell_measure(const Grid& g, const Cell& c);
double mass(const CubicalCurrent& T);
CubicalCurrent boundary(const CubicalCurrent& T);

// Straight closed loop along `axis` through the dual line with the given
// transverse cube indices (n = 3), multiplicity m.
CubicalCurrent axis_loop(LatticeHandle lattice, int axis, const Index3& through, long m, bool dual = true);

struct FlatNormResult {
    double value = 0.0;
    CubicalCurrent P;  // dim d
    CubicalCurrent Q;  // dim d + 1
    bool integral = true;
    std::string method;  // "min-cost-flow" or "simplex"
};

struct FlatNormOptions {
    // Force P = 0 (fill-in of a null-homologous difference).
    bool fill_in = false;
    double integrality_tol = 1e-7;
    // Solve 0-current instances with the simplex instead of min-cost flow.
    bool force_simplex = false;
};

// min M(P) + M(Q) subject to S - T = P + dQ over real coefficients.
FlatNormResult flat_norm(const CubicalCurrent& S, const CubicalCurrent& T, const FlatNormOptions& opt = {});

struct JacobianCurrent {
    CubicalCurrent current;  // dual (n-2)-current
    double residual = 0.0;   // l1 distance between J/2pi and the current density
    bool needs_jitter = false;
};

// Plaquette winding numbers of u, corrected by the plaquette flux.
JacobianCurrent extract_jacobian_current(const PairState& pair, double threshold = 0.5);

// n = 2: total multiplicity of a 0-cycle; n = 3: signed crossings of the
// (1,2), (0,2), (0,1) coordinate tori, i.e. the homology class in
// the basis of the axis loops.
std::vector<long> homology_class(const CubicalCurrent& T);

// ---------------------------------------------------------------------------
// Discrete families

struct DiscreteFamily {
    int m = 1;      // parameter dimension (1 or 2)
    int level = 0;  // vertices at 3^-level spacing
    // Row-major over the vertices of I(m, level): 3^level + 1 per side.
    // Concatenated m = 1 families may hold any number of vertices.
    std::vector<CubicalCurrent> values;

    int side() const;  // vertices per parameter axis
    const CubicalCurrent& at(int i, int j = 0) const;
    CubicalCurrent& at(int i, int j = 0);
};

DiscreteFamily make_family(int m, int level, const CubicalCurrent& fill);

double fineness(const DiscreteFamily& phi);
// max over vertices and ball centres of mass(phi(x) restricted to B_r).
double concentration(const DiscreteFamily& phi, double r);

struct AlmgrenOptions {
    double max_fineness = -1.0;  // default: min l_i / 4
};

// m = 1: homology class (in H_{n-1}, as pairings with the coordinate
// axis loops) of the sum of minimal fill-ins along the edges;
// m = 2: degree of the n-chain assembled from the square fill-ins.
std::vector<long> almgren_class(const DiscreteFamily& phi, const AlmgrenOptions& opt = {});

// Concatenation of two m = 1 families (end of a = start of b).
DiscreteFamily concatenate(const DiscreteFamily& a, const DiscreteFamily& b);
// Each edge replaced by three, interpolating through minimal fill-ins.
DiscreteFamily refine(const DiscreteFamily& phi);

struct WidthResult {
    double width = 0.0;
    bool lower_bound_only = false;  // the mass cap or state budget was hit
    std::size_t states = 0;
};

// Minimal max-mass over fine m = 1 families of 0-cycles on a small T^2
// that start and end at 0 and whose Almgren class is the given vector.
WidthResult width_bruteforce(const std::vector<long>& cls, LatticeHandle grid, double mass_cap,
                             std::size_t state_budget = 20'000'000);

}  // namespace ymh
