#pragma once

// Periodic cubical grids on flat tori, twisted line-bundle sectors and the
// discrete exterior calculus used by every other module.
//
// Conventions
//  - Sites are stored row-major with the last axis fastest.
//  - A k-form stores one value per cell of degree k, component-major:
//    degree 1 has one component per axis (the link x -> x + e_j is owned by
//    site x); degree 2 has one component per coordinate plane (j, k), j < k,
//    owned by its lower corner; degree 3 (n = 3 only) has one component.
//  - All inner products carry the cell volume h_1 ... h_n as weight, so the
//    transpose of d is its adjoint.

#include <array>
#include <cstddef>
#include <cstring>
#include <memory>
#include <span>
#include <vector>

#include "ymh/common.hpp"

namespace ymh {

inline constexpr int kMaxDim = 3;

using Index3 = std::array<int, kMaxDim>;
using FluxMatrix = std::array<std::array<int, kMaxDim>, kMaxDim>;

struct Plane {
    int j;
    int k;
};

class Grid {
public:
    Grid() = default;
    Grid(int n, Index3 dims, std::array<double, kMaxDim> lengths, FluxMatrix flux);

    int n() const { return n_; }
    int dim(int axis) const { return dims_[axis]; }
    const Index3& dims() const { return dims_; }
    double length(int axis) const { return lengths_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double min_spacing() const;
    double min_length() const;
    std::size_t sites() const { return sites_; }
    std::size_t stride(int axis) const { return strides_[axis]; }
    double cell_volume() const { return cell_volume_; }
    double volume() const;

    int flux(int j, int k) const { return flux_[j][k]; }
    const FluxMatrix& flux_matrix() const { return flux_; }

    // Coordinate planes j < k: one for n = 2, three for n = 3.
    int plane_count() const { return n_ == 2 ? 1 : 3; }
    Plane plane(int p) const;
    int plane_index(int j, int k) const;  // j < k
    // Number of components of a k-form.
    int components(int degree) const;

    Index3 coords(std::size_t idx) const;
    std::size_t index(const Index3& c) const;
    // Periodic neighbour idx + step * e_axis.
    std::size_t neighbor(std::size_t idx, int axis, int step) const;
    double position(std::size_t idx, int axis) const {
        return coords(idx)[axis] * spacing_[axis];
    }

    // out[x] = in[x + step * e_axis] with periodic wrap; step is +1 or -1.
    template <typename T>
    void shift(std::span<const T> in, int axis, int step, std::span<T> out) const;

    bool same_shape(const Grid& other) const;

private:
    int n_ = 0;
    Index3 dims_{1, 1, 1};
    std::array<double, kMaxDim> lengths_{1.0, 1.0, 1.0};
    std::array<double, kMaxDim> spacing_{1.0, 1.0, 1.0};
    std::array<std::size_t, kMaxDim> strides_{1, 1, 1};
    std::size_t sites_ = 0;
    double cell_volume_ = 0.0;
    FluxMatrix flux_{};
};

// Real k-form on the lattice.
class FormField {
public:
    FormField() = default;
    FormField(const Grid& grid, int degree);

    int degree() const { return degree_; }
    int components() const { return components_; }
    std::size_t sites() const { return sites_; }

    std::span<double> component(int c) {
        return {values_.data() + static_cast<std::size_t>(c) * sites_, sites_};
    }
    std::span<const double> component(int c) const {
        return {values_.data() + static_cast<std::size_t>(c) * sites_, sites_};
    }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    FormField& operator+=(const FormField& o);
    FormField& operator-=(const FormField& o);
    FormField& operator*=(double s);

private:
    int degree_ = 0;
    int components_ = 0;
    std::size_t sites_ = 0;
    std::vector<double> values_;
};

FormField operator+(FormField a, const FormField& b);
FormField operator-(FormField a, const FormField& b);
FormField operator*(double s, FormField a);

// One complex number per site.
struct ScalarField {
    std::vector<cplx> values;

    ScalarField() = default;
    explicit ScalarField(std::size_t sites, cplx fill = {0.0, 0.0}) : values(sites, fill) {}
    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }
};

// One complex number per directed link, component-major like a 1-form.
struct LinkField {
    std::array<std::vector<cplx>, kMaxDim> comp;
};

struct BackgroundConnection {
    // Holonomy of the reference connection along each link.
    LinkField link_phase;
    // Constant curvature 2 pi m_jk / (l_j l_k) per (j, k) plaquette.
    FormField curvature;
};

// Grid plus its fixed background; shared by every PairState on it.
struct Lattice {
    Grid grid;
    BackgroundConnection background;
};

using LatticeHandle = std::shared_ptr<const Lattice>;

// Builds the grid and a background connection with constant curvature in
// the flux sector. flux_upper lists m_jk for (0,1), (0,2), (1,2) (one entry
// for n = 2). Throws InvalidArgument on bad shapes or non-integer flux.
LatticeHandle make_grid(int n, std::span<const int> dims, std::span<const double> lengths,
                        std::span<const double> flux_upper);

// Weighted inner product of two forms of the same degree.
double inner(const Grid& grid, const FormField& a, const FormField& b);

FormField d(const Grid& grid, const FormField& f);
FormField d_star(const Grid& grid, const FormField& f);

// Sum of the k-form over the whole (j,k) coordinate 2-torus passing through
// the site `slice` (area-weighted): sum f_jk h_j h_k.
double slice_flux(const Grid& grid, const FormField& two_form, int j, int k,
                  const Index3& slice = {0, 0, 0});

// Link parallel transport U_j(x) = L_j(x) exp(-i h_j alpha_j(x)).
LinkField link_transport(const Lattice& lattice, const FormField& alpha);

// D_j u(x) = (U_j(x) u(x + e_j) - u(x)) / h_j.
LinkField covariant_diff(const Lattice& lattice, const ScalarField& u, const FormField& alpha);

// Covariant Laplacian  nabla^* nabla u  for a precomputed transport.
void covariant_laplacian(const Grid& grid, const LinkField& transport, const ScalarField& u,
                         ScalarField& out);

// A section and a dynamic one-form relative to the lattice background.
struct PairState {
    LatticeHandle lattice;
    ScalarField u;
    FormField alpha;
    double eps = 1.0;

    const Grid& grid() const { return lattice->grid; }
};

// Vacuum-shaped pair (u = fill, alpha = 0). Throws on eps outside (0, 1].
PairState make_pair(LatticeHandle lattice, double eps, cplx fill = {1.0, 0.0});
// Checks shapes and eps; throws InvalidArgument.
void validate(const PairState& pair);
// max |u| over sites.
double max_abs_u(const PairState& pair);

// u <- exp(i Theta) u, alpha <- alpha + dTheta, where
// Theta = theta + sum_j 2 pi winding_j x_j / l_j. The winding part is a
// large gauge transformation: exp(i Theta) is periodic while Theta jumps
// by 2 pi winding_j across the seam, and alpha shifts by 2 pi winding_j / l_j.
PairState gauge_transform(const PairState& pair, const FormField& theta,
                          const Index3& winding = {0, 0, 0});

// ---------------------------------------------------------------------------

template <typename T>
void Grid::shift(std::span<const T> in, int axis, int step, std::span<T> out) const {
    const std::size_t inner = strides_[axis];
    const std::size_t N = static_cast<std::size_t>(dims_[axis]);
    const std::size_t block = inner * N;
    const std::size_t outer = sites_ / block;
    for (std::size_t o = 0; o < outer; ++o) {
        const T* src = in.data() + o * block;
        T* dst = out.data() + o * block;
        if (step > 0) {
            std::memcpy(dst, src + inner, (block - inner) * sizeof(T));
            std::memcpy(dst + block - inner, src, inner * sizeof(T));
        } else {
            std::memcpy(dst + inner, src, (block - inner) * sizeof(T));
            std::memcpy(dst, src + block - inner, inner * sizeof(T));
        }
    }
}

}  // namespace ymh
