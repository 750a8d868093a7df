#pragma once

// Spectral solves on the periodic grid, Hodge decomposition of one-forms,
// Coulomb projection and gauge normalization.
//
// Every operator below is diagonal in the discrete Fourier basis. The
// cubical Laplacian d*d on 0-forms has symbol
//   lambda(k) = sum_i 4/h_i^2 sin^2(pi k_i / N_i),
// and the Hodge Laplacian dd* + d*d acts componentwise on k-forms with the
// same symbol.

#include <functional>

#include "ymh/lattice.hpp"

namespace ymh {

// out = F^{-1}[ m(lambda(k)) F[in] ] on one site array.
void spectral_apply(const Grid& g, std::span<const double> in, std::span<double> out,
                    const std::function<double(double)>& multiplier);

double laplace_symbol(const Grid& g, const Index3& k);

// Solves d*d theta = f with sum(theta) = 0. Rejects inputs whose weighted
// mean exceeds 1e-10 (relative to the weighted l1 norm) and reports it.
FormField poisson_solve(const Grid& g, const FormField& f);

// (I + tau (dd* + d*d))^{-1} applied componentwise to a form of any degree.
FormField hodge_resolvent(const Grid& g, const FormField& f, double tau);

// Coexact alpha with d alpha = F, for a closed 2-form F of zero mean in
// every component.
FormField solve_curl(const Grid& g, const FormField& F);

struct HodgeSplit {
    FormField exact;
    FormField coexact;
    FormField harmonic;
};

HodgeSplit hodge_decompose(const Grid& g, const FormField& alpha);

// Per-direction means of a one-form (its harmonic coefficients).
std::array<double, kMaxDim> harmonic_part(const Grid& g, const FormField& alpha);

// Q lambda = -(d*d)^{-1} d* lambda, so that lambda + d Q lambda = P lambda.
FormField q_operator(const Grid& g, const FormField& lambda);
// Removes the exact part: P lambda = coexact + harmonic.
FormField p_project(const Grid& g, const FormField& lambda);

// Gauge transformation with theta = (d*d)^{-1}(-d* alpha); the result has
// d* alpha = 0.
PairState coulomb_project(const PairState& pair);

// Coulomb projection followed by the large gauge transformation that moves
// each harmonic coefficient into [-pi/l_i, pi/l_i] (nearest integer, ties
// toward the smaller integer).
PairState normalize_gauge(const PairState& pair);

}  // namespace ymh
