#pragma once

// The energy, its density, the one-form beta, the gauge-invariant Jacobian,
// the Euler-Lagrange residual and the stress-energy trace.
//
// Lattice energy (V = cell volume):
//   E = V * [ sum_links |D u|^2 + eps^2 sum_plaquettes omega^2
//             + sum_sites (1 - |u|^2)^2 / (4 eps^2) ],
// with omega = omega_0 + d alpha. Site densities average the two links per
// axis and the four plaquettes per plane that touch the site.

#include <string>
#include <vector>

#include "ymh/lattice.hpp"

namespace ymh {

struct EnergyReport {
    double total = 0.0;
    double gradient = 0.0;
    double curvature = 0.0;
    double potential = 0.0;
    FormField density;  // e_eps per site
    double max_density = 0.0;
    double max_abs_u = 0.0;

    static std::string csv_header();
    std::string csv_row(double t) const;
};

// Per-link and per-plaquette quantities shared by the energy, the residual
// and the flow, computed in one pass.
struct LinkTerms {
    LinkField transport;                           // U_j(x)
    std::array<std::vector<double>, kMaxDim> d2;   // |D_j u(x)|^2
    std::array<std::vector<double>, kMaxDim> cur;  // Im(conj(u(x)) U_j(x) u(x + e_j)) / h_j
    FormField omega;                               // omega_0 + d alpha
};

LinkTerms link_terms(const PairState& pair);

FormField curvature(const PairState& pair);

EnergyReport energy(const PairState& pair);
EnergyReport energy(const PairState& pair, const LinkTerms& terms);

// Lattice supercurrent <D u, i ubar> per link, ubar the link average of u
// transported to the base point. Equals cur in LinkTerms.
FormField current(const PairState& pair);

// beta = <D u, i ubar> + alpha.
FormField beta_form(const PairState& pair);

// J = d beta + omega_0. Closed, and each coordinate slice carries 2 pi m_jk.
FormField jacobian_form(const PairState& pair);

// Continuum form of the Jacobian, psi + (1 - |u|^2) omega, evaluated per
// plaquette and compared with jacobian_form.
struct JacobianMismatch {
    FormField psi;        // 2 Im(conj(D_j u) D_k u), averaged over corners
    FormField continuum;  // psi + (1 - |u|^2) omega
    FormField mismatch;   // jacobian_form - continuum
    double l1 = 0.0;      // sum |mismatch| * area weight
    double max = 0.0;
};
JacobianMismatch jacobian_mismatch(const PairState& pair);

struct ElResidual {
    ScalarField u;     // nabla* nabla u - (1 - |u|^2) u / (2 eps^2)
    FormField alpha;   // eps^2 d* omega - <D u, i ubar>
    double l2 = 0.0;   // sqrt(V * sum (|r_u|^2 + |r_alpha|^2))
    double max = 0.0;  // max over both components
};
ElResidual el_residual(const PairState& pair);
ElResidual el_residual(const PairState& pair, const LinkTerms& terms);

// |D u|^2 + 2 eps^2 |omega|^2 per site.
FormField stress_trace(const PairState& pair);

// Helpers shared with other modules.
// Average of per-link values onto sites: 1/2 sum_j (v_j(x) + v_j(x - e_j)).
void links_to_sites(const Grid& g, const std::array<std::vector<double>, kMaxDim>& v, std::span<double> out);
// Average of per-plaquette values onto sites: 1/4 sum over the four incident
// plaquettes of every plane, summed over planes.
void plaquettes_to_sites(const Grid& g, const FormField& two_form_values, std::span<double> out);

}  // namespace ymh
