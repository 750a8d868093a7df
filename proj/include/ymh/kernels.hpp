#pragma once

// Elementwise inner loops shared by the functional and the flow.
//
// Every kernel has a scalar reference implementation and, where the CPU
// supports it, an AVX2 variant selected once at startup. The AVX2 code
// uses the same IEEE operations in the same order as the scalar code (no
// FMA), so both paths produce bit-identical results.
//
// Neighbour values are passed as already-shifted arrays (see
// Grid::shift), which keeps every kernel a pure elementwise map.

#include <cstddef>
#include <string_view>

#include "ymh/common.hpp"

namespace ymh::kernels {

enum class Isa { scalar, avx2 };

struct Table {
    // d[i]   = (U[i]*b[i] - a[i]) * inv_h
    // d2[i]  = |d[i]|^2
    // cur[i] = Im(conj(a[i]) * U[i] * b[i]) * inv_h
    // Any of d, d2, cur may be null.
    void (*link_terms)(const cplx* a, const cplx* b, const cplx* U, double inv_h,
                       cplx* d, double* d2, double* cur, std::size_t n);

    // out[i] += s * (a[i] - U[i]*b[i])          (conj_u == false)
    // out[i] += s * (a[i] - conj(U[i])*b[i])    (conj_u == true)
    void (*hop_accumulate)(const cplx* a, const cplx* b, const cplx* U, double s,
                           bool conj_u, cplx* out, std::size_t n);

    // w[i]     = (1 - |u[i]|^2)^2 * quarter_inv_eps2
    // force[i] = (1 - |u[i]|^2) * u[i] * half_inv_eps2
    // Either output may be null.
    void (*potential_terms)(const cplx* u, double quarter_inv_eps2,
                            double half_inv_eps2, double* w, cplx* force,
                            std::size_t n);

    // y[i] += s * x[i]
    void (*axpy)(double s, const cplx* x, cplx* y, std::size_t n);
};

const Table& scalar_table();
// Returns nullptr when the AVX2 variant was not compiled in.
const Table* avx2_table();

// The table in use. Chosen on first call from CPU support; the
// environment variable YMH_SIMD=scalar forces the reference path.
const Table& active();
Isa active_isa();
std::string_view isa_name(Isa isa);

// Override the dispatch (tests and the CLI --simd flag). Throws
// InvalidArgument if the requested ISA is unavailable on this machine.
void select(Isa isa);
bool cpu_supports(Isa isa);

}  // namespace ymh::kernels
