#include "ymh/kernels.hpp"

namespace ymh::kernels {

namespace {

void link_terms(const cplx* a, const cplx* b, const cplx* U, double inv_h,
                cplx* d, double* d2, double* cur, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ur = U[i].real(), ui = U[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        const double ar = a[i].real(), ai = a[i].imag();
        // t = U * b
        const double tr = ur * br - ui * bi;
        const double ti = ur * bi + ui * br;
        const double dr = (tr - ar) * inv_h;
        const double di = (ti - ai) * inv_h;
        if (d) d[i] = cplx(dr, di);
        if (d2) d2[i] = dr * dr + di * di;
        // Im(conj(a) * t) = ar*ti - ai*tr
        if (cur) cur[i] = (ar * ti - ai * tr) * inv_h;
    }
}

void hop_accumulate(const cplx* a, const cplx* b, const cplx* U, double s,
                    bool conj_u, cplx* out, std::size_t n) {
    const double sign = conj_u ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ur = U[i].real(), ui = U[i].imag() * sign;
        const double br = b[i].real(), bi = b[i].imag();
        const double tr = ur * br - ui * bi;
        const double ti = ur * bi + ui * br;
        const double rr = out[i].real() + (a[i].real() - tr) * s;
        const double ri = out[i].imag() + (a[i].imag() - ti) * s;
        out[i] = cplx(rr, ri);
    }
}

void potential_terms(const cplx* u, double quarter_inv_eps2, double half_inv_eps2,
                     double* w, cplx* force, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ur = u[i].real(), ui = u[i].imag();
        const double m = 1.0 - (ur * ur + ui * ui);
        if (w) w[i] = (m * m) * quarter_inv_eps2;
        if (force) {
            const double c = m * half_inv_eps2;
            force[i] = cplx(ur * c, ui * c);
        }
    }
}

void axpy(double s, const cplx* x, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = cplx(y[i].real() + s * x[i].real(), y[i].imag() + s * x[i].imag());
    }
}

}  // namespace

const Table& scalar_table() {
    static const Table t{link_terms, hop_accumulate, potential_terms, axpy};
    return t;
}

}  // namespace ymh::kernels
