#include "ymh/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define YMH_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace ymh::kernels {

#if YMH_HAVE_AVX2_KERNELS

namespace {

// Two complex numbers per register: [re0, im0, re1, im1].

#define YMH_AVX2 __attribute__((target("avx2")))

YMH_AVX2 inline __m256d cmul(__m256d u, __m256d b) {
    const __m256d ur = _mm256_movedup_pd(u);        // [ur0, ur0, ur1, ur1]
    const __m256d ui = _mm256_permute_pd(u, 0xF);   // [ui0, ui0, ui1, ui1]
    const __m256d bs = _mm256_permute_pd(b, 0x5);   // [bi0, br0, bi1, br1]
    return _mm256_addsub_pd(_mm256_mul_pd(ur, b), _mm256_mul_pd(ui, bs));
}

YMH_AVX2 inline void store_pair(double* dst, __m256d v) {
    // Lanes 0 and 2 hold the two results.
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    _mm_storeu_pd(dst, _mm_unpacklo_pd(lo, hi));
}

YMH_AVX2 void link_terms(const cplx* a, const cplx* b, const cplx* U, double inv_h,
                         cplx* d, double* d2, double* cur, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    const double* pu = reinterpret_cast<const double*>(U);
    const __m256d vh = _mm256_set1_pd(inv_h);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d t = cmul(_mm256_loadu_pd(pu + 2 * i), _mm256_loadu_pd(pb + 2 * i));
        const __m256d dv = _mm256_mul_pd(_mm256_sub_pd(t, va), vh);
        if (d) _mm256_storeu_pd(reinterpret_cast<double*>(d + i), dv);
        if (d2) {
            const __m256d sq = _mm256_mul_pd(dv, dv);
            store_pair(d2 + i, _mm256_hadd_pd(sq, sq));
        }
        if (cur) {
            const __m256d ts = _mm256_permute_pd(t, 0x5);  // [ti, tr, ...]
            const __m256d p = _mm256_mul_pd(va, ts);      // [ar*ti, ai*tr, ...]
            store_pair(cur + i, _mm256_mul_pd(_mm256_hsub_pd(p, p), vh));
        }
    }
    if (i < n) {
        scalar_table().link_terms(a + i, b + i, U + i, inv_h, d ? d + i : nullptr,
                                  d2 ? d2 + i : nullptr, cur ? cur + i : nullptr, n - i);
    }
}

YMH_AVX2 void hop_accumulate(const cplx* a, const cplx* b, const cplx* U, double s,
                             bool conj_u, cplx* out, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    const double* pu = reinterpret_cast<const double*>(U);
    double* po = reinterpret_cast<double*>(out);
    const __m256d vs = _mm256_set1_pd(s);
    const __m256d flip = conj_u ? _mm256_set_pd(-1.0, 1.0, -1.0, 1.0) : _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d u = _mm256_mul_pd(_mm256_loadu_pd(pu + 2 * i), flip);
        const __m256d t = cmul(u, _mm256_loadu_pd(pb + 2 * i));
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * i), t);
        const __m256d r = _mm256_add_pd(_mm256_loadu_pd(po + 2 * i), _mm256_mul_pd(diff, vs));
        _mm256_storeu_pd(po + 2 * i, r);
    }
    if (i < n) scalar_table().hop_accumulate(a + i, b + i, U + i, s, conj_u, out + i, n - i);
}

YMH_AVX2 void potential_terms(const cplx* u, double quarter_inv_eps2, double half_inv_eps2,
                              double* w, cplx* force, std::size_t n) {
    const double* pu = reinterpret_cast<const double*>(u);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d q = _mm256_set1_pd(quarter_inv_eps2);
    const __m256d hh = _mm256_set1_pd(half_inv_eps2);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vu = _mm256_loadu_pd(pu + 2 * i);
        const __m256d sq = _mm256_mul_pd(vu, vu);
        const __m256d m = _mm256_sub_pd(one, _mm256_hadd_pd(sq, sq));
        if (w) store_pair(w + i, _mm256_mul_pd(_mm256_mul_pd(m, m), q));
        if (force) {
            const __m256d c = _mm256_mul_pd(m, hh);
            _mm256_storeu_pd(reinterpret_cast<double*>(force + i), _mm256_mul_pd(vu, c));
        }
    }
    if (i < n) {
        scalar_table().potential_terms(u + i, quarter_inv_eps2, half_inv_eps2,
                                       w ? w + i : nullptr, force ? force + i : nullptr, n - i);
    }
}

YMH_AVX2 void axpy(double s, const cplx* x, cplx* y, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    double* py = reinterpret_cast<double*>(y);
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d r = _mm256_add_pd(_mm256_loadu_pd(py + 2 * i),
                                        _mm256_mul_pd(vs, _mm256_loadu_pd(px + 2 * i)));
        _mm256_storeu_pd(py + 2 * i, r);
    }
    if (i < n) scalar_table().axpy(s, x + i, y + i, n - i);
}

#undef YMH_AVX2

}  // namespace

const Table* avx2_table() {
    static const Table t{link_terms, hop_accumulate, potential_terms, axpy};
    return &t;
}

#else

const Table* avx2_table() { return nullptr; }

#endif

}  // namespace ymh::kernels
