#include "temo/kernels/kernels.hpp"

// AVX2+FMA variants of the dispatch table. This translation unit is the only
// one built with -mavx2 -mfma; it must not be entered unless the dispatcher
// verified CPU support. Reductions use four lane accumulators, so their
// rounding differs from the scalar reference by design; the equivalence tests
// compare with a tolerance rather than bitwise.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace temo::kernels {
namespace {

void add_v(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_v(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_v(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void div_v(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] / b[i];
}

void scale_v(const double* a, double s, double* out, std::size_t n) {
    __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), sv));
    for (; i < n; ++i) out[i] = a[i] * s;
}

void axpy_v(double s, const double* x, double* y, std::size_t n) {
    __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(
            y + i, _mm256_fmadd_pd(sv, _mm256_loadu_pd(x + i),
                                   _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += s * x[i];
}

void madd_v(const double* a, const double* b, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(
            y + i, _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                                   _mm256_loadu_pd(b + i),
                                   _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a[i] * b[i];
}

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

double dot_v(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                               _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                               _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8),
                               _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12),
                               _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                               _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                    _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_v(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
        acc2 = _mm256_add_pd(acc2, _mm256_loadu_pd(a + i + 8));
        acc3 = _mm256_add_pd(acc3, _mm256_loadu_pd(a + i + 12));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                    _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) acc += a[i];
    return acc;
}

void clamp_min_v(const double* a, double lo, double* out, std::size_t n) {
    // max(lo, x) keeps NaN (returns the second operand when unordered),
    // matching the scalar reference.
    __m256d lov = _mm256_set1_pd(lo);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_max_pd(lov, _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) out[i] = a[i] < lo ? lo : a[i];
}

void matmul_v(const double* a, const double* b, double* c, std::size_t m,
              std::size_t k, std::size_t n, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        std::size_t j = 0;
        // 16-wide tiles keep four accumulators live across the full k loop.
        for (; j + 16 <= n; j += 16) {
            __m256d c0, c1, c2, c3;
            if (acc) {
                c0 = _mm256_loadu_pd(crow + j);
                c1 = _mm256_loadu_pd(crow + j + 4);
                c2 = _mm256_loadu_pd(crow + j + 8);
                c3 = _mm256_loadu_pd(crow + j + 12);
            } else {
                c0 = c1 = c2 = c3 = _mm256_setzero_pd();
            }
            for (std::size_t p = 0; p < k; ++p) {
                __m256d av = _mm256_set1_pd(arow[p]);
                const double* br = b + p * n + j;
                c0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(br), c0);
                c1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(br + 4), c1);
                c2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(br + 8), c2);
                c3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(br + 12), c3);
            }
            _mm256_storeu_pd(crow + j, c0);
            _mm256_storeu_pd(crow + j + 4, c1);
            _mm256_storeu_pd(crow + j + 8, c2);
            _mm256_storeu_pd(crow + j + 12, c3);
        }
        for (; j + 4 <= n; j += 4) {
            __m256d c0 = acc ? _mm256_loadu_pd(crow + j) : _mm256_setzero_pd();
            for (std::size_t p = 0; p < k; ++p)
                c0 = _mm256_fmadd_pd(_mm256_set1_pd(arow[p]),
                                     _mm256_loadu_pd(b + p * n + j), c0);
            _mm256_storeu_pd(crow + j, c0);
        }
        for (; j < n; ++j) {
            double s = acc ? crow[j] : 0.0;
            for (std::size_t p = 0; p < k; ++p) s += arow[p] * b[p * n + j];
            crow[j] = s;
        }
    }
}

const Ops table = {
    "avx2",  add_v,  sub_v,  mul_v, div_v,       scale_v,
    axpy_v,  madd_v, dot_v,  sum_v, clamp_min_v, matmul_v,
};

}  // namespace

namespace detail {
const Ops* avx2_table() { return &table; }
}  // namespace detail

}  // namespace temo::kernels

#else

namespace temo::kernels::detail {
const Ops* avx2_table() { return nullptr; }
}  // namespace temo::kernels::detail

#endif
