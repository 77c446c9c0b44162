#pragma once

#include <cstddef>

namespace temo::kernels {

// Table of the hot numeric loops. Two implementations exist: a scalar
// reference and an AVX2+FMA variant; the dispatcher picks one per process.
// Everything above this layer calls through ops() and stays ISA-agnostic.
struct Ops {
    const char* name;

    void (*add)(const double* a, const double* b, double* out, std::size_t n);
    void (*sub)(const double* a, const double* b, double* out, std::size_t n);
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    void (*div)(const double* a, const double* b, double* out, std::size_t n);
    void (*scale)(const double* a, double s, double* out, std::size_t n);
    // y[i] += s * x[i]
    void (*axpy)(double s, const double* x, double* y, std::size_t n);
    // y[i] += a[i] * b[i]
    void (*madd)(const double* a, const double* b, double* y, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    void (*clamp_min)(const double* a, double lo, double* out, std::size_t n);
    // c[m x n] = a[m x k] * b[k x n]; accumulates into c when acc is true.
    void (*matmul)(const double* a, const double* b, double* c, std::size_t m,
                   std::size_t k, std::size_t n, bool acc);
};

// Active table. Selected once per process: TEMO_KERNELS=scalar|avx2 forces a
// choice, otherwise AVX2 is used when the CPU supports it.
const Ops& ops();

const Ops& scalar_ops();
// Null when the build or the CPU lacks AVX2+FMA.
const Ops* avx2_ops();

namespace detail {
// Raw table from the AVX2 translation unit, ignoring CPU detection. Null on
// non-x86 builds. Call avx2_ops() instead.
const Ops* avx2_table();
}  // namespace detail

// out[n x m] = a^T for row-major a[m x n]. Memory bound, not dispatched.
inline void transpose(const double* a, double* out, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a[i * n + j];
}

}  // namespace temo::kernels
