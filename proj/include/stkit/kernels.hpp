#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stkit::kernels {

struct MaskedSum {
    double sum = 0.0;
    size_t count = 0;
};

/// Table of data-parallel inner-loop kernels. One scalar reference
/// implementation plus ISA-specific variants; the active table is picked
/// once at startup by CPU probing and can be pinned via STKIT_KERNELS or
/// select(). Variants are equivalence-tested against the scalar reference.
struct Ops {
    const char* name;

    double (*dot)(const double* a, const double* b, size_t n);
    double (*sum)(const double* a, size_t n);
    double (*sum_sq_diff)(const double* a, const double* b, size_t n);
    void (*axpy)(double alpha, const double* x, double* y, size_t n);

    /// out[i] = (xs[i]-x0)^2 + (ys[i]-y0)^2
    void (*squared_dist)(const double* xs, const double* ys, double x0, double y0,
                         double* out, size_t n);
    /// out[i] = sqrt(in[i])
    void (*sqrt_arr)(const double* in, double* out, size_t n);

    MaskedSum (*masked_sum)(const double* a, const unsigned char* mask, size_t n);
    MaskedSum (*masked_sum_sq_diff)(const double* a, const double* b,
                                    const unsigned char* mask, size_t n);

    /// y = M x, M row-major rows x cols
    void (*matvec)(const double* m, const double* x, double* y, size_t rows, size_t cols);
    /// y += M^T x  (y has cols entries, x has rows entries)
    void (*matvec_t_acc)(const double* m, const double* x, double* y, size_t rows, size_t cols);

    /// In-place Adam update; bc1/bc2 are the bias-correction factors
    /// 1-beta1^t and 1-beta2^t precomputed by the caller.
    void (*adam_update)(double* w, double* m, double* v, const double* g, size_t n,
                        double lr, double beta1, double beta2, double eps,
                        double bc1, double bc2);
};

extern const Ops scalar_ops;
#ifdef STKIT_HAVE_AVX2
extern const Ops avx2_ops;
#endif

/// Active kernel table (thread-safe initialization, stable for the process).
const Ops& active();

/// Pin the implementation ("scalar", "avx2", "auto"). Returns false if the
/// requested variant is unavailable on this machine.
bool select(std::string_view name);

std::vector<std::string> available();

} // namespace stkit::kernels
