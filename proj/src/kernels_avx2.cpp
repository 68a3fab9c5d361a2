#ifdef STKIT_HAVE_AVX2

#include "stkit/kernels.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2/FMA variants. 4-wide double lanes, scalar tail. Reductions use four
// independent lane accumulators folded at the end, so the summation order
// differs from the scalar reference; equivalence tests allow for that.

namespace stkit::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double k_dot(const double* a, const double* b, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

double k_sum(const double* a, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i];
    return r;
}

double k_sum_sq_diff(const double* a, const double* b, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        r += d * d;
    }
    return r;
}

void k_axpy(double alpha, const double* x, double* y, size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void k_squared_dist(const double* xs, const double* ys, double x0, double y0,
                    double* out, size_t n) {
    const __m256d vx0 = _mm256_set1_pd(x0);
    const __m256d vy0 = _mm256_set1_pd(y0);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vx0);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vy0);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy)));
    }
    for (; i < n; ++i) {
        const double dx = xs[i] - x0;
        const double dy = ys[i] - y0;
        out[i] = std::fma(dx, dx, dy * dy);
    }
}

void k_sqrt_arr(const double* in, double* out, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_loadu_pd(in + i)));
    for (; i < n; ++i) out[i] = std::sqrt(in[i]);
}

MaskedSum k_masked_sum(const double* a, const unsigned char* mask, size_t n) {
    MaskedSum r;
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // widen the 4 mask bytes to full-width lane masks
        __m256d sel = _mm256_set_pd(mask[i + 3] ? -1.0 : 0.0, mask[i + 2] ? -1.0 : 0.0,
                                    mask[i + 1] ? -1.0 : 0.0, mask[i + 0] ? -1.0 : 0.0);
        __m256d keep = _mm256_cmp_pd(sel, _mm256_setzero_pd(), _CMP_NEQ_OQ);
        acc = _mm256_add_pd(acc, _mm256_and_pd(keep, _mm256_loadu_pd(a + i)));
        r.count += static_cast<size_t>(!!mask[i]) + !!mask[i + 1] + !!mask[i + 2] + !!mask[i + 3];
    }
    r.sum = hsum(acc);
    for (; i < n; ++i) {
        if (mask[i]) {
            r.sum += a[i];
            ++r.count;
        }
    }
    return r;
}

MaskedSum k_masked_sum_sq_diff(const double* a, const double* b,
                               const unsigned char* mask, size_t n) {
    MaskedSum r;
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d sel = _mm256_set_pd(mask[i + 3] ? -1.0 : 0.0, mask[i + 2] ? -1.0 : 0.0,
                                    mask[i + 1] ? -1.0 : 0.0, mask[i + 0] ? -1.0 : 0.0);
        __m256d keep = _mm256_cmp_pd(sel, _mm256_setzero_pd(), _CMP_NEQ_OQ);
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        d = _mm256_and_pd(keep, d);
        acc = _mm256_fmadd_pd(d, d, acc);
        r.count += static_cast<size_t>(!!mask[i]) + !!mask[i + 1] + !!mask[i + 2] + !!mask[i + 3];
    }
    r.sum = hsum(acc);
    for (; i < n; ++i) {
        if (mask[i]) {
            const double d = a[i] - b[i];
            r.sum += d * d;
            ++r.count;
        }
    }
    return r;
}

void k_matvec(const double* m, const double* x, double* y, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) y[r] = k_dot(m + r * cols, x, cols);
}

void k_matvec_t_acc(const double* m, const double* x, double* y, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        const __m256d xr = _mm256_set1_pd(x[r]);
        size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d vy = _mm256_loadu_pd(y + c);
            vy = _mm256_fmadd_pd(xr, _mm256_loadu_pd(row + c), vy);
            _mm256_storeu_pd(y + c, vy);
        }
        for (; c < cols; ++c) y[c] += row[c] * x[r];
    }
}

void k_adam_update(double* w, double* m, double* v, const double* g, size_t n,
                   double lr, double beta1, double beta2, double eps,
                   double bc1, double bc2) {
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb1c = _mm256_set1_pd(1.0 - beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d vb2c = _mm256_set1_pd(1.0 - beta2);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vbc1 = _mm256_set1_pd(bc1);
    const __m256d vbc2 = _mm256_set1_pd(bc2);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vg = _mm256_loadu_pd(g + i);
        __m256d vm = _mm256_fmadd_pd(vb1c, vg, _mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)));
        __m256d vv = _mm256_fmadd_pd(vb2c, _mm256_mul_pd(vg, vg),
                                     _mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);
        __m256d mhat = _mm256_div_pd(vm, vbc1);
        __m256d vhat = _mm256_div_pd(vv, vbc2);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        __m256d vw = _mm256_loadu_pd(w + i);
        vw = _mm256_sub_pd(vw, _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom));
        _mm256_storeu_pd(w + i, vw);
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace

const Ops avx2_ops = {
    .name = "avx2",
    .dot = k_dot,
    .sum = k_sum,
    .sum_sq_diff = k_sum_sq_diff,
    .axpy = k_axpy,
    .squared_dist = k_squared_dist,
    .sqrt_arr = k_sqrt_arr,
    .masked_sum = k_masked_sum,
    .masked_sum_sq_diff = k_masked_sum_sq_diff,
    .matvec = k_matvec,
    .matvec_t_acc = k_matvec_t_acc,
    .adam_update = k_adam_update,
};

} // namespace stkit::kernels

#endif // STKIT_HAVE_AVX2
