#include "stkit/kernels.hpp"

#include <cmath>

// Reference kernels. Plain loops, one accumulator, in index order; the SIMD
// variants are tested against these.

namespace stkit::kernels {
namespace {

double k_dot(const double* a, const double* b, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double k_sum(const double* a, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double k_sum_sq_diff(const double* a, const double* b, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void k_axpy(double alpha, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void k_squared_dist(const double* xs, const double* ys, double x0, double y0,
                    double* out, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - x0;
        const double dy = ys[i] - y0;
        out[i] = dx * dx + dy * dy;
    }
}

void k_sqrt_arr(const double* in, double* out, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = std::sqrt(in[i]);
}

MaskedSum k_masked_sum(const double* a, const unsigned char* mask, size_t n) {
    MaskedSum r;
    for (size_t i = 0; i < n; ++i) {
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
    for (size_t i = 0; i < n; ++i) {
        if (mask[i]) {
            const double d = a[i] - b[i];
            r.sum += d * d;
            ++r.count;
        }
    }
    return r;
}

void k_matvec(const double* m, const double* x, double* y, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        double acc = 0.0;
        for (size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

void k_matvec_t_acc(const double* m, const double* x, double* y, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        const double xr = x[r];
        for (size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
    }
}

void k_adam_update(double* w, double* m, double* v, const double* g, size_t n,
                   double lr, double beta1, double beta2, double eps,
                   double bc1, double bc2) {
    for (size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace

const Ops scalar_ops = {
    .name = "scalar",
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
