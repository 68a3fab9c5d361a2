#include "stkit/solver.hpp"

#include "stkit/common.hpp"

#include <cmath>
#include <utility>

namespace stkit::solver {

namespace {

inline double& at(std::vector<double>& a, size_t n, size_t i, size_t j) {
    return a[i * n + j];
}
inline double at(const std::vector<double>& a, size_t n, size_t i, size_t j) {
    return a[i * n + j];
}

// swap rows/columns r and s of the lower triangle, restricted to the trailing
// submatrix starting at column k: earlier multiplier columns stay in place and
// the solver replays the per-step interchanges instead
void sym_swap(std::vector<double>& a, size_t n, size_t k, size_t r, size_t s) {
    for (size_t j = k; j < r; ++j) std::swap(at(a, n, r, j), at(a, n, s, j));
    for (size_t i = r + 1; i < s; ++i) std::swap(at(a, n, i, r), at(a, n, s, i));
    for (size_t i = s + 1; i < n; ++i) std::swap(at(a, n, i, r), at(a, n, i, s));
    std::swap(at(a, n, r, r), at(a, n, s, s));
}

} // namespace

LdltFactor LdltFactor::compute(std::vector<double> a, size_t n) {
    require(a.size() == n * n, "LdltFactor: matrix size mismatch");
    require(n > 0, "LdltFactor: empty matrix");

    // mirror the lower triangle so the input's upper half is irrelevant
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) at(a, n, i, j) = at(a, n, j, i);

    static const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;

    LdltFactor f;
    f.n_ = n;
    f.steps_.reserve(n);

    size_t k = 0;
    while (k < n) {
        const double absakk = std::fabs(at(a, n, k, k));

        size_t imax = k;
        double colmax = 0.0;
        for (size_t i = k + 1; i < n; ++i) {
            const double v = std::fabs(at(a, n, i, k));
            if (v > colmax) {
                colmax = v;
                imax = i;
            }
        }

        if (absakk == 0.0 && colmax == 0.0)
            throw Error::runtime("singular system: zero pivot column");

        size_t kp = k;
        uint8_t block = 1;
        if (absakk < alpha * colmax) {
            double rowmax = 0.0;
            for (size_t j = k; j < n; ++j) {
                if (j == imax) continue;
                const double v = (j < imax) ? std::fabs(at(a, n, imax, j))
                                            : std::fabs(at(a, n, j, imax));
                if (v > rowmax) rowmax = v;
            }
            if (absakk * rowmax >= alpha * colmax * colmax) {
                kp = k;
            } else if (std::fabs(at(a, n, imax, imax)) >= alpha * rowmax) {
                kp = imax;
            } else {
                kp = imax;
                block = 2;
            }
        }

        if (block == 1) {
            if (kp != k) sym_swap(a, n, k, k, kp);
            const double d = at(a, n, k, k);
            if (d == 0.0) throw Error::runtime("singular system: zero 1x1 pivot");
            // column-wise trailing update keeps the original column k intact
            // until the multipliers are written last
            for (size_t j = k + 1; j < n; ++j) {
                const double fj = at(a, n, j, k) / d;
                if (fj != 0.0)
                    for (size_t i = j; i < n; ++i) at(a, n, i, j) -= at(a, n, i, k) * fj;
            }
            for (size_t i = k + 1; i < n; ++i) at(a, n, i, k) /= d;
            f.steps_.push_back({static_cast<uint32_t>(k), static_cast<uint32_t>(kp), 1});
            ++k;
        } else {
            if (kp != k + 1) sym_swap(a, n, k, k + 1, kp);
            const double d11 = at(a, n, k, k);
            const double d21 = at(a, n, k + 1, k);
            const double d22 = at(a, n, k + 1, k + 1);
            const double det = d11 * d22 - d21 * d21;
            if (det == 0.0) throw Error::runtime("singular system: zero 2x2 pivot");
            for (size_t j = k + 2; j < n; ++j) {
                const double wj1 = at(a, n, j, k);
                const double wj2 = at(a, n, j, k + 1);
                const double l1 = (d22 * wj1 - d21 * wj2) / det;
                const double l2 = (d11 * wj2 - d21 * wj1) / det;
                for (size_t i = j; i < n; ++i)
                    at(a, n, i, j) -= at(a, n, i, k) * l1 + at(a, n, i, k + 1) * l2;
            }
            for (size_t i = k + 2; i < n; ++i) {
                const double w1 = at(a, n, i, k);
                const double w2 = at(a, n, i, k + 1);
                at(a, n, i, k) = (d22 * w1 - d21 * w2) / det;
                at(a, n, i, k + 1) = (d11 * w2 - d21 * w1) / det;
            }
            f.steps_.push_back({static_cast<uint32_t>(k), static_cast<uint32_t>(kp), 2});
            k += 2;
        }
    }

    f.a_ = std::move(a);
    return f;
}

void LdltFactor::solve_in_place(std::vector<double>& b) const {
    require(b.size() == n_, "LdltFactor::solve: rhs size mismatch");
    const auto& a = a_;
    const size_t n = n_;

    // forward: apply permutations and L
    for (const Step& s : steps_) {
        const size_t k = s.k;
        if (s.block == 1) {
            if (s.swap != k) std::swap(b[k], b[s.swap]);
            const double bk = b[k];
            for (size_t i = k + 1; i < n; ++i) b[i] -= at(a, n, i, k) * bk;
        } else {
            if (s.swap != k + 1) std::swap(b[k + 1], b[s.swap]);
            const double bk = b[k];
            const double bk1 = b[k + 1];
            for (size_t i = k + 2; i < n; ++i)
                b[i] -= at(a, n, i, k) * bk + at(a, n, i, k + 1) * bk1;
        }
    }

    // block-diagonal solve
    for (const Step& s : steps_) {
        const size_t k = s.k;
        if (s.block == 1) {
            b[k] /= at(a, n, k, k);
        } else {
            const double d11 = at(a, n, k, k);
            const double d21 = at(a, n, k + 1, k);
            const double d22 = at(a, n, k + 1, k + 1);
            const double det = d11 * d22 - d21 * d21;
            const double z1 = b[k];
            const double z2 = b[k + 1];
            b[k] = (d22 * z1 - d21 * z2) / det;
            b[k + 1] = (d11 * z2 - d21 * z1) / det;
        }
    }

    // backward: L^T and inverse permutations
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
        const Step& s = *it;
        const size_t k = s.k;
        if (s.block == 1) {
            double acc = 0.0;
            for (size_t i = k + 1; i < n; ++i) acc += at(a, n, i, k) * b[i];
            b[k] -= acc;
            if (s.swap != k) std::swap(b[k], b[s.swap]);
        } else {
            double acc0 = 0.0, acc1 = 0.0;
            for (size_t i = k + 2; i < n; ++i) {
                acc0 += at(a, n, i, k) * b[i];
                acc1 += at(a, n, i, k + 1) * b[i];
            }
            b[k] -= acc0;
            b[k + 1] -= acc1;
            if (s.swap != k + 1) std::swap(b[k + 1], b[s.swap]);
        }
    }
}

std::vector<double> LdltFactor::solve(const std::vector<double>& b) const {
    std::vector<double> x = b;
    solve_in_place(x);
    return x;
}

CholFactor CholFactor::compute(std::vector<double> a, size_t n) {
    require(a.size() == n * n, "CholFactor: matrix size mismatch");
    require(n > 0, "CholFactor: empty matrix");

    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double s = at(a, n, i, j);
            for (size_t p = 0; p < j; ++p) s -= at(a, n, i, p) * at(a, n, j, p);
            if (i == j) {
                if (s <= 0.0)
                    throw Error::runtime("matrix not positive definite");
                at(a, n, i, i) = std::sqrt(s);
            } else {
                at(a, n, i, j) = s / at(a, n, j, j);
            }
        }
        for (size_t j = i + 1; j < n; ++j) at(a, n, i, j) = 0.0;
    }

    CholFactor f;
    f.n_ = n;
    f.a_ = std::move(a);
    return f;
}

void CholFactor::solve_in_place(std::vector<double>& b) const {
    require(b.size() == n_, "CholFactor::solve: rhs size mismatch");
    const auto& a = a_;
    const size_t n = n_;
    for (size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (size_t j = 0; j < i; ++j) s -= at(a, n, i, j) * b[j];
        b[i] = s / at(a, n, i, i);
    }
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= at(a, n, j, i) * b[j];
        b[i] = s / at(a, n, i, i);
    }
}

std::vector<double> CholFactor::solve(const std::vector<double>& b) const {
    std::vector<double> x = b;
    solve_in_place(x);
    return x;
}

std::vector<double> CholFactor::lower_mul(const std::vector<double>& x) const {
    require(x.size() == n_, "CholFactor::lower_mul: size mismatch");
    std::vector<double> y(n_, 0.0);
    for (size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (size_t j = 0; j <= i; ++j) s += at(a_, n_, i, j) * x[j];
        y[i] = s;
    }
    return y;
}

} // namespace stkit::solver
