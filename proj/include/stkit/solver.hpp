#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stkit::solver {

// Symmetric-indefinite LDL^T factorization with Bunch-Kaufman pivoting.
// Handles the augmented ordinary-kriging matrix, which has a zero diagonal
// entry in the Lagrange row and is never positive definite.
class LdltFactor {
public:
    // a: row-major symmetric n*n matrix (upper triangle ignored)
    static LdltFactor compute(std::vector<double> a, size_t n);

    void solve_in_place(std::vector<double>& b) const;
    std::vector<double> solve(const std::vector<double>& b) const;
    size_t dim() const { return n_; }

private:
    LdltFactor() = default;
    struct Step {
        uint32_t k;
        uint32_t swap;
        uint8_t block;
    };
    std::vector<double> a_;
    std::vector<Step> steps_;
    size_t n_ = 0;
};

// Cholesky factorization for symmetric positive definite matrices.
// Used for covariance sampling and ridge normal equations, not for kriging.
class CholFactor {
public:
    static CholFactor compute(std::vector<double> a, size_t n);

    void solve_in_place(std::vector<double>& b) const;
    std::vector<double> solve(const std::vector<double>& b) const;
    // y = L x, with L the lower-triangular factor
    std::vector<double> lower_mul(const std::vector<double>& x) const;
    size_t dim() const { return n_; }

private:
    CholFactor() = default;
    std::vector<double> a_;
    size_t n_ = 0;
};

} // namespace stkit::solver
