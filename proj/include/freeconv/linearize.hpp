#pragma once

#include <map>
#include <vector>

#include "freeconv/ncpoly.hpp"

namespace freeconv {

/// Dense matrix with entries that are (degree <= 1) non-commutative
/// polynomials; just enough structure for the linearization blocks.
class PolyMatrix {
public:
    PolyMatrix() = default;
    PolyMatrix(Eigen::Index rows, Eigen::Index cols);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    NCPolynomial& operator()(Eigen::Index i, Eigen::Index j);
    const NCPolynomial& operator()(Eigen::Index i, Eigen::Index j) const;

    PolyMatrix adjoint() const;
    PolyMatrix block(Eigen::Index i, Eigen::Index j, Eigen::Index p, Eigen::Index q) const;

    /// Substitutes n x n matrices for the variables entrywise; result is
    /// (rows*n) x (cols*n).
    MatrixXcd evaluate(const std::map<int, MatrixXcd>& assignment, Eigen::Index n) const;

private:
    Eigen::Index rows_ = 0, cols_ = 0;
    std::vector<NCPolynomial> entries_;
};

/// Selfadjoint pencil phat = b0 (x) 1 + sum_j a_j (x) x_j with
/// phat = [[0, u],[v, Q]] and p = -u Q^{-1} v.
struct Linearization {
    Eigen::Index size = 0;  // N
    PolyMatrix phat;        // N x N, entries of degree <= 1

    PolyMatrix u() const { return phat.block(0, 1, 1, size - 1); }
    PolyMatrix v() const { return phat.block(1, 0, size - 1, 1); }
    PolyMatrix q() const { return phat.block(1, 1, size - 1, size - 1); }
};

/// Anderson-style selfadjoint linearization; requires is_selfadjoint(p).
Linearization linearize(const NCPolynomial& p);

/// Max over trials of ||p(X) + U Q^{-1} V|| with random selfadjoint
/// matrix substitutions of the given size.
double verify_linearization(const NCPolynomial& p, const Linearization& lin, int trials,
                            Eigen::Index matrix_size = 5, unsigned long seed = 20250826);

/// Compares the (1,1) block of (Lambda(z) - phat(X))^{-1} against
/// (z - p(X))^{-1}; Lambda(z) puts z in the scalar (1,1) slot.
double schur_resolvent_check(const NCPolynomial& p, const Linearization& lin, Complex z,
                             int trials, Eigen::Index matrix_size = 5,
                             unsigned long seed = 20250826);

/// Coefficient extraction: phat = b0 (x) 1 + sum_j a_j (x) x_j.
struct PencilCoefficients {
    MatrixXcd b0;
    std::map<int, MatrixXcd> a;  // variable id -> selfadjoint coefficient
};
PencilCoefficients decompose(const Linearization& lin);

/// Rebuilds the polynomial matrix from its coefficients (round trip).
PolyMatrix reassemble(const PencilCoefficients& coeffs);

MatrixXcd kronecker(const MatrixXcd& a, const MatrixXcd& b);

/// Random selfadjoint matrix with centered unit-variance entries.
MatrixXcd random_selfadjoint(Eigen::Index n, unsigned long seed);

}  // namespace freeconv
