#include "freeconv/linearize.hpp"

#include <random>
#include <stdexcept>

namespace freeconv {

PolyMatrix::PolyMatrix(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows * cols)) {}

NCPolynomial& PolyMatrix::operator()(Eigen::Index i, Eigen::Index j) {
    return entries_[static_cast<std::size_t>(i * cols_ + j)];
}

const NCPolynomial& PolyMatrix::operator()(Eigen::Index i, Eigen::Index j) const {
    return entries_[static_cast<std::size_t>(i * cols_ + j)];
}

PolyMatrix PolyMatrix::adjoint() const {
    PolyMatrix out(cols_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i)
        for (Eigen::Index j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j).adjoint();
    return out;
}

PolyMatrix PolyMatrix::block(Eigen::Index i, Eigen::Index j, Eigen::Index p,
                             Eigen::Index q) const {
    PolyMatrix out(p, q);
    for (Eigen::Index a = 0; a < p; ++a)
        for (Eigen::Index b = 0; b < q; ++b) out(a, b) = (*this)(i + a, j + b);
    return out;
}

MatrixXcd PolyMatrix::evaluate(const std::map<int, MatrixXcd>& assignment, Eigen::Index n) const {
    MatrixXcd out(rows_ * n, cols_ * n);
    for (Eigen::Index i = 0; i < rows_; ++i)
        for (Eigen::Index j = 0; j < cols_; ++j)
            out.block(i * n, j * n, n, n) = (*this)(i, j).evaluate(assignment, n);
    return out;
}

namespace {

struct MonomialBlock {
    // One summand of q: u-segment, v-segment, and bidiagonal Q block.
    std::vector<NCPolynomial> u;
    std::vector<NCPolynomial> v;
    PolyMatrix q;
};

MonomialBlock linearize_monomial(const Word& w, Complex coeff) {
    MonomialBlock blk;
    int d = static_cast<int>(w.size());
    if (d <= 1) {
        // degree-1 and constant terms: 1x1 block, u carries the term
        blk.u = {NCPolynomial::monomial(w, coeff)};
        blk.v = {NCPolynomial(Complex{1.0})};
        blk.q = PolyMatrix(1, 1);
        blk.q(0, 0) = NCPolynomial(Complex{-1.0});
        return blk;
    }
    Eigen::Index k = d - 1;
    blk.u.assign(static_cast<std::size_t>(k), NCPolynomial());
    blk.v.assign(static_cast<std::size_t>(k), NCPolynomial());
    blk.u[0] = NCPolynomial::monomial(Word{w[0]}, coeff);
    blk.v[static_cast<std::size_t>(k - 1)] = NCPolynomial::monomial(Word{w.back()});
    blk.q = PolyMatrix(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        blk.q(i, i) = NCPolynomial(Complex{-1.0});
        if (i + 1 < k)
            blk.q(i, i + 1) = NCPolynomial::monomial(Word{w[static_cast<std::size_t>(i + 1)]});
    }
    return blk;
}

}  // namespace

Linearization linearize(const NCPolynomial& p) {
    if (!p.is_selfadjoint()) throw std::invalid_argument("linearize: polynomial not selfadjoint");

    // Split p = q + q*: self-reversed words contribute half their
    // coefficient to q, each reversal pair contributes the full
    // coefficient of its lexicographically smaller word.
    NCPolynomial q;
    for (const auto& [w, c] : p.terms()) {
        Word rev = reversed(w);
        if (rev == w)
            q.add_term(w, c / 2.0);
        else if (w < rev)
            q.add_term(w, c);
    }
    std::vector<MonomialBlock> blocks;
    if (q.is_zero()) {
        blocks.push_back(linearize_monomial(Word{}, Complex{0.0}));
    } else {
        for (const auto& [w, c] : q.terms()) blocks.push_back(linearize_monomial(w, c));
    }

    Eigen::Index total = 0;
    for (const auto& b : blocks) total += b.q.rows();

    // q = -u Q^{-1} v with concatenated u, stacked v, block-diagonal Q;
    // symmetrization then gives phat = [[0, u, v*],[u*, 0, Q*],[v, Q, 0]].
    Linearization lin;
    lin.size = 1 + 2 * total;
    lin.phat = PolyMatrix(lin.size, lin.size);
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
        Eigen::Index k = b.q.rows();
        for (Eigen::Index i = 0; i < k; ++i) {
            lin.phat(0, 1 + off + i) = b.u[static_cast<std::size_t>(i)];
            lin.phat(1 + off + i, 0) = b.u[static_cast<std::size_t>(i)].adjoint();
            lin.phat(0, 1 + total + off + i) = b.v[static_cast<std::size_t>(i)].adjoint();
            lin.phat(1 + total + off + i, 0) = b.v[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < k; ++j) {
                lin.phat(1 + off + i, 1 + total + off + j) = b.q(j, i).adjoint();
                lin.phat(1 + total + off + i, 1 + off + j) = b.q(i, j);
            }
        }
        off += k;
    }
    return lin;
}

MatrixXcd random_selfadjoint(Eigen::Index n, unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex{gauss(rng), gauss(rng)};
    MatrixXcd h = (a + a.adjoint()) / 2.0;
    return h;
}

namespace {

std::map<int, MatrixXcd> random_assignment(const NCPolynomial& p, Eigen::Index n,
                                           unsigned long seed) {
    std::map<int, MatrixXcd> assignment;
    for (int var : p.variables())
        assignment[var] = random_selfadjoint(n, seed + 0x9e3779b9UL * static_cast<unsigned long>(var + 1));
    return assignment;
}

double operator_norm(const MatrixXcd& m) {
    return m.jacobiSvd().singularValues()(0);
}

}  // namespace

double verify_linearization(const NCPolynomial& p, const Linearization& lin, int trials,
                            Eigen::Index matrix_size, unsigned long seed) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto assignment = random_assignment(p, matrix_size, seed + 1000003UL * static_cast<unsigned long>(t));
        MatrixXcd pm = p.evaluate(assignment, matrix_size);
        MatrixXcd um = lin.u().evaluate(assignment, matrix_size);
        MatrixXcd vm = lin.v().evaluate(assignment, matrix_size);
        MatrixXcd qm = lin.q().evaluate(assignment, matrix_size);
        MatrixXcd residual = pm + um * qm.partialPivLu().solve(vm);
        worst = std::max(worst, operator_norm(residual));
    }
    return worst;
}

double schur_resolvent_check(const NCPolynomial& p, const Linearization& lin, Complex z,
                             int trials, Eigen::Index matrix_size, unsigned long seed) {
    if (z.imag() <= 0) throw std::invalid_argument("schur_resolvent_check: Im z must be positive");
    Eigen::Index n = matrix_size;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto assignment = random_assignment(p, n, seed + 7777UL * static_cast<unsigned long>(t));
        MatrixXcd phat = lin.phat.evaluate(assignment, n);
        MatrixXcd lambda = MatrixXcd::Zero(lin.size * n, lin.size * n);
        lambda.block(0, 0, n, n) = z * MatrixXcd::Identity(n, n);
        MatrixXcd inv_big = (lambda - phat).partialPivLu().inverse();
        MatrixXcd inv_small =
            (z * MatrixXcd::Identity(n, n) - p.evaluate(assignment, n)).partialPivLu().inverse();
        worst = std::max(worst, operator_norm(inv_big.block(0, 0, n, n) - inv_small));
    }
    return worst;
}

PencilCoefficients decompose(const Linearization& lin) {
    PencilCoefficients out;
    Eigen::Index nsz = lin.size;
    out.b0 = MatrixXcd::Zero(nsz, nsz);
    for (Eigen::Index i = 0; i < nsz; ++i)
        for (Eigen::Index j = 0; j < nsz; ++j) {
            const NCPolynomial& e = lin.phat(i, j);
            if (e.degree() > 1)
                throw std::logic_error("linearization entry of degree > 1");
            for (const auto& [w, c] : e.terms()) {
                if (w.empty()) {
                    out.b0(i, j) = c;
                } else {
                    auto it = out.a.find(w[0]);
                    if (it == out.a.end())
                        it = out.a.emplace(w[0], MatrixXcd::Zero(nsz, nsz)).first;
                    it->second(i, j) = c;
                }
            }
        }
    return out;
}

PolyMatrix reassemble(const PencilCoefficients& coeffs) {
    Eigen::Index nsz = coeffs.b0.rows();
    PolyMatrix out(nsz, nsz);
    for (Eigen::Index i = 0; i < nsz; ++i)
        for (Eigen::Index j = 0; j < nsz; ++j) {
            if (coeffs.b0(i, j) != Complex{0.0}) out(i, j).add_term(Word{}, coeffs.b0(i, j));
            for (const auto& [var, a] : coeffs.a)
                if (a(i, j) != Complex{0.0}) out(i, j).add_term(Word{var}, a(i, j));
        }
    return out;
}

MatrixXcd kronecker(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace freeconv
