#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace freeconv {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;

/// Maps human-readable variable names to small interned ids.
class SymbolTable {
public:
    int intern(const std::string& name);
    int lookup(const std::string& name) const;  // -1 if absent
    const std::string& name(int id) const;
    int size() const { return static_cast<int>(names_.size()); }

private:
    std::vector<std::string> names_;
    std::map<std::string, int> ids_;
};

/// A word in non-commuting symbols; the empty word is the algebra unit.
using Word = std::vector<int>;

Word reversed(const Word& w);

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t pos);
    std::size_t position;
};

/// Polynomial in non-commuting variables, kept in canonical form:
/// like words merged, zero coefficients dropped.
class NCPolynomial {
public:
    NCPolynomial() = default;
    explicit NCPolynomial(Complex constant);

    static NCPolynomial monomial(Word w, Complex coeff = 1.0);

    const std::map<Word, Complex>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Complex coefficient(const Word& w) const;

    /// Total degree of the longest word with nonzero coefficient.
    int degree() const;
    std::vector<int> variables() const;

    void add_term(const Word& w, Complex coeff);

    NCPolynomial operator+(const NCPolynomial& rhs) const;
    NCPolynomial operator-(const NCPolynomial& rhs) const;
    NCPolynomial operator*(const NCPolynomial& rhs) const;
    NCPolynomial operator*(Complex scalar) const;
    NCPolynomial operator-() const;

    bool operator==(const NCPolynomial& rhs) const { return terms_ == rhs.terms_; }

    NCPolynomial adjoint() const;
    bool is_selfadjoint(double tol = 1e-12) const;

    /// Substitutes a square matrix for every variable and multiplies in
    /// word order; the unit word maps to the identity.
    MatrixXcd evaluate(const std::map<int, MatrixXcd>& assignment, Eigen::Index n) const;

    std::string to_string(const SymbolTable& symbols) const;

private:
    // Coefficients below this modulus are treated as arithmetic noise.
    static constexpr double kCoeffTol = 1e-14;
    std::map<Word, Complex> terms_;
};

inline NCPolynomial operator*(Complex scalar, const NCPolynomial& p) { return p * scalar; }

/// Parses `identifiers, literals, + - * ^ ( )` into canonical form.
/// Juxtaposition is not multiplication; `x y` is a syntax error.
NCPolynomial parse_polynomial(const std::string& text, SymbolTable& symbols);

/// JSON object {"x.y.x": [re, im], ...}; the unit word is "1".
std::string polynomial_to_json(const NCPolynomial& p, const SymbolTable& symbols);
NCPolynomial polynomial_from_json(const std::string& json_text, SymbolTable& symbols);

}  // namespace freeconv
