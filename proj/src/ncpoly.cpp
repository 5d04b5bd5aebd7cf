#include "freeconv/ncpoly.hpp"

#include <cctype>
#include <sstream>

#include <nlohmann/json.hpp>

namespace freeconv {

int SymbolTable::intern(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
}

int SymbolTable::lookup(const std::string& name) const {
    auto it = ids_.find(name);
    return it == ids_.end() ? -1 : it->second;
}

const std::string& SymbolTable::name(int id) const {
    return names_.at(static_cast<std::size_t>(id));
}

Word reversed(const Word& w) { return Word(w.rbegin(), w.rend()); }

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}

NCPolynomial::NCPolynomial(Complex constant) {
    add_term(Word{}, constant);
}

NCPolynomial NCPolynomial::monomial(Word w, Complex coeff) {
    NCPolynomial p;
    p.add_term(std::move(w), coeff);
    return p;
}

Complex NCPolynomial::coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Complex{0.0} : it->second;
}

int NCPolynomial::degree() const {
    int d = 0;
    for (const auto& [w, c] : terms_) d = std::max<int>(d, static_cast<int>(w.size()));
    return d;
}

std::vector<int> NCPolynomial::variables() const {
    std::vector<int> vars;
    for (const auto& [w, c] : terms_)
        for (int v : w)
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    return vars;
}

void NCPolynomial::add_term(const Word& w, Complex coeff) {
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        if (std::abs(coeff) >= kCoeffTol) terms_.emplace(w, coeff);
        return;
    }
    it->second += coeff;
    if (std::abs(it->second) < kCoeffTol) terms_.erase(it);
}

NCPolynomial NCPolynomial::operator+(const NCPolynomial& rhs) const {
    NCPolynomial out = *this;
    for (const auto& [w, c] : rhs.terms_) out.add_term(w, c);
    return out;
}

NCPolynomial NCPolynomial::operator-(const NCPolynomial& rhs) const {
    NCPolynomial out = *this;
    for (const auto& [w, c] : rhs.terms_) out.add_term(w, -c);
    return out;
}

NCPolynomial NCPolynomial::operator*(const NCPolynomial& rhs) const {
    NCPolynomial out;
    for (const auto& [wa, ca] : terms_)
        for (const auto& [wb, cb] : rhs.terms_) {
            Word w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            out.add_term(w, ca * cb);
        }
    return out;
}

NCPolynomial NCPolynomial::operator*(Complex scalar) const {
    NCPolynomial out;
    for (const auto& [w, c] : terms_) out.add_term(w, c * scalar);
    return out;
}

NCPolynomial NCPolynomial::operator-() const { return *this * Complex{-1.0}; }

NCPolynomial NCPolynomial::adjoint() const {
    NCPolynomial out;
    for (const auto& [w, c] : terms_) out.add_term(reversed(w), std::conj(c));
    return out;
}

bool NCPolynomial::is_selfadjoint(double tol) const {
    const NCPolynomial adj = adjoint();
    for (const auto& [w, c] : terms_)
        if (std::abs(c - adj.coefficient(w)) > tol) return false;
    for (const auto& [w, c] : adj.terms_)
        if (std::abs(c - coefficient(w)) > tol) return false;
    return true;
}

MatrixXcd NCPolynomial::evaluate(const std::map<int, MatrixXcd>& assignment,
                                 Eigen::Index n) const {
    for (const auto& [var, m] : assignment)
        if (m.rows() != n || m.cols() != n)
            throw std::invalid_argument("matrix for variable id " + std::to_string(var) +
                                        " is not " + std::to_string(n) + "x" + std::to_string(n));
    MatrixXcd result = MatrixXcd::Zero(n, n);
    for (const auto& [w, c] : terms_) {
        MatrixXcd prod = MatrixXcd::Identity(n, n);
        for (int var : w) {
            auto it = assignment.find(var);
            if (it == assignment.end())
                throw std::invalid_argument("no matrix assigned to variable id " +
                                            std::to_string(var));
            prod = prod * it->second;
        }
        result += c * prod;
    }
    return result;
}

std::string NCPolynomial::to_string(const SymbolTable& symbols) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [w, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (c.imag() != 0.0)
            os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
        else if (c.real() != 1.0 || w.empty())
            os << c.real();
        bool star = (c.imag() != 0.0 || c.real() != 1.0 || w.empty());
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (star || i > 0) os << "*";
            os << symbols.name(w[i]);
            star = true;
        }
    }
    return os.str();
}

namespace {

// Recursive-descent parser over the grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := '-' factor | base ('^' integer)?
//   base   := identifier | number | '(' expr ')'
class Parser {
public:
    Parser(const std::string& text, SymbolTable& symbols) : text_(text), symbols_(symbols) {}

    NCPolynomial run() {
        NCPolynomial p = expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected character", pos_);
        return p;
    }

private:
    NCPolynomial expr() {
        NCPolynomial p = term();
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                p = p + term();
            } else if (peek() == '-') {
                ++pos_;
                p = p - term();
            } else {
                return p;
            }
        }
    }

    NCPolynomial term() {
        NCPolynomial p = factor();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                p = p * factor();
            } else {
                return p;
            }
        }
    }

    NCPolynomial factor() {
        skip_ws();
        if (peek() == '-') {
            ++pos_;
            return -factor();
        }
        NCPolynomial b = base();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            std::size_t at = pos_;
            long k = integer();
            if (k < 0) throw ParseError("negative exponent", at);
            NCPolynomial p{Complex{1.0}};
            for (long i = 0; i < k; ++i) p = p * b;
            return p;
        }
        return b;
    }

    NCPolynomial base() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            NCPolynomial p = expr();
            skip_ws();
            if (peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            return p;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            int id = symbols_.intern(text_.substr(start, pos_ - start));
            return NCPolynomial::monomial(Word{id});
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                ++pos_;
            // exponent part of a decimal literal, e.g. 1e-3
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                std::size_t save = pos_;
                ++pos_;
                if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
                if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    while (pos_ < text_.size() &&
                           std::isdigit(static_cast<unsigned char>(text_[pos_])))
                        ++pos_;
                } else {
                    pos_ = save;
                }
            }
            double v = std::stod(text_.substr(start, pos_ - start));
            return NCPolynomial{Complex{v}};
        }
        throw ParseError(pos_ >= text_.size() ? "unexpected end of input" : "unexpected character",
                         pos_);
    }

    long integer() {
        skip_ws();
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            ++pos_;
        }
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw ParseError("expected integer exponent", pos_);
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.')
            throw ParseError("non-integer exponent", start);
        long v = std::stol(text_.substr(start, pos_ - start));
        return neg ? -v : v;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    const std::string& text_;
    SymbolTable& symbols_;
    std::size_t pos_ = 0;
};

std::string word_key(const Word& w, const SymbolTable& symbols) {
    if (w.empty()) return "1";
    std::string key;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i > 0) key += '.';
        key += symbols.name(w[i]);
    }
    return key;
}

}  // namespace

NCPolynomial parse_polynomial(const std::string& text, SymbolTable& symbols) {
    return Parser(text, symbols).run();
}

std::string polynomial_to_json(const NCPolynomial& p, const SymbolTable& symbols) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [w, c] : p.terms())
        j[word_key(w, symbols)] = {c.real(), c.imag()};
    return j.dump();
}

NCPolynomial polynomial_from_json(const std::string& json_text, SymbolTable& symbols) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    NCPolynomial p;
    for (auto it = j.begin(); it != j.end(); ++it) {
        Word w;
        if (it.key() != "1") {
            std::istringstream is(it.key());
            std::string part;
            while (std::getline(is, part, '.')) w.push_back(symbols.intern(part));
        }
        p.add_term(w, Complex{it.value().at(0).get<double>(), it.value().at(1).get<double>()});
    }
    return p;
}

}  // namespace freeconv
