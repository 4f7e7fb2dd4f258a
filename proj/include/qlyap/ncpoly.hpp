#pragma once

// Exact noncommutative polynomials over the two symbols {A, B} with rational
// coefficients. Words are kept in a std::map, so the stored form is canonical:
// lexicographically ordered words, no zero coefficients.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qlyap/errors.hpp"
#include "qlyap/linalg.hpp"

namespace qlyap {

using Rational = boost::multiprecision::cpp_rational;

enum class Symbol : char { A = 'A', B = 'B' };

using Word = std::vector<Symbol>;

/// Default maximal word length. Products exceeding it raise DegreeOverflow.
inline constexpr std::size_t kDefaultDegreeCap = 16;

class NCPoly {
public:
    using Terms = std::map<Word, Rational>;

    NCPoly() = default;

    static NCPoly constant(const Rational& c) { return monomial({}, c); }
    static NCPoly symbol(Symbol s) { return monomial({s}, 1); }
    static NCPoly monomial(Word w, const Rational& c) {
        NCPoly p;
        p.add_term(std::move(w), c);
        return p;
    }
    /// Convenience: c * s^k.
    static NCPoly power(Symbol s, std::size_t k, const Rational& c = 1) {
        return monomial(Word(k, s), c);
    }

    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }

    /// Total degree; -1 for the zero polynomial.
    [[nodiscard]] int degree() const {
        int d = -1;
        for (const auto& [w, c] : terms_) d = std::max(d, static_cast<int>(w.size()));
        return d;
    }

    [[nodiscard]] int degree_in(Symbol s) const {
        int d = -1;
        for (const auto& [w, c] : terms_) {
            d = std::max(d, static_cast<int>(std::count(w.begin(), w.end(), s)));
        }
        return d;
    }

    [[nodiscard]] bool contains(Symbol s) const {
        return std::any_of(terms_.begin(), terms_.end(), [s](const auto& t) {
            return std::find(t.first.begin(), t.first.end(), s) != t.first.end();
        });
    }

    [[nodiscard]] Rational coefficient(const Word& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(Word w, const Rational& c) {
        if (w.size() > kDefaultDegreeCap) {
            throw DegreeOverflow("word of length " + std::to_string(w.size()) + " exceeds cap " +
                                 std::to_string(kDefaultDegreeCap));
        }
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(std::move(w), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    NCPoly& operator+=(const NCPoly& o) {
        for (const auto& [w, c] : o.terms_) add_term(w, c);
        return *this;
    }
    NCPoly& operator-=(const NCPoly& o) {
        for (const auto& [w, c] : o.terms_) add_term(w, -c);
        return *this;
    }
    NCPoly& operator*=(const Rational& k) {
        if (k == 0) {
            terms_.clear();
        } else {
            for (auto& [w, c] : terms_) c *= k;
        }
        return *this;
    }

    friend NCPoly operator+(NCPoly a, const NCPoly& b) { return a += b; }
    friend NCPoly operator-(NCPoly a, const NCPoly& b) { return a -= b; }
    friend NCPoly operator-(NCPoly a) { return a *= Rational(-1); }
    friend NCPoly operator*(NCPoly a, const Rational& k) { return a *= k; }
    friend NCPoly operator*(const Rational& k, NCPoly a) { return a *= k; }
    friend NCPoly operator*(const NCPoly& f, const NCPoly& g) { return multiply(f, g); }
    friend bool operator==(const NCPoly& a, const NCPoly& b) { return a.terms_ == b.terms_; }

    /// Word concatenation with coefficient products; throws DegreeOverflow if
    /// any product word is longer than `cap`.
    static NCPoly multiply(const NCPoly& f, const NCPoly& g, std::size_t cap = kDefaultDegreeCap) {
        NCPoly out;
        for (const auto& [u, a] : f.terms_) {
            for (const auto& [v, b] : g.terms_) {
                if (u.size() + v.size() > cap) {
                    throw DegreeOverflow("product degree " + std::to_string(u.size() + v.size()) +
                                         " exceeds cap " + std::to_string(cap));
                }
                Word w;
                w.reserve(u.size() + v.size());
                w.insert(w.end(), u.begin(), u.end());
                w.insert(w.end(), v.begin(), v.end());
                out.add_term(std::move(w), a * b);
            }
        }
        return out;
    }

    /// Text form, e.g. "3/2 A B A - 1 B". The zero polynomial prints as "0".
    [[nodiscard]] std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [w, c] : terms_) {
            const bool negative = c < 0;
            if (first) {
                if (negative) out += "-";
            } else {
                out += negative ? " - " : " + ";
            }
            out += (negative ? Rational(-c) : c).str();
            for (Symbol s : w) {
                out += ' ';
                out += static_cast<char>(s);
            }
            first = false;
        }
        return out;
    }

    /// Parses the text form. Accepts '+', '-' and U+2212 as signs; a term is an
    /// optional coefficient (integer or p/q) followed by symbols, with
    /// juxtaposition denoting the product.
    static NCPoly parse(std::string_view text);

private:
    Terms terms_;
};

inline NCPoly NCPoly::parse(std::string_view text) {
    NCPoly out;
    std::size_t i = 0;
    const auto skip_space = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    const auto read_sign = [&]() -> int {
        if (i < text.size() && text[i] == '+') {
            ++i;
            return 1;
        }
        if (i < text.size() && text[i] == '-') {
            ++i;
            return -1;
        }
        if (text.substr(i, 3) == "\xE2\x88\x92") {
            i += 3;
            return -1;
        }
        return 0;
    };
    const auto read_integer = [&]() -> std::string {
        const std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        return std::string(text.substr(start, i - start));
    };

    bool first = true;
    skip_space();
    if (i == text.size()) throw ParseError("empty polynomial text");
    while (true) {
        skip_space();
        if (i == text.size()) break;
        int sign = read_sign();
        if (sign == 0) {
            if (!first) throw ParseError("expected '+' or '-' at offset " + std::to_string(i));
            sign = 1;
        }
        skip_space();
        Rational coeff = 1;
        bool have_content = false;
        if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            boost::multiprecision::cpp_int num(read_integer());
            boost::multiprecision::cpp_int den = 1;
            skip_space();
            if (i < text.size() && text[i] == '/') {
                ++i;
                skip_space();
                const std::string d = read_integer();
                if (d.empty()) throw ParseError("missing denominator at offset " + std::to_string(i));
                den = boost::multiprecision::cpp_int(d);
                if (den == 0) throw ParseError("zero denominator");
            }
            coeff = Rational(num, den);
            have_content = true;
        }
        Word w;
        while (true) {
            skip_space();
            if (i < text.size() && (text[i] == 'A' || text[i] == 'B')) {
                w.push_back(static_cast<Symbol>(text[i]));
                ++i;
                have_content = true;
            } else {
                break;
            }
        }
        if (!have_content) throw ParseError("empty term at offset " + std::to_string(i));
        if (i < text.size() && !(text[i] == '+' || text[i] == '-' || text.substr(i, 3) == "\xE2\x88\x92")) {
            throw ParseError(std::string("unexpected character '") + text[i] + "' at offset " +
                             std::to_string(i));
        }
        out.add_term(std::move(w), sign * coeff);
        first = false;
    }
    return out;
}

namespace detail {

inline void require_only_a(const NCPoly& f) {
    if (f.contains(Symbol::B)) throw SymbolError("polynomial must contain only the symbol A");
}

inline Rational factorial(std::size_t n) {
    boost::multiprecision::cpp_int r = 1;
    for (std::size_t k = 2; k <= n; ++k) r *= k;
    return Rational(r);
}

}  // namespace detail

/// Coefficient g_n of s^n in f(A + sB), for f in A only.
inline NCPoly shift_coefficient(const NCPoly& f, std::size_t order) {
    detail::require_only_a(f);
    NCPoly g;
    for (const auto& [w, c] : f.terms()) {
        const std::size_t m = w.size();
        if (order > m) continue;
        for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != order) continue;
            Word v(w);
            for (std::size_t k = 0; k < m; ++k) {
                if (mask & (std::uint32_t{1} << k)) v[k] = Symbol::B;
            }
            g.add_term(std::move(v), c);
        }
    }
    return g;
}

/// [g_0, ..., g_max_order] with f(A + sB) = sum_n s^n g_n.
inline std::vector<NCPoly> nc_substitute_shift(const NCPoly& f, std::size_t max_order) {
    detail::require_only_a(f);
    std::vector<NCPoly> out;
    out.reserve(max_order + 1);
    for (std::size_t n = 0; n <= max_order; ++n) out.push_back(shift_coefficient(f, n));
    return out;
}

/// n-th differential d^n_{A->B} f = n! g_n.
inline NCPoly nc_gateaux_term(const NCPoly& f, std::size_t n) {
    return shift_coefficient(f, n) * detail::factorial(n);
}

/// Evaluates f at A := a, B := b.
inline ComplexMatrix nc_evaluate(const NCPoly& f, const ComplexMatrix& a, const ComplexMatrix& b) {
    require_square(a, "A");
    require_same_dim(a, b);
    const Eigen::Index d = a.rows();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    ComplexMatrix word_value(d, d);
    for (const auto& [w, c] : f.terms()) {
        word_value.setIdentity();
        for (Symbol s : w) word_value = word_value * (s == Symbol::A ? a : b);
        out += c.convert_to<double>() * word_value;
    }
    return out;
}

/// d(fg) - d(f) g - f d(g) with d = d^1_{A->B}; identically zero.
inline NCPoly leibniz_defect(const NCPoly& f, const NCPoly& g) {
    detail::require_only_a(f);
    detail::require_only_a(g);
    return nc_gateaux_term(f * g, 1) - nc_gateaux_term(f, 1) * g - f * nc_gateaux_term(g, 1);
}

}  // namespace qlyap
