#pragma once

// Plain-text syntax for function models. Printing with to_string and parsing
// with parse_model round-trip.
//
//   expr   := rat(poly[;poly])            num/den
//           | pow(coef;coef)              c * x^beta
//           | exp(expr)
//           | sum(expr;expr;...)
//           | prod(expr;expr;...)
//           | scale(coef;expr)            expr^p
//           | pw(b1,b2,...;rat;rat;...)   piecewise rational, breakpoints increasing
//           | diff(n;expr)                n-th derivative, evaluated lazily
//   coef   := rational | ~decimal | cospi(rational) | sinpi(rational)
//             (cospi/sinpi are exact where the value is rational)
//   poly   := terms in x such as 3/2*x^2-x+1
//
// A rational is an integer, a fraction a/b or an exact decimal (1.25, 2e-3).
// '~' marks an inexact (high precision float) coefficient.

#include <cctype>
#include <string>
#include <string_view>

#include "stieltjesk/funcmodel.hpp"

namespace stieltjesk {

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

class ModelParser {
public:
    explicit ModelParser(std::string_view text) : s_(text) {}

    Model parse_all() {
        Model m = expr();
        skip();
        if (pos_ != s_.size()) fail("trailing input");
        return m;
    }

    QPoly poly_all() {
        QPoly p = poly();
        skip();
        if (pos_ != s_.size()) fail("trailing input");
        return p;
    }

    Coef coef_all() {
        Coef c = coef();
        skip();
        if (pos_ != s_.size()) fail("trailing input");
        return c;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("parse error at offset " + std::to_string(pos_) + ": " + what + " in '" + std::string(s_) +
                         "'");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string ident() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    bool digit_at(std::size_t i) const { return i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i])); }

    /// Unsigned decimal with optional exponent.
    void scan_decimal() {
        const std::size_t start = pos_;
        while (digit_at(pos_)) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (digit_at(pos_)) ++pos_;
        }
        if (pos_ == start) fail("expected a number");
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
            if (digit_at(q)) {
                pos_ = q;
                while (digit_at(pos_)) ++pos_;
            }
        }
    }

    Rational rational() {
        skip();
        const std::size_t start = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        scan_decimal();
        if (pos_ < s_.size() && s_[pos_] == '/') {
            ++pos_;
            scan_decimal();
        }
        try {
            return parse_rational(s_.substr(start, pos_ - start));
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }

    Coef coef() {
        skip();
        if (accept('~')) {
            skip();
            const std::size_t start = pos_;
            if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
            scan_decimal();
            return Coef::real(HighReal(std::string(s_.substr(start, pos_ - start))));
        }
        if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
            const std::string name = ident();
            expect('(');
            const Rational r = rational();
            expect(')');
            if (name == "cospi") return cospi_coef(r);
            if (name == "sinpi") return sinpi_coef(r);
            fail("unknown coefficient function '" + name + "'");
        }
        return Coef(rational());
    }

    int integer() {
        const Rational r = rational();
        if (r.get_den() != 1 || !r.get_num().fits_sint_p()) fail("expected an integer");
        return static_cast<int>(r.get_num().get_si());
    }

    /// One monomial: [coef[*]] [x[^n]].
    QPoly term() {
        skip();
        Rational c(1);
        bool have_coef = false;
        if (pos_ < s_.size() && (digit_at(pos_) || s_[pos_] == '.')) {
            c = rational();
            have_coef = true;
            if (!accept('*')) return QPoly::constant(c);
        }
        skip();
        if (pos_ < s_.size() && s_[pos_] == 'x') {
            ++pos_;
            int e = 1;
            if (accept('^')) e = integer();
            if (e < 0) fail("negative power in a polynomial");
            return QPoly::monomial(c, e);
        }
        if (have_coef) fail("expected 'x' after '*'");
        fail("expected a polynomial term");
    }

    QPoly poly() {
        QPoly p;
        bool first = true;
        for (;;) {
            int sign = 1;
            if (accept('-')) sign = -1;
            else if (!first && !accept('+')) break;
            else if (first) accept('+');
            p += term() * Rational(sign);
            first = false;
        }
        return p;
    }

    Model rat_body() {
        const QPoly num = poly();
        QPoly den = QPoly::constant(Rational(1));
        if (accept(';')) den = poly();
        if (den.is_zero()) fail("zero denominator");
        return model::rat(RationalFn(num, den));
    }

    std::vector<Model> expr_list() {
        std::vector<Model> v{expr()};
        while (accept(';')) v.push_back(expr());
        return v;
    }

    Model expr() {
        const std::size_t at = pos_;
        const std::string name = ident();
        if (name.empty()) fail("expected an expression");
        expect('(');
        Model out;
        if (name == "rat") {
            out = rat_body();
        } else if (name == "pow") {
            const Coef c = coef();
            expect(';');
            const Coef beta = coef();
            out = model::power(c, beta);
        } else if (name == "exp") {
            out = model::exp_of(expr());
        } else if (name == "sum") {
            out = model::sum(expr_list());
        } else if (name == "prod") {
            out = model::product(expr_list());
        } else if (name == "scale") {
            const Coef p = coef();
            expect(';');
            out = model::scale(p, expr());
        } else if (name == "pw") {
            std::vector<Rational> bps{rational()};
            while (accept(',')) bps.push_back(rational());
            std::vector<RationalFn> pieces;
            while (accept(';')) {
                const Model piece = expr();
                if (piece->kind != NodeKind::Rat) fail("pw pieces must be rat(...)");
                pieces.push_back(piece->rat);
            }
            try {
                out = model::piecewise(PiecewiseRationalFn(bps, pieces));
            } catch (const std::exception& e) {
                pos_ = at;
                fail(e.what());
            }
        } else if (name == "diff") {
            const int n = integer();
            if (n < 0) fail("negative derivative order");
            expect(';');
            out = model::lazy_derivative(expr(), n);
        } else {
            pos_ = at;
            fail("unknown constructor '" + name + "'");
        }
        expect(')');
        return out;
    }
};

}  // namespace detail

inline Model parse_model(std::string_view text) { return detail::ModelParser(text).parse_all(); }
inline QPoly parse_poly(std::string_view text) { return detail::ModelParser(text).poly_all(); }
inline Coef parse_coef(std::string_view text) { return detail::ModelParser(text).coef_all(); }

}  // namespace stieltjesk
