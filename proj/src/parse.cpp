// Recursive-descent parser for polynomial and form expressions.
//
//   expr    := ['+'|'-'] term (('+'|'-') term)*
//   term    := unary (('*' | '^') unary)*      '^' between covectors is wedge
//   unary   := ('+'|'-') unary | power
//   power   := primary ('^' integer)*
//   primary := number | x<i> | dx<i> | param | '(' expr ')'
//
// Values are elements of the exterior algebra with mixed form degree;
// products are wedge products.

#include "remfiber/error.hpp"
#include "remfiber/form.hpp"

#include <cctype>
#include <map>

namespace remfiber {
namespace {

struct Mixed {
    std::map<IndexSet, Polynomial> parts;

    bool pure_scalar() const {
        return parts.empty() || (parts.size() == 1 && parts.begin()->first == 0);
    }
};

class Parser {
public:
    Parser(std::string_view text, int n_vars, std::span<const std::string> params)
        : text_(text), n_vars_(n_vars), params_(params),
          n_coeff_(n_vars + static_cast<int>(params.size())) {
        if (n_vars < 1 || n_vars > 16) throw domain_error("variable count out of range");
    }

    Mixed parse() {
        Mixed v = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return v;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    char peek_after_caret() {
        std::size_t p = pos_ + 1;
        while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        return p < text_.size() ? text_[p] : '\0';
    }

    Mixed scalar(const Polynomial& f) {
        Mixed m;
        if (!f.is_zero()) m.parts.emplace(IndexSet{0}, f);
        return m;
    }

    static void accumulate(Mixed& into, IndexSet s, const Polynomial& f) {
        if (f.is_zero()) return;
        auto [it, inserted] = into.parts.try_emplace(s, f);
        if (!inserted) {
            it->second += f;
            if (it->second.is_zero()) into.parts.erase(it);
        }
    }

    static Mixed add(Mixed a, const Mixed& b, bool subtract) {
        for (const auto& [s, f] : b.parts) accumulate(a, s, subtract ? -f : f);
        return a;
    }

    static Mixed mul(const Mixed& a, const Mixed& b) {
        Mixed out;
        for (const auto& [sa, fa] : a.parts) {
            for (const auto& [sb, fb] : b.parts) {
                const int sign = wedge_sign(sa, sb);
                if (sign == 0) continue;
                Polynomial prod = fa * fb;
                accumulate(out, sa | sb, sign > 0 ? prod : -prod);
            }
        }
        return out;
    }

    Mixed expr() {
        Mixed v;
        char c = peek();
        if (c == '+' || c == '-') {
            ++pos_;
            v = term();
            if (c == '-') v = add(Mixed{}, v, true);
        } else {
            v = term();
        }
        while (true) {
            c = peek();
            if (c != '+' && c != '-') break;
            ++pos_;
            v = add(std::move(v), term(), c == '-');
        }
        return v;
    }

    Mixed term() {
        Mixed v = unary();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                v = mul(v, unary());
            } else if (c == '^' && !std::isdigit(static_cast<unsigned char>(peek_after_caret()))) {
                ++pos_;
                v = mul(v, unary());
            } else {
                break;
            }
        }
        return v;
    }

    Mixed unary() {
        char c = peek();
        if (c == '-') {
            ++pos_;
            return add(Mixed{}, unary(), true);
        }
        if (c == '+') {
            ++pos_;
            return unary();
        }
        return power();
    }

    Mixed power() {
        Mixed v = primary();
        while (peek() == '^' && std::isdigit(static_cast<unsigned char>(peek_after_caret()))) {
            ++pos_;
            skip_ws();
            const std::size_t at = pos_;
            unsigned long k = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                k = k * 10 + static_cast<unsigned long>(text_[pos_] - '0');
                if (k > 100000) throw ParseError(at, "exponent too large");
                ++pos_;
            }
            if (!v.pure_scalar()) throw ParseError(at, "power of a form of positive degree");
            Polynomial base = v.parts.empty() ? Polynomial(n_coeff_) : v.parts.begin()->second;
            v = scalar(base.pow(static_cast<unsigned>(k)));
        }
        return v;
    }

    Mixed primary() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            Mixed v = expr();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '\0') fail("unexpected end of input");
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    Mixed number() {
        const std::size_t start = pos_;
        std::string digits;
        std::string frac;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) digits += text_[pos_++];
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) frac += text_[pos_++];
        }
        if (digits.empty() && frac.empty()) throw ParseError(start, "malformed number");
        mpz_class num(digits.empty() ? std::string("0") : digits);
        mpz_class den = 1;
        for (char d : frac) {
            num = num * 10 + (d - '0');
            den *= 10;
        }
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            skip_ws();
            const std::size_t at = pos_;
            std::string dd;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) dd += text_[pos_++];
            if (dd.empty()) throw ParseError(at, "expected denominator");
            mpz_class d(dd);
            if (d == 0) throw ParseError(at, "zero denominator");
            den *= d;
        }
        Rational q(num, den);
        q.canonicalize();
        return scalar(Polynomial::constant(n_coeff_, q));
    }

    Mixed identifier() {
        const std::size_t start = pos_;
        std::string name;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            name += text_[pos_++];
        }
        for (std::size_t j = 0; j < params_.size(); ++j) {
            if (params_[j] == name) {
                return scalar(Polynomial::variable(n_coeff_, n_vars_ + static_cast<int>(j)));
            }
        }
        auto index_of = [&](std::size_t prefix) -> int {
            if (name.size() <= prefix) return -1;
            for (std::size_t i = prefix; i < name.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
            }
            if (name.size() - prefix > 4) throw ParseError(start, "variable index out of range");
            return std::stoi(name.substr(prefix));
        };
        if (name[0] == 'x') {
            const int k = index_of(1);
            if (k >= 0) {
                if (k < 1 || k > n_vars_) throw ParseError(start, "variable index out of range: " + name);
                return scalar(Polynomial::variable(n_coeff_, k - 1));
            }
        }
        if (name.size() > 2 && name[0] == 'd' && name[1] == 'x') {
            const int k = index_of(2);
            if (k >= 0) {
                if (k < 1 || k > n_vars_) throw ParseError(start, "covector index out of range: " + name);
                Mixed m;
                m.parts.emplace(IndexSet{1} << (k - 1), Polynomial::constant(n_coeff_, 1));
                return m;
            }
        }
        throw ParseError(start, "unknown identifier '" + name + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int n_vars_;
    std::span<const std::string> params_;
    int n_coeff_;
};

}  // namespace

PolyForm parse_form(std::string_view text, int n_vars, std::span<const std::string> params) {
    Parser parser(text, n_vars, params);
    Mixed v = parser.parse();
    const int n_coeff = n_vars + static_cast<int>(params.size());
    if (v.parts.empty()) return PolyForm(n_vars, 0, n_coeff);
    const int degree = set_size(v.parts.begin()->first);
    PolyForm w(n_vars, degree, n_coeff);
    for (const auto& [s, f] : v.parts) {
        if (set_size(s) != degree) throw ParseError(0, "terms of different form degree");
        w.add_component(s, f);
    }
    return w;
}

Polynomial parse_polynomial(std::string_view text, int n_vars, std::span<const std::string> params) {
    PolyForm w = parse_form(text, n_vars, params);
    if (w.degree() != 0) throw ParseError(0, "expected a polynomial, found a form of degree " +
                                                 std::to_string(w.degree()));
    return w.component(0);
}

}  // namespace remfiber
