#include "mbexit/boundary.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "mbexit/errors.hpp"

namespace mbexit {

double BoundaryTerm::eval(double t, int order) const {
    const double c = coefficient;
    const double p = parameter;
    switch (kind) {
        case TermKind::constant:
            return order == 0 ? c : 0.0;
        case TermKind::power: {
            const double base = 1.0 + t;
            switch (order) {
                case 0: return c * std::pow(base, p);
                case 1: return c * p * std::pow(base, p - 1.0);
                default: return c * p * (p - 1.0) * std::pow(base, p - 2.0);
            }
        }
        case TermKind::logarithmic: {
            const double base = 1.0 + t;
            switch (order) {
                case 0: return c * std::log1p(t);
                case 1: return c / base;
                default: return -c / (base * base);
            }
        }
        case TermKind::exponential: {
            const double e = std::exp(-p * t);
            switch (order) {
                case 0: return c * e;
                case 1: return -c * p * e;
                default: return c * p * p * e;
            }
        }
    }
    return 0.0;
}

Boundary::Boundary(std::vector<BoundaryTerm> terms, std::string source)
    : terms_(std::move(terms)), source_(std::move(source)) {
    for (const auto& term : terms_) {
        if (term.kind == TermKind::exponential && !(term.parameter > 0.0)) {
            throw RateError("exponential term needs a decay rate > 0, got " +
                            std::to_string(term.parameter));
        }
        if (!std::isfinite(term.coefficient) || !std::isfinite(term.parameter)) {
            throw DomainError("boundary term has a non-finite coefficient or parameter");
        }
    }
    const double f0 = eval(0.0, 0);
    if (!(f0 > 0.0)) {
        throw DomainError("boundary must satisfy f(0) > 0, got f(0) = " + std::to_string(f0));
    }
    if (source_.empty()) source_ = render();
}

double Boundary::eval(double t, int order) const {
    double sum = 0.0;
    for (const auto& term : terms_) sum += term.eval(t, order);
    return sum;
}

bool Boundary::is_constant() const noexcept {
    for (const auto& term : terms_) {
        if (term.kind != TermKind::constant && term.coefficient != 0.0) return false;
    }
    return true;
}

namespace {

std::string format_number(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::vector<BoundaryTerm> parse() {
        std::vector<BoundaryTerm> terms;
        skip_ws();
        double sign = 1.0;
        if (peek() == '-') {
            ++pos_;
            sign = -1.0;
        }
        terms.push_back(term(sign));
        while (true) {
            skip_ws();
            if (at_end()) break;
            const char op = peek();
            if (op != '+' && op != '-') fail("expected '+' or '-'");
            ++pos_;
            terms.push_back(term(op == '-' ? -1.0 : 1.0));
        }
        return terms;
    }

private:
    BoundaryTerm term(double sign) {
        skip_ws();
        if (starts_factor()) return factor(sign);
        const double c = number(false);
        skip_ws();
        if (peek() == '*') {
            ++pos_;
            return factor(sign * c);
        }
        return {TermKind::constant, sign * c, 0.0};
    }

    bool starts_factor() {
        const char c = peek();
        return c == '(' || c == 'l' || c == 'e';
    }

    BoundaryTerm factor(double coefficient) {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            expect_one_plus_t();
            expect('^');
            return {TermKind::power, coefficient, number(true)};
        }
        if (c == 'l') {
            expect("ln");
            expect_one_plus_t();
            return {TermKind::logarithmic, coefficient, 0.0};
        }
        if (c == 'e') {
            expect("exp");
            expect('(');
            expect('-');
            skip_ws();
            double rate = 1.0;
            if (peek() != 't') {
                rate = number(false);
                expect('*');
            }
            expect('t');
            expect(')');
            return {TermKind::exponential, coefficient, rate};
        }
        fail("expected a factor '(1+t)^g', 'ln(1+t)' or 'exp(-l*t)'");
    }

    void expect_one_plus_t() {
        expect('(');
        expect('1');
        expect('+');
        expect('t');
        expect(')');
    }

    double number(bool allow_sign) {
        skip_ws();
        const std::size_t start = pos_;
        std::size_t p = pos_;
        if (allow_sign && p < text_.size() && (text_[p] == '-' || text_[p] == '+')) ++p;
        if (p >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[p])) ||
                                   text_[p] == '.')) {
            fail("expected a number");
        }
        const char* first = text_.data() + p;
        double value = 0.0;
        auto [end, ec] = std::from_chars(first, text_.data() + text_.size(), value);
        if (ec != std::errc()) {
            pos_ = start;
            fail("malformed number");
        }
        if (text_[start] == '-') value = -value;
        pos_ = static_cast<std::size_t>(end - text_.data());
        return value;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void expect(std::string_view word) {
        skip_ws();
        if (text_.substr(pos_, word.size()) != word) {
            fail("expected '" + std::string(word) + "'");
        }
        pos_ += word.size();
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    bool at_end() const { return pos_ >= text_.size(); }

    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Boundary Boundary::parse(std::string_view expr) {
    Parser parser(expr);
    return Boundary(parser.parse(), std::string(expr));
}

std::string Boundary::render() const {
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& term = terms_[i];
        // -0.0 must survive the round trip, so test the sign bit.
        const bool negative = std::signbit(term.coefficient);
        if (i == 0) {
            if (negative) out += "-";
        } else {
            out += negative ? " - " : " + ";
        }
        out += format_number(std::fabs(term.coefficient));
        switch (term.kind) {
            case TermKind::constant: break;
            case TermKind::power: out += "*(1+t)^" + format_number(term.parameter); break;
            case TermKind::logarithmic: out += "*ln(1+t)"; break;
            case TermKind::exponential: out += "*exp(-" + format_number(term.parameter) + "*t)"; break;
        }
    }
    return out;
}

}  // namespace mbexit
