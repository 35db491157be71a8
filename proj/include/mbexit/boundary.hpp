#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mbexit {

enum class TermKind { constant, power, logarithmic, exponential };

// One analytic summand of a boundary.
//   constant:     c
//   power:        c * (1+t)^p
//   logarithmic:  c * ln(1+t)
//   exponential:  c * exp(-p*t),  p > 0
struct BoundaryTerm {
    TermKind kind = TermKind::constant;
    double coefficient = 0.0;
    double parameter = 0.0;  // exponent for power terms, decay rate for exponential terms

    // order 0, 1 or 2: value or exact derivative at t >= 0.
    double eval(double t, int order) const;

    friend bool operator==(const BoundaryTerm&, const BoundaryTerm&) = default;
};

// A moving boundary f(t) = sum of BoundaryTerm with f(0) > 0.
// Immutable once constructed; evaluation is thread-safe.
class Boundary {
public:
    // Throws RateError for an exponential term with rate <= 0 and
    // DomainError when f(0) <= 0.
    explicit Boundary(std::vector<BoundaryTerm> terms, std::string source = {});

    // Grammar (whitespace insensitive):
    //   expr   := ["-"] term (("+"|"-") term)*
    //   term   := number | [number "*"] factor
    //   factor := "(1+t)^" signed-number | "ln(1+t)" | "exp(-" [number "*"] "t)"
    // Throws SyntaxError with the offending offset, plus the constructor errors.
    static Boundary parse(std::string_view expr);

    double eval(double t, int order) const;
    double value(double t) const { return eval(t, 0); }
    double first(double t) const { return eval(t, 1); }
    double second(double t) const { return eval(t, 2); }

    const std::vector<BoundaryTerm>& terms() const noexcept { return terms_; }
    const std::string& source() const noexcept { return source_; }

    // Canonical expression; parse(render()) reproduces terms() exactly.
    std::string render() const;

    bool is_constant() const noexcept;

private:
    std::vector<BoundaryTerm> terms_;
    std::string source_;
};

}  // namespace mbexit
