#ifndef CMUS_CLASSPOLY_HPP
#define CMUS_CLASSPOLY_HPP

#include "cmus/discriminant.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace cmus {

/// Monic integer polynomial whose roots are the class invariants of delta.
/// coeffs is ascending (coeffs[k] multiplies X^k, coeffs.back() == 1);
/// rounding_margin_bits certifies that every computed coefficient sat within
/// 2^-rounding_margin_bits of the declared integer.
struct ClassPolynomial {
    Discriminant delta;
    std::vector<mpz_class> coeffs;
    double rounding_margin_bits = 0.0;
    long precision_used = 0;

    long degree() const { return static_cast<long>(coeffs.size()) - 1; }
    const mpz_class& constant_term() const { return coeffs.front(); }
};

/// Heuristic working precision: coefficient bit-size estimate
/// ceil(pi sqrt|delta| sum(1/a) / ln 2) plus 16 h + 128 bits of headroom.
long precision_budget(const Discriminant& d);

/// Expand prod (X - j(tau)) over the reduced forms, round coefficients to
/// integers, and certify the rounding margin (>= 10 bits, else the precision
/// is doubled, at most four times). CMUS_PRECISION_POLICY=budget|fixed:<bits>
/// selects the starting precision.
ClassPolynomial hilbert_class_poly(const Discriminant& d);

/// H(alpha), exact Horner evaluation.
mpz_class eval_at_integer(const ClassPolynomial& h, const mpz_class& alpha);

/// |H(0)| == 1: the root generates a unit.
bool is_unit(const ClassPolynomial& h);

/// |H(alpha)| == 1: root - alpha generates a unit.
bool is_shifted_unit(const ClassPolynomial& h, const mpz_class& alpha);

/// Human-readable rendering, highest power first: "X", "X - 1728",
/// "X^2 + 39491307*X - 58682638134". base is 10 or 16 (hex digits get an
/// 0x prefix).
std::string polynomial_text(const ClassPolynomial& h, int base = 10);

} // namespace cmus

#endif
