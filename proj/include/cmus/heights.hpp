#ifndef CMUS_HEIGHTS_HPP
#define CMUS_HEIGHTS_HPP

#include "cmus/bigfloat.hpp"
#include "cmus/classpoly.hpp"
#include "cmus/discriminant.hpp"
#include "cmus/jeval.hpp"

#include <utility>

namespace cmus {

/// Weil-height decomposition of the class invariant J of delta.
/// height = pos_sum / deg; pos_sum and neg_sum split sum log|sigma(J)| into
/// the log+ part and the sub-unit part, so pos_sum + neg_sum = log|H(0)|
/// (checked against the exact integer). log_abs_norm and neg_sum are the
/// -inf sentinel when H(0) = 0 (only delta = -3).
struct HeightReport {
    Discriminant delta;
    BigFloat height, pos_sum, neg_sum, log_abs_norm;
    double ratio = 0.0; // height / log|delta|
    double nt_corr = 0.0;
};

/// Assemble the report from certified conjugate values. An already computed
/// class polynomial can be passed to avoid recomputation; it must belong to
/// the same discriminant.
HeightReport height_report(const Discriminant& d,
                           const PrecisionContext& ctx = PrecisionContext{},
                           const ClassPolynomial* poly = nullptr);

/// (1/deg) log M(H) from the integer coefficients alone, by scaled Graeffe
/// root-squaring with a Landau-norm bracket; independent of any j values.
BigFloat mahler_height(const ClassPolynomial& h);

/// (height, height / log|delta|): the empirical lower-bound witness pair.
std::pair<double, double> colmez_diagnostic(const Discriminant& d);

/// For a unit J - alpha (|H(alpha)| = 1): returns
///   ((#{|sigma(J)-alpha| < eps} / deg) * max log(1/|sigma(J)-alpha|), |log eps|)
/// with term1 = 0 when no conjugate falls below eps.
std::pair<double, double> height_upper_decomposition(const Discriminant& d,
                                                     double eps,
                                                     const mpz_class& alpha = 0);

} // namespace cmus

#endif
