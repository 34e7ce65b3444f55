#ifndef CMUS_JEVAL_HPP
#define CMUS_JEVAL_HPP

#include "cmus/bigfloat.hpp"
#include "cmus/forms.hpp"

#include <vector>

namespace cmus {

struct PrecisionContext {
    long work_bits = 256;
    long guard_bits = 32;
};

// A j-value with a rigorous absolute error bound:
//   |value - j(tau)| <= err,  err <= 2^-(work_bits-guard_bits) * max(1, |j|).
struct CertifiedComplex {
    BigComplex value;
    BigFloat err;
};

// tau as a complex number at the requested precision.
BigComplex cm_tau(const CMPoint& p, mpfr_prec_t prec);

// Klein's j at tau, for Im tau >= 0.866 (the fundamental-domain strip,
// with a hair of slack for callers that build tau from doubles).
//
// Evaluated as j = E4^3 / ((E4^3 - E6^2)/1728) from the Eisenstein series
//   E4 = 1 + 240 sum sigma_3(n) q^n,   E6 = 1 - 504 sum sigma_5(n) q^n,
// q = e^{2 pi i tau}, |q| <= e^{-2 pi 0.866} < 0.004344.  The series are
// truncated with closed-form tail majorants and every rounding step is
// charged to a running worst-case bound, so err is a certified enclosure
// radius rather than an estimate.
CertifiedComplex eval_j(const BigComplex& tau, const PrecisionContext& ctx);
CertifiedComplex eval_j(const CMPoint& p, const PrecisionContext& ctx);

// Decides |j(tau)| < eps rigorously.  Retries internally at doubled
// precision while the enclosure straddles eps; throws Undecidable once the
// enclosure narrows below 2^-1024 without separating (an exact tie).
bool certified_abs_less(const BigComplex& tau, double eps,
                        const PrecisionContext& ctx);
bool certified_abs_less(const CMPoint& p, double eps,
                        const PrecisionContext& ctx);

// Same contract for |j(tau) - shift| < eps.
bool certified_shifted_abs_less(const CMPoint& p, const mpz_class& shift,
                                double eps, const PrecisionContext& ctx);

// j at every point of a conjugate set. Interior forms come in b <-> -b
// mirror pairs whose invariants are complex conjugates, so only one of each
// pair is evaluated; results line up index-for-index with the input.
std::vector<CertifiedComplex> eval_j_conjugates(const std::vector<CMPoint>& pts,
                                                const PrecisionContext& ctx);

namespace detail {
// Raw truncated Eisenstein pair at fixed precision and term count, without
// error accounting; exposed so tests can probe the tail bounds directly.
std::pair<BigComplex, BigComplex> eisenstein_pair(const BigComplex& tau,
                                                  mpfr_prec_t prec, long N);
// Tail majorants: 240 sum_{n>N} sigma_3(n) r^n <= e4_tail_bound(N, r), and
// the sigma_5 analogue; both require N >= 1 and r <= 0.004344.
BigFloat e4_tail_bound(long N, const BigFloat& r_ub);
BigFloat e6_tail_bound(long N, const BigFloat& r_ub);
} // namespace detail

} // namespace cmus

#endif
