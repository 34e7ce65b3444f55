#ifndef CMUS_DISCRIMINANT_HPP
#define CMUS_DISCRIMINANT_HPP

#include <utility>
#include <vector>

namespace cmus {

// An imaginary-quadratic discriminant delta = delta0 * f^2, split into its
// fundamental part delta0 (either 1 mod 4 and squarefree, or 4m with m
// squarefree and m = 2,3 mod 4) and conductor f >= 1.
struct Discriminant {
    long long delta;
    long long delta0;
    long long f;
};

// Throws NotADiscriminant unless n < 0 and n = 0,1 (mod 4).
Discriminant validate_discriminant(long long n);

// Kronecker symbol (d|n): 0 when n | d has a common factor, the Legendre
// symbol for odd primes, and the mod-8 rule at 2.
int kronecker_symbol(long long d, long long n);

// Conductor correction to the Faltings-height formula for a non-maximal
// order:
//   (1/2) log f - (1/2) sum_{p | f} e_f(p) log p
// with e_f(p) = ((1-chi(p)) / (p-chi(p))) * ((1-p^-n) / (1-p^-1)), where
// chi(p) = (delta0|p) and n is the exact multiplicity of p in f.
// Zero iff f = 1. Diagnostic value, not part of any certified rounding.
double nt_correction(const Discriminant& D);

// Trial-division factorization of |n|, as (prime, multiplicity) pairs in
// increasing prime order.
std::vector<std::pair<long long, int>> factorize(long long n);

} // namespace cmus

#endif
