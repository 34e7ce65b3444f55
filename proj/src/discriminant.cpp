#include "cmus/discriminant.hpp"
#include "cmus/errors.hpp"

#include <gmpxx.h>

#include <cmath>

namespace cmus {

std::vector<std::pair<long long, int>> factorize(long long n) {
    std::vector<std::pair<long long, int>> out;
    if (n < 0) n = -n;
    for (long long p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        do {
            n /= p;
            ++e;
        } while (n % p == 0);
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

Discriminant validate_discriminant(long long n) {
    long long r = ((n % 4) + 4) % 4;
    if (n >= 0 || (r != 0 && r != 1)) throw NotADiscriminant(n);
    // Strip the largest square divisor, then fold a factor 4 back in when
    // the squarefree kernel is not 1 mod 4.
    long long f = 1, m = n;
    for (auto [p, e] : factorize(n)) {
        for (int i = 0; i < e / 2; ++i) {
            f *= p;
            m /= p * p;
        }
    }
    long long delta0;
    if (((m % 4) + 4) % 4 == 1) {
        delta0 = m;
    } else {
        // m = 2,3 mod 4 together with n = 0,1 mod 4 forces f even.
        delta0 = 4 * m;
        f /= 2;
    }
    return {n, delta0, f};
}

int kronecker_symbol(long long d, long long n) {
    mpz_class a(static_cast<long>(d)), b(static_cast<long>(n));
    return mpz_kronecker(a.get_mpz_t(), b.get_mpz_t());
}

double nt_correction(const Discriminant& D) {
    if (D.f == 1) return 0.0;
    long double corr = 0.5L * std::log(static_cast<long double>(D.f));
    for (auto [p, n] : factorize(D.f)) {
        int chi = kronecker_symbol(D.delta0, p);
        long double pl = static_cast<long double>(p);
        long double e = ((1.0L - chi) / (pl - chi)) *
                        ((1.0L - std::pow(pl, -static_cast<long double>(n))) /
                         (1.0L - 1.0L / pl));
        corr -= 0.5L * e * std::log(pl);
    }
    return static_cast<double>(corr);
}

} // namespace cmus
