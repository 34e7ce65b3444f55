#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmus/discriminant.hpp"
#include "cmus/errors.hpp"

#include <cmath>
#include <set>

using namespace cmus;

TEST_CASE("discriminant validation and decomposition") {
    auto d12 = validate_discriminant(-12);
    CHECK(d12.delta0 == -3);
    CHECK(d12.f == 2);

    auto d4 = validate_discriminant(-4);
    CHECK(d4.delta0 == -4);
    CHECK(d4.f == 1);

    auto d16 = validate_discriminant(-16);
    CHECK(d16.delta0 == -4);
    CHECK(d16.f == 2);

    auto d8 = validate_discriminant(-8);
    CHECK(d8.delta0 == -8);
    CHECK(d8.f == 1);

    auto d75 = validate_discriminant(-75); // -3 * 25
    CHECK(d75.delta0 == -3);
    CHECK(d75.f == 5);

    CHECK_THROWS_AS(validate_discriminant(-5), NotADiscriminant);
    CHECK_THROWS_AS(validate_discriminant(-6), NotADiscriminant);
    CHECK_THROWS_AS(validate_discriminant(0), NotADiscriminant);
    CHECK_THROWS_AS(validate_discriminant(4), NotADiscriminant);
    CHECK_THROWS_AS(validate_discriminant(-1), NotADiscriminant);
}

TEST_CASE("decomposition holds exactly across a scan range") {
    for (long long n = 3; n <= 20000; ++n) {
        if (n % 4 != 0 && n % 4 != 3) continue;
        auto D = validate_discriminant(-n);
        REQUIRE(D.delta == -n);
        REQUIRE(D.f >= 1);
        REQUIRE(D.delta0 * D.f * D.f == D.delta);
        // delta0 must itself be fundamental: re-decomposing gives f = 1.
        auto F = validate_discriminant(D.delta0);
        REQUIRE(F.f == 1);
        REQUIRE(F.delta0 == D.delta0);
    }
}

TEST_CASE("kronecker symbol at 2 follows the mod-8 rule") {
    CHECK(kronecker_symbol(-4, 2) == 0);
    CHECK(kronecker_symbol(-3, 2) == -1); // -3 = 5 mod 8
    for (long long d = -999; d < 1000; ++d) {
        int k = kronecker_symbol(d, 2);
        long long r = ((d % 8) + 8) % 8;
        if (d % 2 == 0) {
            CHECK(k == 0);
        } else if (r == 1 || r == 7) {
            CHECK(k == 1);
        } else {
            CHECK(k == -1);
        }
    }
}

TEST_CASE("kronecker symbol matches residue counting at odd primes") {
    // Brute-force Legendre: d is a nonzero square mod p iff some x^2 = d.
    for (long long p : {3LL, 5LL, 7LL, 11LL, 13LL, 17LL, 19LL, 23LL, 29LL,
                        31LL, 37LL, 41LL, 43LL, 47LL, 53LL, 59LL, 61LL, 67LL,
                        71LL, 73LL, 79LL, 83LL, 89LL, 97LL}) {
        std::set<long long> squares;
        for (long long x = 1; x < p; ++x) squares.insert(x * x % p);
        for (long long d = -999; d < 1000; ++d) {
            long long r = ((d % p) + p) % p;
            int expect = r == 0 ? 0 : (squares.count(r) ? 1 : -1);
            CHECK(kronecker_symbol(d, p) == expect);
        }
    }
    CHECK(kronecker_symbol(-3, 7) == 1); // 2^2 = 4 = -3 mod 7
}

TEST_CASE("conductor correction values") {
    CHECK(nt_correction(validate_discriminant(-3)) == 0.0);
    CHECK(nt_correction(validate_discriminant(-4)) == 0.0);
    CHECK(nt_correction(validate_discriminant(-23)) == 0.0);

    // delta = -16: chi(2) = 0, e(2) = 1/2, correction = (1/4) log 2.
    CHECK(nt_correction(validate_discriminant(-16)) ==
          doctest::Approx(0.25 * std::log(2.0)).epsilon(1e-14));

    // delta = -12: chi(2) = -1, e(2) = 2/3, correction = (1/6) log 2.
    CHECK(nt_correction(validate_discriminant(-12)) ==
          doctest::Approx(std::log(2.0) / 6.0).epsilon(1e-14));
}

TEST_CASE("conductor correction bounds") {
    for (long long n = 3; n <= 20000; ++n) {
        if (n % 4 != 0 && n % 4 != 3) continue;
        auto D = validate_discriminant(-n);
        double corr = nt_correction(D);
        if (D.f == 1) {
            REQUIRE(corr == 0.0);
        } else {
            REQUIRE(corr > 0.0);
            REQUIRE(corr <= 0.5 * std::log(static_cast<double>(D.f)) + 1e-12);
        }
    }
}
