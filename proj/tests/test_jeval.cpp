#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmus/errors.hpp"
#include "cmus/forms.hpp"
#include "cmus/jeval.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace cmus;

namespace {

BigComplex point(double re, double im, mpfr_prec_t prec = 256) {
    return {BigFloat::of(re, prec), BigFloat::of(im, prec)};
}

BigFloat q_upper(const BigFloat& im) {
    BigFloat t = BigFloat::mul(BigFloat::pi(96, MPFR_RNDD).mul_2si(1), im, 96,
                               MPFR_RNDD);
    return BigFloat::exp(t.neg(), 96, MPFR_RNDU);
}

CMPoint cm(long long delta, size_t idx = 0) {
    Discriminant d = validate_discriminant(delta);
    return cm_point(reduced_forms(d).at(idx), d);
}

} // namespace

TEST_CASE("gaussian point gives 1728") {
    CertifiedComplex cj = eval_j(cm(-4), PrecisionContext{});
    CHECK(cj.err.cmp(0.5) < 0);
    CHECK(cj.value.re.dist_to_int(1728).cmp(cj.err) <= 0);
    CHECK(cj.value.im.abs().cmp(cj.err) <= 0);
}

TEST_CASE("hexagonal point gives 0") {
    CertifiedComplex cj = eval_j(cm(-3), PrecisionContext{});
    CHECK(BigComplex::abs(cj.value, 96, MPFR_RNDU).cmp(cj.err) <= 0);
}

TEST_CASE("class invariants of -23 satisfy their integer cubic") {
    // X^3 + 3491750 X^2 - 5151296875 X + 12771880859375 kills all three
    // conjugates; residuals must vanish to within the certified radii
    // amplified by the derivative scale (~1e13 here).
    mpz_class c2("3491750"), c1("-5151296875"), c0("12771880859375");
    PrecisionContext ctx{320, 32};
    const mpfr_prec_t P = 1200;
    Discriminant d23 = validate_discriminant(-23);
    auto forms = reduced_forms(d23);
    REQUIRE(forms.size() == 3);
    for (const auto& f : forms) {
        CertifiedComplex cj = eval_j(cm_point(f, d23), ctx);
        BigComplex h = cj.value;
        h = {BigFloat::add(h.re, BigFloat::of(c2, P), P), h.im};
        h = BigComplex::mul(h, cj.value, P);
        h = {BigFloat::add(h.re, BigFloat::of(c1, P), P), h.im};
        h = BigComplex::mul(h, cj.value, P);
        h = {BigFloat::add(h.re, BigFloat::of(c0, P), P), h.im};
        CHECK(BigComplex::abs(h, 96, MPFR_RNDU).cmp(1e-40) < 0);
    }
}

TEST_CASE("period one translation") {
    // x is dyadic with 40 fractional bits so x + 1 stays exact in double;
    // a rounded translation would smear j by |j'| ~ 1e8 times the slip.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<long> uk(-(1L << 39), 1L << 39);
    std::uniform_real_distribution<double> ui(0.9, 2.5);
    PrecisionContext ctx{128, 32};
    for (int k = 0; k < 100; ++k) {
        double x = std::ldexp(static_cast<double>(uk(rng)), -40);
        double y = ui(rng);
        CertifiedComplex a = eval_j(point(x, y), ctx);
        CertifiedComplex b = eval_j(point(x + 1.0, y), ctx);
        BigFloat gap =
            BigComplex::abs(BigComplex::sub(a.value, b.value, 256), 96,
                            MPFR_RNDU);
        CHECK(gap.cmp(BigFloat::add(a.err, b.err, 96, MPFR_RNDU)) <= 0);
    }
}

TEST_CASE("unit circle inversion symmetry") {
    // On |tau| = 1 the involution tau -> -1/tau coincides with
    // tau -> -conj(tau), so the two evaluations must agree. Rational
    // circle points (m^2-n^2, 2mn)/(m^2+n^2) keep the setup exact far
    // beyond the certified radii.
    PrecisionContext ctx{128, 32};
    const mpfr_prec_t P = 384;
    int used = 0;
    for (long n = 2; n <= 40 && used < 100; ++n) {
        for (long m = 1; m < n && used < 100; ++m) {
            if (std::gcd(m, n) != 1) continue;
            double y = 2.0 * m * n / double(m * m + n * n);
            if (y < 0.87) continue;
            BigFloat den = BigFloat::of(m * m + n * n, P);
            BigFloat re = BigFloat::div(BigFloat::of(m * m - n * n, P), den, P);
            BigFloat im = BigFloat::div(BigFloat::of(2 * m * n, P), den, P);
            CertifiedComplex a = eval_j({re, im}, ctx);
            CertifiedComplex b = eval_j({re.neg(), im}, ctx);
            BigFloat gap =
                BigComplex::abs(BigComplex::sub(a.value, b.value, 256), 96,
                                MPFR_RNDU);
            CHECK(gap.cmp(BigFloat::add(a.err, b.err, 96, MPFR_RNDU)) <= 0);
            ++used;
        }
    }
    CHECK(used >= 50);
}

TEST_CASE("series tails honor their closed-form majorants") {
    std::mt19937_64 rng(0x2545f4914f6cdd1dULL);
    std::uniform_real_distribution<double> ur(-0.5, 0.5), ui(0.87, 3.0);
    const mpfr_prec_t P = 320;
    for (int k = 0; k < 50; ++k) {
        BigComplex tau = point(ur(rng), ui(rng), P);
        long N = 4 + static_cast<long>(rng() % 12);
        auto [e4a, e6a] = detail::eisenstein_pair(tau, P, N);
        auto [e4b, e6b] = detail::eisenstein_pair(tau, P, 2 * N);
        BigFloat r = q_upper(tau.im);
        BigFloat slack = BigFloat::pow2(-250);
        BigFloat g4 = BigComplex::abs(BigComplex::sub(e4a, e4b, P), 96,
                                      MPFR_RNDU);
        BigFloat g6 = BigComplex::abs(BigComplex::sub(e6a, e6b, P), 96,
                                      MPFR_RNDU);
        CHECK(g4.cmp(BigFloat::add(detail::e4_tail_bound(N, r), slack, 96,
                                   MPFR_RNDU)) <= 0);
        CHECK(g6.cmp(BigFloat::add(detail::e6_tail_bound(N, r), slack, 96,
                                   MPFR_RNDU)) <= 0);
    }
}

TEST_CASE("real locus stays real") {
    PrecisionContext ctx{128, 32};
    for (int k = 0; k < 20; ++k) {
        double y = 0.9 + 0.17 * k;
        CertifiedComplex a = eval_j(point(0.0, y), ctx);
        CHECK(a.value.im.abs().cmp(a.err) <= 0);
        CertifiedComplex b = eval_j(point(0.5, y), ctx);
        CHECK(b.value.im.abs().cmp(b.err) <= 0);
        CertifiedComplex c = eval_j(point(-0.5, y), ctx);
        CHECK(c.value.im.abs().cmp(c.err) <= 0);
    }
}

TEST_CASE("error radius meets the contract cap") {
    std::mt19937_64 rng(0xda942042e4dd58b5ULL);
    std::uniform_real_distribution<double> ur(-0.5, 0.5), ui(0.87, 6.0);
    for (int k = 0; k < 40; ++k) {
        PrecisionContext ctx{k % 2 ? 128L : 256L, 32};
        CertifiedComplex cj = eval_j(point(ur(rng), ui(rng)), ctx);
        BigFloat mag = BigComplex::abs(cj.value, 96, MPFR_RNDU);
        BigFloat cap = BigFloat::mul(
            BigFloat::pow2(-(ctx.work_bits - ctx.guard_bits)),
            mag.cmp(1L) < 0 ? BigFloat::of(1L, 96) : mag, 96, MPFR_RNDU);
        CHECK(cj.err.cmp(cap) <= 0);
        CHECK(cj.err.sign() > 0);
    }
}

TEST_CASE("threshold verdicts are precision stable") {
    CMPoint pz = cm(-3);
    CMPoint pi4 = cm(-4);
    for (long wb : {128L, 256L, 512L}) {
        PrecisionContext ctx{wb, 32};
        CHECK(certified_abs_less(pz, 0.5, ctx));
        CHECK(certified_abs_less(pz, 1e-6, ctx));
        CHECK_FALSE(certified_abs_less(pi4, 1727.5, ctx));
        CHECK(certified_abs_less(pi4, 1728.5, ctx));
        CHECK(certified_shifted_abs_less(pi4, mpz_class(1728), 1e-10, ctx));
        CHECK(certified_shifted_abs_less(pz, mpz_class(5), 5.5, ctx));
        CHECK_FALSE(certified_shifted_abs_less(pz, mpz_class(5), 4.5, ctx));
    }
}

TEST_CASE("exact threshold tie is reported undecidable") {
    CHECK_THROWS_AS(certified_abs_less(cm(-4), 1728.0, PrecisionContext{}),
                    Undecidable);
}

TEST_CASE("domain and argument guards") {
    PrecisionContext ctx{128, 32};
    CHECK_THROWS_AS(eval_j(point(0.0, 0.5), ctx), InvalidArgument);
    CHECK_THROWS_AS(eval_j(point(0.0, 1.0), PrecisionContext{32, 32}),
                    InvalidArgument);
    CHECK_THROWS_AS(eval_j(point(0.0, 1.0), PrecisionContext{128, 16}),
                    InvalidArgument);
    CHECK_THROWS_AS(certified_abs_less(point(0.0, 1.0), 0.0, ctx),
                    InvalidArgument);
    CHECK_THROWS_AS(certified_abs_less(point(0.0, 1.0), -2.0, ctx),
                    InvalidArgument);
}

TEST_CASE("cm tau matches the form data") {
    CMPoint p = cm(-23, 1); // (2, -1, 3): tau = (1 + sqrt(-23)) / 4
    BigComplex t = cm_tau(p, 256);
    CHECK(t.re.cmp(0.25) == 0);
    BigFloat probe = BigFloat::sub(
        BigFloat::sqr(BigFloat::mul_si(t.im, 4, 256), 256),
        BigFloat::of(23L, 256), 96);
    CHECK(probe.abs().cmp(BigFloat::pow2(-240)) < 0);
}
