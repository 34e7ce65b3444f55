#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmus/errors.hpp"
#include "cmus/heights.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace cmus;

namespace {

ClassPolynomial from_coeffs(const std::vector<std::string>& ascending) {
    ClassPolynomial p;
    for (const auto& s : ascending) p.coeffs.emplace_back(s);
    return p;
}

BigFloat tol20() { return BigFloat::of(1e-20, 96); }

bool close(const BigFloat& a, const BigFloat& b, const BigFloat& tol) {
    return BigFloat::sub(a, b, 320).abs().cmp(tol) <= 0;
}

} // namespace

TEST_CASE("mahler measure oracles") {
    // X: all mass at zero, measure 1.
    CHECK(mahler_height(from_coeffs({"0", "1"})).abs().cmp(tol20()) < 0);

    // X - 1728: measure 1728.
    BigFloat m4 = mahler_height(from_coeffs({"-1728", "1"}));
    CHECK(close(m4, BigFloat::log(BigFloat::of(1728L, 320), 320), tol20()));

    // X^2 - X - 1: the golden ratio is the lone root outside the circle.
    BigFloat phi = BigFloat::div(
        BigFloat::add(BigFloat::of(1L, 320),
                      BigFloat::sqrt(BigFloat::of(5L, 320), 320), 320),
        BigFloat::of(2L, 320), 320);
    BigFloat mphi = mahler_height(from_coeffs({"-1", "-1", "1"}));
    CHECK(close(mphi, BigFloat::log(phi, 320).mul_2si(-1), tol20()));

    // (X - 2)(X - 3): measure 6.
    BigFloat m6 = mahler_height(from_coeffs({"6", "-5", "1"}));
    CHECK(close(m6, BigFloat::log(BigFloat::of(6L, 320), 320).mul_2si(-1),
                tol20()));

    // X(X^2 - 2): measure 2 over degree 3.
    BigFloat m2 = mahler_height(from_coeffs({"0", "-2", "0", "1"}));
    CHECK(close(m2,
                BigFloat::div(BigFloat::log(BigFloat::of(2L, 320), 320),
                              BigFloat::of(3L, 320), 320),
                tol20()));

    // Lehmer's degree-10 polynomial, the smallest known measure > 1.
    BigFloat ml = mahler_height(from_coeffs(
        {"1", "1", "0", "-1", "-1", "-1", "-1", "-1", "0", "1", "1"}));
    CHECK(std::fabs(ml.to_double() * 10.0 - 0.16235761200773840) < 1e-13);

    CHECK_THROWS_AS(mahler_height(from_coeffs({"3", "2"})), InvalidArgument);
}

TEST_CASE("gaussian height decomposition") {
    HeightReport r = height_report(validate_discriminant(-4));
    BigFloat l1728 = BigFloat::log(BigFloat::of(1728L, 320), 320);
    CHECK(close(r.height, l1728, tol20()));
    CHECK(close(r.pos_sum, l1728, tol20()));
    CHECK(r.neg_sum.is_zero());
    CHECK(close(r.log_abs_norm, l1728, tol20()));
    CHECK(std::fabs(r.ratio - std::log(1728.0) / std::log(4.0)) < 1e-12);
    CHECK(r.nt_corr == 0.0);
}

TEST_CASE("zero invariant sentinels") {
    HeightReport r = height_report(validate_discriminant(-3));
    CHECK(r.height.is_zero());
    CHECK(r.pos_sum.is_zero());
    CHECK(r.neg_sum.is_inf());
    CHECK(r.neg_sum.sign() < 0);
    CHECK(r.log_abs_norm.is_inf());
    CHECK(r.ratio == 0.0);
}

TEST_CASE("two independent height routes agree") {
    for (long long n = 4; n <= 600; ++n) {
        long long delta = -n;
        long long rr = ((delta % 4) + 4) % 4;
        if (rr != 0 && rr != 1) continue;
        Discriminant d = validate_discriminant(delta);
        ClassPolynomial H = hilbert_class_poly(d);
        HeightReport r = height_report(d, PrecisionContext{}, &H);
        CHECK(close(r.height, mahler_height(H), tol20()));
        CHECK(r.height.sign() > 0);
        BigFloat resid = BigFloat::sub(BigFloat::add(r.pos_sum, r.neg_sum, 320),
                                       r.log_abs_norm, 320)
                             .abs();
        CHECK(resid.cmp(BigFloat::of(1e-40, 96)) < 0);
    }
}

TEST_CASE("conductor correction is surfaced") {
    HeightReport r = height_report(validate_discriminant(-16));
    CHECK(std::fabs(r.nt_corr - 0.25 * std::log(2.0)) < 1e-12);
    CHECK(height_report(validate_discriminant(-7)).nt_corr == 0.0);
}

TEST_CASE("lower bound witness ratios") {
    auto [h4, w4] = colmez_diagnostic(validate_discriminant(-4));
    CHECK(std::fabs(h4 - std::log(1728.0)) < 1e-12);
    CHECK(std::fabs(w4 - std::log(1728.0) / std::log(4.0)) < 1e-12);

    auto [h7, w7] = colmez_diagnostic(validate_discriminant(-7));
    CHECK(std::fabs(h7 - std::log(3375.0)) < 1e-12);
    CHECK(std::fabs(w7 - std::log(3375.0) / std::log(7.0)) < 1e-12);

    CHECK_THROWS_AS(colmez_diagnostic(validate_discriminant(-3)),
                    InvalidArgument);
}

TEST_CASE("upper decomposition needs a unit") {
    CHECK_THROWS_AS(height_upper_decomposition(validate_discriminant(-4), 0.5),
                    PreconditionNotUnit);
    CHECK_THROWS_AS(height_upper_decomposition(validate_discriminant(-23), 0.5),
                    PreconditionNotUnit);
    CHECK_THROWS_AS(
        height_upper_decomposition(validate_discriminant(-4), 0.0, -1728),
        InvalidArgument);
    CHECK_THROWS_AS(
        height_upper_decomposition(validate_discriminant(-4), 1.5, -1728),
        InvalidArgument);
}

TEST_CASE("shifted unit decomposition at the hexagonal point") {
    auto [t1, t2] =
        height_upper_decomposition(validate_discriminant(-3), 0.5, -1);
    CHECK(t1 == 0.0);
    CHECK(std::fabs(t2 - std::log(2.0)) < 1e-15);
}

TEST_CASE("shifted unit decomposition with degree one conjugate on the rim") {
    // |H_{-7}(-3376)| = 1: the lone conjugate sits at distance exactly 1,
    // outside every eps < 1.
    auto [t1, t2] =
        height_upper_decomposition(validate_discriminant(-7), 0.25, -3376);
    CHECK(t1 == 0.0);
    CHECK(std::fabs(t2 - std::log(4.0)) < 1e-15);
}
