#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmus/classpoly.hpp"
#include "cmus/errors.hpp"
#include "cmus/forms.hpp"
#include "cmus/jeval.hpp"

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

using namespace cmus;

namespace {

ClassPolynomial poly(long long delta) {
    return hilbert_class_poly(validate_discriminant(delta));
}

std::vector<mpz_class> zc(const std::vector<std::string>& ascending) {
    std::vector<mpz_class> out;
    for (const auto& s : ascending) out.emplace_back(s);
    return out;
}

struct EnvGuard {
    ~EnvGuard() { unsetenv("CMUS_PRECISION_POLICY"); }
};

// Rational-coefficient Euclid; enough to certify gcd(H, H') is constant.
using QPoly = std::vector<mpq_class>;

void strip(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly poly_rem(QPoly a, const QPoly& b) {
    while (a.size() >= b.size()) {
        mpq_class q = a.back() / b.back();
        size_t off = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) a[off + i] -= q * b[i];
        a.pop_back();
        strip(a);
        if (a.empty()) break;
    }
    return a;
}

bool squarefree(const std::vector<mpz_class>& coeffs) {
    QPoly a, b;
    for (const auto& z : coeffs) a.emplace_back(z);
    for (size_t k = 1; k < coeffs.size(); ++k)
        b.emplace_back(coeffs[k] * static_cast<long>(k));
    strip(a);
    strip(b);
    while (!b.empty()) {
        QPoly r = poly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a.size() == 1;
}

} // namespace

TEST_CASE("small class fields have their classical polynomials") {
    std::map<long long, std::vector<mpz_class>> expected = {
        {-3, zc({"0", "1"})},
        {-4, zc({"-1728", "1"})},
        {-7, zc({"3375", "1"})},
        {-8, zc({"-8000", "1"})},
        {-11, zc({"32768", "1"})},
        {-12, zc({"-54000", "1"})},
        {-16, zc({"-287496", "1"})},
        {-19, zc({"884736", "1"})},
        {-27, zc({"12288000", "1"})},
        {-28, zc({"-16581375", "1"})},
        {-43, zc({"884736000", "1"})},
        {-67, zc({"147197952000", "1"})},
        {-163, zc({"262537412640768000", "1"})},
        {-15, zc({"-121287375", "191025", "1"})},
        {-20, zc({"-681472000", "-1264000", "1"})},
        {-23, zc({"12771880859375", "-5151296875", "3491750", "1"})},
    };
    for (const auto& [delta, coeffs] : expected) {
        ClassPolynomial h = poly(delta);
        CHECK(h.coeffs == coeffs);
        CHECK(h.rounding_margin_bits >= 10.0);
        CHECK(h.delta.delta == delta);
    }
}

TEST_CASE("root residual of the degree one polynomial at -7") {
    CertifiedComplex cj =
        eval_j(cm_point(reduced_forms(validate_discriminant(-7)).at(0),
                        validate_discriminant(-7)),
               PrecisionContext{256, 32});
    BigFloat res = BigFloat::add(cj.value.re.dist_to_int(mpz_class(-3375)),
                                 cj.value.im.abs(), 96, MPFR_RNDU);
    CHECK(res.cmp(BigFloat::pow2(-200)) < 0);
}

TEST_CASE("budget formula reference values") {
    CHECK(precision_budget(validate_discriminant(-3)) == 152);
    CHECK(precision_budget(validate_discriminant(-4)) == 154);
    CHECK(precision_budget(validate_discriminant(-23)) == 220);
}

TEST_CASE("degree matches the class number and margins certify") {
    for (long long n = 3; n <= 1000; ++n) {
        long long delta = -n;
        long long r = ((delta % 4) + 4) % 4;
        if (r != 0 && r != 1) continue;
        Discriminant d = validate_discriminant(delta);
        ClassPolynomial h = hilbert_class_poly(d);
        CHECK(h.degree() == class_number(d));
        CHECK(h.coeffs.back() == 1);
        CHECK(h.rounding_margin_bits >= 10.0);
        CHECK(h.precision_used >= precision_budget(d));
        CHECK_FALSE(is_unit(h));
        if (delta != -3) CHECK(h.constant_term() != 0);
    }
}

TEST_CASE("coefficients are stable under extra precision") {
    EnvGuard guard;
    for (long long n = 3; n <= 500; ++n) {
        long long delta = -n;
        long long r = ((delta % 4) + 4) % 4;
        if (r != 0 && r != 1) continue;
        Discriminant d = validate_discriminant(delta);
        unsetenv("CMUS_PRECISION_POLICY");
        ClassPolynomial base = hilbert_class_poly(d);
        std::string policy =
            "fixed:" + std::to_string(precision_budget(d) + 64);
        setenv("CMUS_PRECISION_POLICY", policy.c_str(), 1);
        ClassPolynomial wide = hilbert_class_poly(d);
        CHECK(base.coeffs == wide.coeffs);
        CHECK(wide.precision_used == precision_budget(d) + 64);
    }
}

TEST_CASE("assembly order does not change the integers") {
    for (long long delta : {-23LL, -47LL, -71LL}) {
        Discriminant d = validate_discriminant(delta);
        ClassPolynomial h = hilbert_class_poly(d);
        auto forms = reduced_forms(d);
        PrecisionContext ctx{h.precision_used, 64};
        mpfr_prec_t P = h.precision_used;
        std::vector<BigComplex> c;
        c.emplace_back(P);
        c[0].re = BigFloat::of(1L, P);
        for (size_t i = forms.size(); i-- > 0;) {
            BigComplex z = eval_j(cm_point(forms[i], d), ctx).value;
            c.emplace_back(P);
            for (size_t k = c.size(); k-- > 1;)
                c[k] = BigComplex::sub(c[k - 1], BigComplex::mul(z, c[k], P),
                                       P);
            c[0] = BigComplex::sub(BigComplex(P), BigComplex::mul(z, c[0], P),
                                   P);
        }
        REQUIRE(c.size() == h.coeffs.size());
        for (size_t k = 0; k < c.size(); ++k)
            CHECK(c[k].re.to_mpz() == h.coeffs[k]);
    }
}

TEST_CASE("class polynomials are squarefree") {
    for (long long n = 3; n <= 400; ++n) {
        long long delta = -n;
        long long r = ((delta % 4) + 4) % 4;
        if (r != 0 && r != 1) continue;
        ClassPolynomial h = poly(delta);
        CHECK(squarefree(h.coeffs));
    }
}

TEST_CASE("integer evaluation is exact Horner") {
    ClassPolynomial h3 = poly(-3), h4 = poly(-4), h23 = poly(-23);
    CHECK(eval_at_integer(h3, 0) == 0);
    CHECK(eval_at_integer(h3, -1) == -1);
    CHECK(eval_at_integer(h4, 0) == -1728);
    CHECK(eval_at_integer(h4, 1728) == 0);
    CHECK(eval_at_integer(h4, 2) == -1726);
    CHECK(eval_at_integer(h23, 0) == mpz_class("12771880859375"));
    mpz_class sum = 0;
    for (const auto& z : h23.coeffs) sum += z;
    CHECK(eval_at_integer(h23, 1) == sum);
}

TEST_CASE("unit predicates") {
    ClassPolynomial h3 = poly(-3), h4 = poly(-4), h7 = poly(-7);
    CHECK_FALSE(is_unit(h3));
    CHECK_FALSE(is_unit(h4));
    CHECK_FALSE(is_unit(h7));
    CHECK(is_shifted_unit(h3, -1));
    CHECK_FALSE(is_shifted_unit(h4, 0));
    CHECK_FALSE(is_shifted_unit(h4, 1728));
    CHECK(is_shifted_unit(h7, -3374));
    CHECK(is_shifted_unit(h7, -3376));
    CHECK_FALSE(is_shifted_unit(h7, -3375));
}

TEST_CASE("precision policy parsing") {
    EnvGuard guard;
    setenv("CMUS_PRECISION_POLICY", "fixed:512", 1);
    ClassPolynomial h = poly(-23);
    CHECK(h.precision_used == 512);
    CHECK(h.coeffs[0] == mpz_class("12771880859375"));

    setenv("CMUS_PRECISION_POLICY", "budget", 1);
    CHECK(poly(-23).precision_used == 220);

    for (const char* bad :
         {"fixed:32", "fixed:", "fixed:128abc", "sometimes", "FIXED:256"}) {
        setenv("CMUS_PRECISION_POLICY", bad, 1);
        CHECK_THROWS_AS(poly(-23), InvalidArgument);
    }
}
