#ifndef CMUS_BIGFLOAT_HPP
#define CMUS_BIGFLOAT_HPP

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>

namespace cmus {

/// Value-semantic wrapper over mpfr_t. Precision is fixed at construction;
/// arithmetic helpers take the result precision and rounding mode explicitly,
/// so kernels stay auditable. Operators are provided for the common
/// round-to-nearest case at the wider operand precision.
class BigFloat {
  public:
    explicit BigFloat(mpfr_prec_t prec = 64) { mpfr_init2(v_, prec); }

    BigFloat(const BigFloat& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, 2);
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    static BigFloat of(long x, mpfr_prec_t prec) {
        BigFloat r(prec);
        mpfr_set_si(r.v_, x, MPFR_RNDN);
        return r;
    }
    static BigFloat of(double x, mpfr_prec_t prec) {
        BigFloat r(prec);
        mpfr_set_d(r.v_, x, MPFR_RNDN);
        return r;
    }
    static BigFloat of(const mpz_class& z, mpfr_prec_t prec,
                       mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(prec);
        mpfr_set_z(r.v_, z.get_mpz_t(), rnd);
        return r;
    }
    static BigFloat zero(mpfr_prec_t prec) { return of(0L, prec); }
    static BigFloat pi(mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(prec);
        mpfr_const_pi(r.v_, rnd);
        return r;
    }
    static BigFloat inf(int sign) {
        BigFloat r(24);
        mpfr_set_inf(r.v_, sign);
        return r;
    }
    /// 2^e, exact.
    static BigFloat pow2(long e, mpfr_prec_t prec = 24) {
        BigFloat r(prec);
        mpfr_set_si_2exp(r.v_, 1, e, MPFR_RNDN);
        return r;
    }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    BigFloat round_to(mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) const {
        BigFloat r(prec);
        mpfr_set(r.v_, v_, rnd);
        return r;
    }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    /// Nearest integer, ties to even.
    mpz_class to_mpz() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
        return z;
    }
    std::string str(size_t digits = 0) const {
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", digits ? static_cast<int>(digits) : 17, v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_inf() const { return mpfr_inf_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    /// Exponent e with |x| in [2^(e-1), 2^e); only valid for nonzero finite x.
    long exp2() const { return mpfr_get_exp(v_); }

    int cmp(const BigFloat& o) const { return mpfr_cmp(v_, o.v_); }
    int cmp(long x) const { return mpfr_cmp_si(v_, x); }
    int cmp(double x) const { return mpfr_cmp_d(v_, x); }
    int cmp_abs(const BigFloat& o) const { return mpfr_cmpabs(v_, o.v_); }

    bool operator<(const BigFloat& o) const { return cmp(o) < 0; }
    bool operator<=(const BigFloat& o) const { return cmp(o) <= 0; }
    bool operator>(const BigFloat& o) const { return cmp(o) > 0; }
    bool operator>=(const BigFloat& o) const { return cmp(o) >= 0; }
    bool operator==(const BigFloat& o) const { return cmp(o) == 0; }

    // --- explicit-precision arithmetic ---

    static BigFloat add(const BigFloat& a, const BigFloat& b, mpfr_prec_t p,
                        mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_add(r.v_, a.v_, b.v_, rnd);
        return r;
    }
    static BigFloat sub(const BigFloat& a, const BigFloat& b, mpfr_prec_t p,
                        mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_sub(r.v_, a.v_, b.v_, rnd);
        return r;
    }
    static BigFloat mul(const BigFloat& a, const BigFloat& b, mpfr_prec_t p,
                        mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_mul(r.v_, a.v_, b.v_, rnd);
        return r;
    }
    static BigFloat div(const BigFloat& a, const BigFloat& b, mpfr_prec_t p,
                        mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_div(r.v_, a.v_, b.v_, rnd);
        return r;
    }
    static BigFloat sqrt(const BigFloat& a, mpfr_prec_t p,
                         mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_sqrt(r.v_, a.v_, rnd);
        return r;
    }
    static BigFloat sqr(const BigFloat& a, mpfr_prec_t p,
                        mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_sqr(r.v_, a.v_, rnd);
        return r;
    }
    static BigFloat exp(const BigFloat& a, mpfr_prec_t p,
                        mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_exp(r.v_, a.v_, rnd);
        return r;
    }
    static BigFloat log(const BigFloat& a, mpfr_prec_t p,
                        mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_log(r.v_, a.v_, rnd);
        return r;
    }
    static std::pair<BigFloat, BigFloat> sin_cos(const BigFloat& a,
                                                 mpfr_prec_t p,
                                                 mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat s(p), c(p);
        mpfr_sin_cos(s.v_, c.v_, a.v_, rnd);
        return {std::move(s), std::move(c)};
    }
    static BigFloat hypot(const BigFloat& x, const BigFloat& y, mpfr_prec_t p,
                          mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_hypot(r.v_, x.v_, y.v_, rnd);
        return r;
    }
    static BigFloat mul_si(const BigFloat& a, long b, mpfr_prec_t p,
                           mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_mul_si(r.v_, a.v_, b, rnd);
        return r;
    }
    static BigFloat div_si(const BigFloat& a, long b, mpfr_prec_t p,
                           mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_div_si(r.v_, a.v_, b, rnd);
        return r;
    }
    static BigFloat mul_z(const BigFloat& a, const mpz_class& b, mpfr_prec_t p,
                          mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_mul_z(r.v_, a.v_, b.get_mpz_t(), rnd);
        return r;
    }
    static BigFloat sub_z(const BigFloat& a, const mpz_class& b, mpfr_prec_t p,
                          mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_sub_z(r.v_, a.v_, b.get_mpz_t(), rnd);
        return r;
    }
    static BigFloat pow_ui(const BigFloat& a, unsigned long e, mpfr_prec_t p,
                           mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_pow_ui(r.v_, a.v_, e, rnd);
        return r;
    }

    BigFloat neg() const {
        BigFloat r(prec());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }
    BigFloat abs() const {
        BigFloat r(prec());
        mpfr_abs(r.v_, v_, MPFR_RNDN);
        return r;
    }
    /// x * 2^e, exact.
    BigFloat mul_2si(long e) const {
        BigFloat r(prec());
        mpfr_mul_2si(r.v_, v_, e, MPFR_RNDN);
        return r;
    }
    /// Distance to the nearest integer z, as |x - z| at this precision.
    BigFloat dist_to_int(const mpz_class& z) const {
        BigFloat r(prec());
        mpfr_sub_z(r.v_, v_, z.get_mpz_t(), MPFR_RNDN);
        mpfr_abs(r.v_, r.v_, MPFR_RNDN);
        return r;
    }

    // Convenience operators: round-to-nearest at the wider operand precision.
    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
        return add(a, b, std::max(a.prec(), b.prec()));
    }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
        return sub(a, b, std::max(a.prec(), b.prec()));
    }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
        return mul(a, b, std::max(a.prec(), b.prec()));
    }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
        return div(a, b, std::max(a.prec(), b.prec()));
    }

  private:
    mpfr_t v_;
};

/// Complex number at a fixed precision. Arithmetic is componentwise mpfr;
/// no error tracking here (callers account for it).
struct BigComplex {
    BigFloat re, im;

    explicit BigComplex(mpfr_prec_t prec = 64)
        : re(BigFloat::zero(prec)), im(BigFloat::zero(prec)) {}
    BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}

    mpfr_prec_t prec() const { return re.prec(); }

    BigComplex conj() const { return {re, im.neg()}; }

    static BigComplex add(const BigComplex& a, const BigComplex& b,
                          mpfr_prec_t p) {
        return {BigFloat::add(a.re, b.re, p), BigFloat::add(a.im, b.im, p)};
    }
    static BigComplex sub(const BigComplex& a, const BigComplex& b,
                          mpfr_prec_t p) {
        return {BigFloat::sub(a.re, b.re, p), BigFloat::sub(a.im, b.im, p)};
    }
    static BigComplex mul(const BigComplex& a, const BigComplex& b,
                          mpfr_prec_t p) {
        BigFloat ac = BigFloat::mul(a.re, b.re, p);
        BigFloat bd = BigFloat::mul(a.im, b.im, p);
        BigFloat ad = BigFloat::mul(a.re, b.im, p);
        BigFloat bc = BigFloat::mul(a.im, b.re, p);
        return {BigFloat::sub(ac, bd, p), BigFloat::add(ad, bc, p)};
    }
    static BigComplex mul_z(const BigComplex& a, const mpz_class& b,
                            mpfr_prec_t p) {
        return {BigFloat::mul_z(a.re, b, p), BigFloat::mul_z(a.im, b, p)};
    }
    static BigComplex mul_si(const BigComplex& a, long b, mpfr_prec_t p) {
        return {BigFloat::mul_si(a.re, b, p), BigFloat::mul_si(a.im, b, p)};
    }
    static BigComplex div(const BigComplex& a, const BigComplex& b,
                          mpfr_prec_t p) {
        BigFloat n = norm(b, p);
        BigComplex num = mul(a, b.conj(), p);
        return {BigFloat::div(num.re, n, p), BigFloat::div(num.im, n, p)};
    }
    /// |z|^2
    static BigFloat norm(const BigComplex& z, mpfr_prec_t p) {
        return BigFloat::add(BigFloat::sqr(z.re, p), BigFloat::sqr(z.im, p),
                             p);
    }
    /// |z| at precision p with directed rounding.
    static BigFloat abs(const BigComplex& z, mpfr_prec_t p,
                        mpfr_rnd_t rnd = MPFR_RNDN) {
        return BigFloat::hypot(z.re, z.im, p, rnd);
    }
};

} // namespace cmus

#endif
