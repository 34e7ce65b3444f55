#include "cmus/heights.hpp"
#include "cmus/errors.hpp"
#include "cmus/forms.hpp"

#include <climits>
#include <cmath>
#include <vector>

namespace cmus {

namespace {

constexpr mpfr_prec_t EB = 96;

struct GraeffeBracket {
    BigFloat lo, hi; // encloses log M of the input polynomial
};

// Scaled Graeffe root-squaring: coefficients are kept renormalized to top
// exponent 0 with the exact power-of-two scale accumulated separately, and
// a worst-case absolute coefficient error rho is propagated every step.
// Returns false when rho outgrows 2^-48 (caller retries wider).
bool graeffe_bracket(const std::vector<mpz_class>& coeffs, long pg, int depth,
                     GraeffeBracket& out) {
    const long d = static_cast<long>(coeffs.size()) - 1;
    const mpfr_prec_t P = pg;

    std::vector<BigFloat> c;
    c.reserve(d + 1);
    for (const auto& z : coeffs) c.push_back(BigFloat::of(z, P));

    auto top_exponent = [&](const std::vector<BigFloat>& v) {
        long t = LONG_MIN;
        for (const auto& x : v)
            if (!x.is_zero() && x.exp2() > t) t = x.exp2();
        return t;
    };

    mpz_class scale = 0;
    BigFloat rho = BigFloat::zero(EB);
    { // initial rounding of the integer inputs: relative 2^(1-pg) of the top
        long t = top_exponent(c);
        for (auto& x : c) x = x.mul_2si(-t);
        scale = t;
        rho = BigFloat::pow2(1 - pg);
    }

    const BigFloat u = BigFloat::pow2(1 - pg);
    for (int step = 0; step < depth; ++step) {
        // (-1)^d (E(y)^2 - y O(y)^2) from the even/odd split of the current
        // polynomial; its roots are the squares of the current roots.
        std::vector<BigFloat> g(d + 1, BigFloat::zero(P));
        for (long i = 0; 2 * i <= d; ++i) {
            if (c[2 * i].is_zero()) continue;
            for (long j = 0; 2 * j <= d; ++j)
                g[i + j] = BigFloat::add(
                    g[i + j], BigFloat::mul(c[2 * i], c[2 * j], P), P);
        }
        for (long i = 0; 2 * i + 1 <= d; ++i) {
            if (c[2 * i + 1].is_zero()) continue;
            for (long j = 0; 2 * j + 1 <= d; ++j)
                g[i + j + 1] = BigFloat::sub(
                    g[i + j + 1], BigFloat::mul(c[2 * i + 1], c[2 * j + 1], P),
                    P);
        }
        if (d % 2) {
            for (auto& x : g) x = x.neg();
        }

        BigFloat B = BigFloat::zero(EB);
        for (const auto& x : c)
            if (x.cmp_abs(B) > 0) B = x.abs().round_to(EB, MPFR_RNDU);
        BigFloat rho_next = BigFloat::add(
            BigFloat::mul_si(BigFloat::mul(B, rho, EB, MPFR_RNDU),
                             2 * (d + 1), EB, MPFR_RNDU),
            BigFloat::mul_si(BigFloat::sqr(rho, EB, MPFR_RNDU), d + 1, EB,
                             MPFR_RNDU),
            EB, MPFR_RNDU);
        rho_next = BigFloat::add(
            rho_next,
            BigFloat::mul_si(BigFloat::mul(BigFloat::sqr(B, EB, MPFR_RNDU), u,
                                           EB, MPFR_RNDU),
                             4 * (d + 1) * (d + 1), EB, MPFR_RNDU),
            EB, MPFR_RNDU);

        long t = top_exponent(g);
        for (auto& x : g) x = x.mul_2si(-t);
        c = std::move(g);
        scale = 2 * scale + t;
        rho = rho_next.mul_2si(-t);
        if (rho.cmp(BigFloat::pow2(-48)) >= 0) return false;
    }

    // Landau bracket: M(G) <= ||G||_2 <= sqrt(binom(2d, d)) M(G), with the
    // certified coefficient slack folded into both ends.
    BigFloat s_hi = BigFloat::zero(EB), s_lo = BigFloat::zero(EB);
    for (const auto& x : c) {
        s_hi = BigFloat::add(s_hi, BigFloat::sqr(x, EB, MPFR_RNDU), EB,
                             MPFR_RNDU);
        s_lo = BigFloat::add(s_lo, BigFloat::sqr(x, EB, MPFR_RNDD), EB,
                             MPFR_RNDD);
    }
    BigFloat slack = BigFloat::mul_si(rho, d + 1, EB, MPFR_RNDU);
    BigFloat l2_hi = BigFloat::add(BigFloat::sqrt(s_hi, EB, MPFR_RNDU), slack,
                                   EB, MPFR_RNDU);
    BigFloat l2_lo = BigFloat::sub(BigFloat::sqrt(s_lo, EB, MPFR_RNDD), slack,
                                   EB, MPFR_RNDD);
    if (l2_lo.sign() <= 0) return false;

    const mpfr_prec_t PB = 320;
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), 2 * d, d);
    BigFloat half_log_binom =
        BigFloat::log(BigFloat::of(binom, PB), PB).mul_2si(-1);
    BigFloat base = BigFloat::mul_z(BigFloat::log(BigFloat::of(2L, PB), PB),
                                    scale, PB);
    out.lo = BigFloat::sub(BigFloat::add(base, BigFloat::log(l2_lo, PB), PB),
                           half_log_binom, PB)
                 .mul_2si(-depth);
    out.hi = BigFloat::add(base, BigFloat::log(l2_hi, PB), PB).mul_2si(-depth);
    return true;
}

} // namespace

HeightReport height_report(const Discriminant& d, const PrecisionContext& ctx,
                           const ClassPolynomial* poly) {
    ClassPolynomial own;
    if (!poly) {
        own = hilbert_class_poly(d);
        poly = &own;
    } else if (poly->delta.delta != d.delta) {
        throw InvalidArgument("class polynomial belongs to another delta");
    }
    const long W = ctx.work_bits;
    const long deg = poly->degree();

    HeightReport r;
    r.delta = d;
    r.nt_corr = nt_correction(d);
    if (poly->constant_term() == 0) { // only delta = -3: J = 0
        r.height = BigFloat::zero(W);
        r.pos_sum = BigFloat::zero(W);
        r.neg_sum = BigFloat::inf(-1);
        r.log_abs_norm = BigFloat::inf(-1);
        r.ratio = 0.0;
        return r;
    }

    std::vector<CMPoint> pts;
    for (const auto& f : reduced_forms(d)) pts.push_back(cm_point(f, d));
    std::vector<CertifiedComplex> vals = eval_j_conjugates(pts, ctx);

    BigFloat pos = BigFloat::zero(W), neg = BigFloat::zero(W);
    BigFloat widths = BigFloat::zero(EB), mags = BigFloat::zero(EB);
    for (const auto& v : vals) {
        BigFloat lo = BigFloat::sub(BigComplex::abs(v.value, EB, MPFR_RNDD),
                                    v.err, EB, MPFR_RNDD);
        if (lo.sign() <= 0)
            throw PrecisionExhausted(
                "conjugate modulus not separated from zero");
        BigFloat hi = BigFloat::add(BigComplex::abs(v.value, EB, MPFR_RNDU),
                                    v.err, EB, MPFR_RNDU);
        widths = BigFloat::add(
            widths,
            BigFloat::div(BigFloat::sub(hi, lo, EB, MPFR_RNDU), lo, EB,
                          MPFR_RNDU),
            EB, MPFR_RNDU);
        BigFloat l = BigFloat::log(BigComplex::abs(v.value, W), W);
        mags = BigFloat::add(mags, l.abs(), EB, MPFR_RNDU);
        if (l.sign() > 0)
            pos = BigFloat::add(pos, l, W);
        else
            neg = BigFloat::add(neg, l, W);
    }
    r.pos_sum = pos;
    r.neg_sum = neg;
    r.log_abs_norm = BigFloat::log(
        BigFloat::of(abs(poly->constant_term()), W), W);

    BigFloat resid = BigFloat::sub(BigFloat::add(pos, neg, W),
                                   r.log_abs_norm, W)
                         .abs();
    BigFloat tol = BigFloat::add(
        widths,
        BigFloat::mul(BigFloat::pow2(-W + 6),
                      BigFloat::add(BigFloat::add(mags, r.log_abs_norm.abs(),
                                                  EB, MPFR_RNDU),
                                    BigFloat::of(deg + 1, EB), EB, MPFR_RNDU),
                      EB, MPFR_RNDU),
        EB, MPFR_RNDU);
    if (resid.cmp(tol) > 0)
        throw Error("height decomposition does not match the exact norm");

    r.height = BigFloat::div(pos, BigFloat::of(deg, W), W);
    r.ratio = r.height.to_double() /
              std::log(static_cast<double>(-d.delta));
    return r;
}

BigFloat mahler_height(const ClassPolynomial& h) {
    if (h.coeffs.empty() || h.coeffs.back() != 1)
        throw InvalidArgument("mahler measure expects a monic polynomial");
    const long d = h.degree();
    // Bracket width is d ln2 / 2^depth plus float slack; depth 77 leaves
    // comfortable room under a 1e-20 comparison budget for desk degrees.
    const int depth = 77;
    long lg = 0;
    while ((1L << lg) < d + 1) ++lg;
    long pg = 192 + depth * (lg + 2);
    for (int tries = 0; tries < 4; ++tries, pg *= 2) {
        GraeffeBracket br{BigFloat(320), BigFloat(320)};
        if (!graeffe_bracket(h.coeffs, pg, depth, br)) continue;
        BigFloat mid = BigFloat::add(br.lo, br.hi, 320).mul_2si(-1);
        return BigFloat::div(mid, BigFloat::of(d, 320), 320);
    }
    throw PrecisionExhausted("graeffe error bound failed to stabilize");
}

std::pair<double, double> colmez_diagnostic(const Discriminant& d) {
    if (-d.delta < 4)
        throw InvalidArgument("diagnostic requires |delta| >= 4");
    HeightReport r = height_report(d);
    double h = r.height.to_double();
    return {h, h / std::log(static_cast<double>(-d.delta))};
}

std::pair<double, double> height_upper_decomposition(const Discriminant& d,
                                                     double eps,
                                                     const mpz_class& alpha) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw InvalidArgument("eps must lie in (0, 1]");
    ClassPolynomial H = hilbert_class_poly(d);
    if (!is_shifted_unit(H, alpha))
        throw PreconditionNotUnit("|H(alpha)| != 1 for this discriminant");

    PrecisionContext ctx{};
    std::vector<CMPoint> pts;
    for (const auto& f : reduced_forms(d)) pts.push_back(cm_point(f, d));
    long count = 0;
    double steepest = 0.0;
    for (const auto& p : pts) {
        if (!certified_shifted_abs_less(p, alpha, eps, ctx)) continue;
        ++count;
        CertifiedComplex cj = eval_j(p, ctx);
        BigComplex shifted{BigFloat::sub_z(cj.value.re, alpha, ctx.work_bits),
                           cj.value.im};
        double m = BigComplex::abs(shifted, 64, MPFR_RNDN).to_double();
        steepest = std::max(steepest, -std::log(m));
    }
    double term1 =
        count == 0 ? 0.0
                   : (static_cast<double>(count) / H.degree()) * steepest;
    return {term1, std::fabs(std::log(eps))};
}

} // namespace cmus
