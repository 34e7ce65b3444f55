#include "cmus/jeval.hpp"
#include "cmus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace cmus {

namespace {

// Precision for error-bound bookkeeping. Bounds are always rounded up
// (RNDU) so they stay valid majorants.
constexpr mpfr_prec_t EB = 96;

// Divisor-power sums sigma_3 and sigma_5, extended on demand by an
// incremental sieve. Readers hold the shared lock for the whole series
// summation; extension takes the exclusive lock, so element references
// stay valid while reading.
struct SigmaTables {
    std::shared_mutex mu;
    std::vector<mpz_class> s3, s5; // index 0 unused

    void ensure(size_t n) {
        std::unique_lock lk(mu);
        size_t old = s3.size();
        if (old > n) return;
        s3.resize(n + 1);
        s5.resize(n + 1);
        for (size_t d = 1; d <= n; ++d) {
            mpz_class d2 = mpz_class(static_cast<long>(d)) * static_cast<long>(d);
            mpz_class d3 = d2 * static_cast<long>(d);
            mpz_class d5 = d3 * d2;
            size_t start = old <= d ? d : ((old + d - 1) / d) * d;
            for (size_t m = start; m <= n; m += d) {
                s3[m] += d3;
                s5[m] += d5;
            }
        }
    }
};

SigmaTables& tables() {
    static SigmaTables t;
    return t;
}

BigFloat max_one(const BigFloat& x) {
    return x.cmp(1L) < 0 ? BigFloat::of(1L, EB) : x;
}

// Upper bound on |q| = e^{-2 pi Im tau}: exponent bounded above via a
// downward-rounded 2 pi y.
BigFloat q_abs_upper(const BigFloat& im) {
    BigFloat tp = BigFloat::pi(EB, MPFR_RNDD).mul_2si(1);
    BigFloat t = BigFloat::mul(tp, im, EB, MPFR_RNDD);
    return BigFloat::exp(t.neg(), EB, MPFR_RNDU);
}

// e^{2 pi i tau} at precision prec.
BigComplex q_value(const BigComplex& tau, mpfr_prec_t prec) {
    BigFloat two_pi = BigFloat::pi(prec).mul_2si(1);
    BigFloat th_re = BigFloat::mul(two_pi, tau.re, prec);
    BigFloat th_im = BigFloat::mul(two_pi, tau.im, prec);
    BigFloat radius = BigFloat::exp(th_im.neg(), prec);
    auto [s, c] = BigFloat::sin_cos(th_re, prec);
    return {BigFloat::mul(radius, c, prec), BigFloat::mul(radius, s, prec)};
}

// Smallest N >= 1 with e6_tail_bound(N, r) < 2^-target; the bound is
// monotone decreasing in N for r < 0.03, so binary search applies.
long choose_terms(long target, const BigFloat& r_ub) {
    BigFloat goal = BigFloat::pow2(-target);
    auto ok = [&](long n) {
        return detail::e6_tail_bound(n, r_ub).cmp(goal) < 0;
    };
    long hi = 1;
    while (!ok(hi)) {
        hi *= 2;
        if (hi > (1L << 28)) throw PrecisionExhausted("series term count");
    }
    long lo = std::max(1L, hi / 2);
    while (lo < hi) {
        long mid = lo + (hi - lo) / 2;
        if (ok(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return hi;
}

} // namespace

namespace detail {

// sum_{n>N} n^k r^n <= (N+1)^k r^{N+1} / (1 - sqrt r) for N >= 1, k <= 5,
// r <= 0.004344: each extra factor (1 + m/(N+1))^k r^{m/2} <= 1.  The
// leading constants absorb 240 zeta(3) resp. 504 zeta(5) and the 1/(1-sqrt r)
// factor: 240*1.20206*1.0706 < 310 and 504*1.03693*1.0706 < 561.
BigFloat e4_tail_bound(long N, const BigFloat& r_ub) {
    BigFloat t = BigFloat::pow_ui(BigFloat::of(N + 1, EB), 3, EB, MPFR_RNDU);
    t = BigFloat::mul(t, BigFloat::pow_ui(r_ub, static_cast<unsigned long>(N + 1), EB, MPFR_RNDU),
                      EB, MPFR_RNDU);
    return BigFloat::mul_si(t, 310, EB, MPFR_RNDU);
}

BigFloat e6_tail_bound(long N, const BigFloat& r_ub) {
    BigFloat t = BigFloat::pow_ui(BigFloat::of(N + 1, EB), 5, EB, MPFR_RNDU);
    t = BigFloat::mul(t, BigFloat::pow_ui(r_ub, static_cast<unsigned long>(N + 1), EB, MPFR_RNDU),
                      EB, MPFR_RNDU);
    return BigFloat::mul_si(t, 561, EB, MPFR_RNDU);
}

std::pair<BigComplex, BigComplex> eisenstein_pair(const BigComplex& tau,
                                                  mpfr_prec_t prec, long N) {
    tables().ensure(static_cast<size_t>(N));
    std::shared_lock lk(tables().mu);
    const auto& s3 = tables().s3;
    const auto& s5 = tables().s5;

    BigComplex q = q_value(tau, prec);
    BigComplex S3(prec), S5(prec);
    BigComplex qn = q;
    for (long n = 1; n <= N; ++n) {
        if (n > 1) qn = BigComplex::mul(qn, q, prec);
        S3 = BigComplex::add(S3, BigComplex::mul_z(qn, s3[n], prec), prec);
        S5 = BigComplex::add(S5, BigComplex::mul_z(qn, s5[n], prec), prec);
    }
    BigComplex E4{BigFloat::add(BigFloat::of(1L, prec),
                                BigFloat::mul_si(S3.re, 240, prec), prec),
                  BigFloat::mul_si(S3.im, 240, prec)};
    BigComplex E6{BigFloat::sub(BigFloat::of(1L, prec),
                                BigFloat::mul_si(S5.re, 504, prec), prec),
                  BigFloat::mul_si(S5.im, 504, prec).neg()};
    return {E4, E6};
}

} // namespace detail

BigComplex cm_tau(const CMPoint& p, mpfr_prec_t prec) {
    BigFloat re = BigFloat::div_si(BigFloat::of(static_cast<long>(p.num), prec),
                                   2 * p.a, prec);
    BigFloat im = BigFloat::div_si(
        BigFloat::sqrt(BigFloat::of(static_cast<long>(p.absd), prec), prec),
        2 * p.a, prec);
    return {re, im};
}

CertifiedComplex eval_j(const BigComplex& tau, const PrecisionContext& ctx) {
    if (ctx.work_bits < 64 || ctx.guard_bits < 32)
        throw InvalidArgument("precision context below the 64/32 bit floor");
    const long wb = ctx.work_bits, gb = ctx.guard_bits;

    double y = tau.im.to_double();
    if (!(y >= 0.866))
        throw InvalidArgument("eval_j needs Im tau >= 0.866, got " +
                              std::to_string(y));
    if (!(y <= 2048.0))
        throw InvalidArgument("eval_j imaginary part out of supported range");

    // The cusp term 1/q costs about 2 pi y / ln 2 leading bits; everything
    // past work+guard+cusp+64 is cushion for the rounding ledger below.
    const long cusp_bits =
        static_cast<long>(std::ceil(2.0 * M_PI * y * 1.4426950408889634)) + 2;
    const mpfr_prec_t P = wb + gb + cusp_bits + 64;

    BigFloat r_ub = q_abs_upper(tau.im);
    if (!(r_ub.cmp(0.004344) < 0))
        throw InvalidArgument("|q| bound out of range");

    // Tail target carries the cusp term: the A/D quotient amplifies series
    // truncation by about |q|^-2 while |j| only buys back one |q| factor.
    const long N = choose_terms(wb + gb + cusp_bits, r_ub);
    auto [E4, E6] = detail::eisenstein_pair(tau, P, N);

    // On Im tau >= 0.866 the series give |E4| <= 2.3 and |E6| <= 3.4; a
    // violation means the model's preconditions were broken.
    BigFloat absE4 = BigComplex::abs(E4, EB, MPFR_RNDU);
    BigFloat absE6 = BigComplex::abs(E6, EB, MPFR_RNDU);
    if (absE4.cmp(2.4) > 0 || absE6.cmp(3.5) > 0)
        throw Error("eisenstein magnitude outside certified range");

    BigComplex A = BigComplex::mul(BigComplex::mul(E4, E4, P), E4, P);
    BigComplex B = BigComplex::mul(E6, E6, P);
    BigComplex numr = BigComplex::sub(A, B, P);
    BigComplex D{BigFloat::div_si(numr.re, 1728, P),
                 BigFloat::div_si(numr.im, 1728, P)};
    BigComplex j = BigComplex::div(A, D, P);

    // Error ledger, all upper bounds at EB bits.
    //  - truncation: closed-form tail majorants at the chosen N;
    //  - rounding: per-series charge 8(N+16) ulps plus 2048(1+y) ulps for
    //    the argument reduction through e^{2 pi i tau} (the q-power chain
    //    inherits the relative error of q about n-fold at term n);
    //  - the cube/square/quotient steps use |E4| <= 2.3, |E6| <= 3.4.
    const BigFloat u = BigFloat::pow2(-static_cast<long>(P));
    BigFloat eround = BigFloat::mul_si(
        u, 8 * (N + 16) + 2048 * (1 + static_cast<long>(std::ceil(y))), EB,
        MPFR_RNDU);
    BigFloat e4 = BigFloat::add(detail::e4_tail_bound(N, r_ub), eround, EB,
                                MPFR_RNDU);
    BigFloat e6 = BigFloat::add(detail::e6_tail_bound(N, r_ub), eround, EB,
                                MPFR_RNDU);
    BigFloat eA = BigFloat::add(BigFloat::mul_si(e4, 16, EB, MPFR_RNDU),
                                u.mul_2si(7), EB, MPFR_RNDU);
    BigFloat eB = BigFloat::add(BigFloat::mul_si(e6, 7, EB, MPFR_RNDU),
                                u.mul_2si(6), EB, MPFR_RNDU);
    BigFloat eNum = BigFloat::add(BigFloat::add(eA, eB, EB, MPFR_RNDU),
                                  u.mul_2si(5), EB, MPFR_RNDU);
    BigFloat absD = BigComplex::abs(D, EB, MPFR_RNDU);
    BigFloat eD = BigFloat::add(BigFloat::div_si(eNum, 1728, EB, MPFR_RNDU),
                                BigFloat::mul(absD, u.mul_2si(1), EB, MPFR_RNDU),
                                EB, MPFR_RNDU);
    BigFloat absj = BigComplex::abs(j, EB, MPFR_RNDU);

    BigFloat D_lb = BigFloat::sub(BigComplex::abs(D, EB, MPFR_RNDD), eD, EB,
                                  MPFR_RNDD);
    if (D_lb.sign() <= 0)
        throw PrecisionExhausted("discriminant factor not separated from 0");

    BigFloat ej = BigFloat::div(
        BigFloat::add(eA, BigFloat::mul(absj, eD, EB, MPFR_RNDU), EB, MPFR_RNDU),
        D_lb, EB, MPFR_RNDU);
    ej = BigFloat::add(ej, BigFloat::mul(absj, u.mul_2si(2), EB, MPFR_RNDU), EB,
                       MPFR_RNDU);
    // Input-construction and derivative slack: |j'| <= 2^7 e^{2 pi y} on the
    // strip, so a tau built at precision >= P moves j by well under this.
    BigFloat err = BigFloat::add(
        ej,
        BigFloat::mul(BigFloat::pow2(-(wb + gb + 40)), max_one(absj), EB,
                      MPFR_RNDU),
        EB, MPFR_RNDU);

    CertifiedComplex out{{j.re.round_to(wb), j.im.round_to(wb)},
                         BigFloat::add(err,
                                       BigFloat::mul(absj,
                                                     BigFloat::pow2(1 - wb), EB,
                                                     MPFR_RNDU),
                                       EB, MPFR_RNDU)};

    // Contract: err <= 2^-(work-guard) max(1, |j|).
    BigFloat lb = BigFloat::sub(absj, out.err, EB, MPFR_RNDD);
    BigFloat cap = BigFloat::mul(BigFloat::pow2(-(wb - gb)), max_one(lb), EB,
                                 MPFR_RNDD);
    if (out.err.cmp(cap) > 0)
        throw PrecisionExhausted("certified error exceeds the contract cap");
    return out;
}

CertifiedComplex eval_j(const CMPoint& p, const PrecisionContext& ctx) {
    double y = p.im();
    long cusp_bits =
        static_cast<long>(std::ceil(2.0 * M_PI * y * 1.4426950408889634)) + 2;
    mpfr_prec_t P = ctx.work_bits + ctx.guard_bits + cusp_bits + 64;
    return eval_j(cm_tau(p, P), ctx);
}

std::vector<CertifiedComplex> eval_j_conjugates(const std::vector<CMPoint>& pts,
                                                const PrecisionContext& ctx) {
    std::map<std::pair<long, long long>, size_t> left; // (a, num), num < 0
    for (size_t i = 0; i < pts.size(); ++i)
        if (pts[i].num < 0) left.emplace(std::pair{pts[i].a, pts[i].num}, i);

    std::vector<CertifiedComplex> vals(
        pts.size(), CertifiedComplex{BigComplex(64), BigFloat(64)});
    std::vector<std::pair<size_t, size_t>> mirrored;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].num > 0) {
            auto it = left.find({pts[i].a, -pts[i].num});
            if (it != left.end()) {
                mirrored.emplace_back(i, it->second);
                continue;
            }
        }
        vals[i] = eval_j(pts[i], ctx);
    }
    for (auto [i, src] : mirrored)
        vals[i] = CertifiedComplex{vals[src].value.conj(), vals[src].err};
    return vals;
}

namespace {

template <typename Eval>
bool decide_abs_less(const Eval& eval, double eps, const PrecisionContext& ctx) {
    if (!(eps > 0)) throw InvalidArgument("threshold must be positive");
    BigFloat eps_b = BigFloat::of(eps, 64);
    long wb = std::max(ctx.work_bits, 64L);
    for (;;) {
        CertifiedComplex cj = eval(PrecisionContext{wb, ctx.guard_bits});
        // Enclosure endpoints need the full working precision: a fixed-width
        // rendering would floor the interval width at its own ulp and the
        // tie test below could then never fire.
        mpfr_prec_t pc = std::max<mpfr_prec_t>(EB, wb + 16);
        BigFloat hi = BigFloat::add(BigComplex::abs(cj.value, pc, MPFR_RNDU),
                                    cj.err, pc, MPFR_RNDU);
        if (hi.cmp(eps_b) < 0) return true;
        BigFloat lo = BigFloat::sub(BigComplex::abs(cj.value, pc, MPFR_RNDD),
                                    cj.err, pc, MPFR_RNDD);
        if (lo.cmp(eps_b) >= 0) return false;
        BigFloat width = BigFloat::sub(hi, lo, pc, MPFR_RNDU);
        if (width.cmp(BigFloat::pow2(-1024)) < 0)
            throw Undecidable("|j| sits on the threshold " +
                              std::to_string(eps) +
                              " within 2^-1024; boundary tie");
        wb *= 2;
        if (wb > (1L << 22))
            throw PrecisionExhausted("comparison precision cap reached");
    }
}

} // namespace

bool certified_abs_less(const BigComplex& tau, double eps,
                        const PrecisionContext& ctx) {
    return decide_abs_less(
        [&](const PrecisionContext& c) { return eval_j(tau, c); }, eps, ctx);
}

bool certified_abs_less(const CMPoint& p, double eps,
                        const PrecisionContext& ctx) {
    return decide_abs_less(
        [&](const PrecisionContext& c) { return eval_j(p, c); }, eps, ctx);
}

bool certified_shifted_abs_less(const CMPoint& p, const mpz_class& shift,
                                double eps, const PrecisionContext& ctx) {
    return decide_abs_less(
        [&](const PrecisionContext& c) {
            CertifiedComplex cj = eval_j(p, c);
            long wb = c.work_bits;
            BigComplex shifted{BigFloat::sub_z(cj.value.re, shift, wb), cj.value.im};
            BigFloat err = BigFloat::add(
                cj.err,
                BigFloat::mul(BigComplex::abs(shifted, EB, MPFR_RNDU),
                              BigFloat::pow2(1 - wb), EB, MPFR_RNDU),
                EB, MPFR_RNDU);
            return CertifiedComplex{shifted, err};
        },
        eps, ctx);
}

} // namespace cmus
