#include "cmus/classpoly.hpp"
#include "cmus/bigfloat.hpp"
#include "cmus/errors.hpp"
#include "cmus/forms.hpp"
#include "cmus/jeval.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string_view>
#include <utility>
#include <vector>

namespace cmus {

namespace {

constexpr mpfr_prec_t EB = 96;

long starting_precision(const Discriminant& d) {
    const char* env = std::getenv("CMUS_PRECISION_POLICY");
    if (!env || !*env) return precision_budget(d);
    std::string_view s(env);
    if (s == "budget") return precision_budget(d);
    if (s.substr(0, 6) == "fixed:") {
        std::string_view t = s.substr(6);
        long bits = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), bits);
        if (ec == std::errc() && p == t.data() + t.size() && bits >= 64 &&
            bits <= (1L << 22))
            return bits;
    }
    throw InvalidArgument(
        "CMUS_PRECISION_POLICY must be budget or fixed:<bits in 64..4194304>");
}

} // namespace

long precision_budget(const Discriminant& d) {
    auto forms = reduced_forms(d);
    double inv_a = 0.0;
    for (const auto& f : forms) inv_a += 1.0 / static_cast<double>(f.a);
    double lead = M_PI * std::sqrt(static_cast<double>(-d.delta)) * inv_a /
                  std::log(2.0);
    return static_cast<long>(std::ceil(lead)) +
           16 * static_cast<long>(forms.size()) + 128;
}

ClassPolynomial hilbert_class_poly(const Discriminant& d) {
    auto forms = reduced_forms(d);
    std::vector<CMPoint> pts;
    pts.reserve(forms.size());
    for (const auto& f : forms) pts.push_back(cm_point(f, d));
    const size_t h = pts.size();

    long P = starting_precision(d);
    for (int attempt = 0; attempt <= 4; ++attempt, P *= 2) {
        std::vector<CertifiedComplex> roots;
        try {
            roots = eval_j_conjugates(pts, PrecisionContext{P, 64});
        } catch (const PrecisionExhausted&) {
            continue;
        }

        // Monic product, one root at a time; c[k] carries X^k. Appending a
        // root maps c to (shift by one) minus z * c, top slot first so each
        // source coefficient is consumed before it is overwritten.
        std::vector<BigComplex> c;
        c.emplace_back(P);
        c[0].re = BigFloat::of(1L, P);
        for (const auto& r : roots) {
            c.emplace_back(P);
            for (size_t k = c.size(); k-- > 1;)
                c[k] = BigComplex::sub(c[k - 1],
                                       BigComplex::mul(r.value, c[k], P), P);
            c[0] = BigComplex::sub(BigComplex(P),
                                   BigComplex::mul(r.value, c[0], P), P);
        }

        // Certified distance of the coefficient vector from the integers:
        //   sum_m e_m prod_{k != m} (1 + |z_k| + e_k)
        // for the root perturbations, plus 16 h^2 ulp for the assembly.
        BigFloat prod = BigFloat::of(1L, EB);
        BigFloat tsum = BigFloat::zero(EB);
        for (const auto& r : roots) {
            BigFloat m = BigComplex::abs(r.value, EB, MPFR_RNDU);
            prod = BigFloat::mul(
                prod,
                BigFloat::add(BigFloat::add(BigFloat::of(1L, EB), m, EB,
                                            MPFR_RNDU),
                              r.err, EB, MPFR_RNDU),
                EB, MPFR_RNDU);
            BigFloat den = BigFloat::add(BigFloat::of(1L, EB), m, EB,
                                         MPFR_RNDD);
            tsum = BigFloat::add(tsum,
                                 BigFloat::div(r.err, den, EB, MPFR_RNDU), EB,
                                 MPFR_RNDU);
        }
        BigFloat charge = BigFloat::mul_si(BigFloat::pow2(-P),
                                           16 * static_cast<long>(h * h), EB,
                                           MPFR_RNDU);
        BigFloat E = BigFloat::mul(prod,
                                   BigFloat::add(tsum, charge, EB, MPFR_RNDU),
                                   EB, MPFR_RNDU);

        std::vector<mpz_class> coeffs(h + 1);
        BigFloat worst = BigFloat::zero(EB);
        for (size_t k = 0; k <= h; ++k) {
            coeffs[k] = c[k].re.to_mpz();
            BigFloat dk = BigFloat::add(c[k].re.dist_to_int(coeffs[k]),
                                        c[k].im.abs(), EB, MPFR_RNDU);
            if (dk.cmp(worst) > 0) worst = dk;
        }
        BigFloat M = BigFloat::add(worst, E, EB, MPFR_RNDU);
        double margin = M.sign() > 0 ? -static_cast<double>(M.exp2()) : 1e9;
        if (margin >= 10.0 && coeffs[h] == 1) {
            ClassPolynomial out;
            out.delta = d;
            out.coeffs = std::move(coeffs);
            out.rounding_margin_bits = margin;
            out.precision_used = P;
            return out;
        }
    }
    throw PrecisionExhausted("class polynomial margin stayed below 10 bits");
}

mpz_class eval_at_integer(const ClassPolynomial& h, const mpz_class& alpha) {
    mpz_class r = 0;
    for (size_t k = h.coeffs.size(); k-- > 0;) r = r * alpha + h.coeffs[k];
    return r;
}

bool is_unit(const ClassPolynomial& h) {
    return mpz_cmpabs_ui(h.constant_term().get_mpz_t(), 1) == 0;
}

bool is_shifted_unit(const ClassPolynomial& h, const mpz_class& alpha) {
    mpz_class v = eval_at_integer(h, alpha);
    return mpz_cmpabs_ui(v.get_mpz_t(), 1) == 0;
}

std::string polynomial_text(const ClassPolynomial& h, int base) {
    if (base != 10 && base != 16)
        throw InvalidArgument("polynomial rendering supports base 10 or 16");
    const std::string prefix = base == 16 ? "0x" : "";
    auto power = [](long k) {
        if (k == 0) return std::string();
        return k == 1 ? std::string("X") : "X^" + std::to_string(k);
    };
    std::string s;
    for (long k = h.degree(); k >= 0; --k) {
        const mpz_class& c = h.coeffs[k];
        if (c == 0 && k < h.degree()) continue;
        const mpz_class mag = abs(c);
        if (s.empty()) {
            if (mag != 1 || k == 0) s += prefix + mag.get_str(base);
            if (mag != 1 && k > 0) s += "*";
            s += power(k);
            if (c < 0) s = "-" + s;
            continue;
        }
        s += c < 0 ? " - " : " + ";
        if (mag != 1 || k == 0) s += prefix + mag.get_str(base);
        if (mag != 1 && k > 0) s += "*";
        s += power(k);
    }
    return s;
}

} // namespace cmus
