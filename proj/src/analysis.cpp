#include "cmus/analysis.hpp"
#include "cmus/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <unordered_map>
#include <vector>

namespace cmus {

namespace {

// Quadrature cells live on a dyadic grid: the rectangle is
// [x0, x1] x [y0, y1] in units of 2^-s.  Corner coordinates therefore
// convert to double without rounding, and the unit-circle tests below stay
// in integer arithmetic, so domain membership of a whole cell is exact.
struct Cell {
    long long x0, x1, y0, y1;
    int s;
    int depth;
};

double dyad(long long n, int s) {
    return std::ldexp(static_cast<double>(n), -s);
}

// Integral of (3/pi)/y^2 over the cell, in closed form.
double cell_mass(const Cell& c) {
    const double w = dyad(c.x1 - c.x0, c.s);
    const double y0 = dyad(c.y0, c.s);
    const double y1 = dyad(c.y1, c.s);
    return 3.0 * std::numbers::inv_pi * w * (1.0 / y0 - 1.0 / y1);
}

long long absll(long long v) { return v < 0 ? -v : v; }

// |x| <= 1/2 holds for every cell by construction, so inclusion in the
// fundamental domain reduces to x^2 + y^2 >= 1 at the corner minimizing it.
// Coordinates stay below 2^46, so the 128-bit products are exact.
bool cell_inside_domain(const Cell& c) {
    if (c.y0 >= (1LL << c.s)) return true;
    const long long nx =
        (c.x0 <= 0 && c.x1 >= 0) ? 0 : std::min(absll(c.x0), absll(c.x1));
    return static_cast<__int128>(nx) * nx + static_cast<__int128>(c.y0) * c.y0 >=
           static_cast<__int128>(1) << (2 * c.s);
}

bool cell_outside_domain(const Cell& c) {
    const long long mx = std::max(absll(c.x0), absll(c.x1));
    return static_cast<__int128>(mx) * mx + static_cast<__int128>(c.y1) * c.y1 <
           static_cast<__int128>(1) << (2 * c.s);
}

void split(const Cell& c, std::vector<Cell>& out) {
    Cell b = c;
    if (((b.x1 - b.x0) | (b.y1 - b.y0)) & 1) {
        b.x0 *= 2;
        b.x1 *= 2;
        b.y0 *= 2;
        b.y1 *= 2;
        ++b.s;
    }
    const long long xm = (b.x0 + b.x1) / 2;
    const long long ym = (b.y0 + b.y1) / 2;
    const int d = c.depth + 1;
    out.push_back({b.x0, xm, b.y0, ym, b.s, d});
    out.push_back({xm, b.x1, b.y0, ym, b.s, d});
    out.push_back({b.x0, xm, ym, b.y1, b.s, d});
    out.push_back({xm, b.x1, ym, b.y1, b.s, d});
}

// Mass of the cusp region above the truncation height Y = 16:
// (3/pi) * integral over |x| <= 1/2, y > 16 of dx dy / y^2.
constexpr double kCuspMass = 3.0 * std::numbers::inv_pi / 16.0;

const double kSqrt3Half = 0.8660254037844386;

} // namespace

MeasureEstimate hyperbolic_measure(const Region& region, double tol) {
    if (!(tol > 0.0))
        throw InvalidArgument("measure tolerance must be positive");
    if (!region.contains && !region.cell_hint)
        throw InvalidArgument("region needs a point predicate or a cell hint");

    constexpr int depth_cap = 30;
    constexpr std::size_t cell_budget = 6'000'000;

    // The strip |x| <= 1/2, 886/1024 <= y <= 16 covers the fundamental
    // domain below the cusp cut (its lowest point is at y = sqrt(3)/2).
    std::vector<Cell> cur = {
        {-512, 512, 886, 1024, 10, 0},  {-512, 512, 1024, 2048, 10, 0},
        {-512, 512, 2048, 4096, 10, 0}, {-512, 512, 4096, 8192, 10, 0},
        {-512, 512, 8192, 16384, 10, 0},
    };

    double certain = 0.0; // mass certainly inside region and domain
    double fuzz = 0.0;    // mass of cells retired without a verdict
    std::size_t processed = 0;

    std::vector<Cell> next;
    while (!cur.empty()) {
        next.clear();
        double pending = 0.0;
        for (const Cell& c : cur) {
            if (++processed > cell_budget)
                throw ToleranceNotMet(
                    "subdivision budget exhausted before reaching the tolerance");
            const double x0 = dyad(c.x0, c.s), x1 = dyad(c.x1, c.s);
            const double y0 = dyad(c.y0, c.s), y1 = dyad(c.y1, c.s);
            const int hint =
                region.cell_hint ? region.cell_hint(x0, x1, y0, y1) : 0;
            if (hint < 0) continue;
            if (cell_outside_domain(c)) continue;
            const bool inside = cell_inside_domain(c);
            const double m = cell_mass(c);
            if (inside && hint > 0) {
                certain += m;
                continue;
            }
            // Sample the region only at points certainly inside the domain
            // (which keeps them above the Im >= 0.866 evaluation floor).
            if (inside && region.contains && c.depth >= region.min_trust_depth) {
                const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
                int yes = 0;
                yes += region.contains(x0, y0);
                yes += region.contains(x1, y0);
                yes += region.contains(x0, y1);
                yes += region.contains(x1, y1);
                yes += region.contains(xm, ym);
                if (yes == 5) {
                    certain += m;
                    continue;
                }
                if (yes == 0) continue;
            }
            if (c.depth >= depth_cap) {
                fuzz += m;
                continue;
            }
            split(c, next);
            pending += m;
        }
        // Once everything still unresolved fits inside the tolerance, charge
        // it to the error term instead of refining further.
        if (pending <= 1.8 * tol) {
            fuzz += pending;
            break;
        }
        cur.swap(next);
    }

    MeasureEstimate est;
    est.abserr = 0.5 * fuzz + 1e-9;
    est.value = certain + 0.5 * fuzz + (region.cusp_full ? kCuspMass : 0.0);
    est.region_desc = region.desc;
    if (est.abserr > tol)
        throw ToleranceNotMet("straddling mass did not fit inside the tolerance");
    return est;
}

namespace {

struct SampleKey {
    std::uint64_t x, y;
    bool operator==(const SampleKey&) const = default;
};

struct SampleKeyHash {
    std::size_t operator()(const SampleKey& k) const {
        std::uint64_t h = k.x * 0x9e3779b97f4a7c15ULL;
        h ^= h >> 29;
        h += k.y * 0xbf58476d1ce4e5b9ULL;
        h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }
};

} // namespace

MeasureEstimate sigma_eps_measure(double eps, double tol) {
    if (!(eps > 0.0) || eps > 1.0)
        throw InvalidArgument("eps must lie in (0, 1]");

    // At Im tau >= 1.25 the leading Fourier term dominates:
    // |j| >= e^{2 pi 1.25} (1 - 744 e^{-2 pi 1.25} - ...) > 1700, so the
    // sublevel set of any eps <= 1 lies strictly below that line.
    constexpr double kOutHeight = 1.25;

    auto cache = std::make_shared<
        std::unordered_map<SampleKey, bool, SampleKeyHash>>();
    const PrecisionContext ctx{128, 32};

    Region r;
    r.contains = [cache, eps, ctx](double x, double y) {
        if (y >= kOutHeight) return false;
        const SampleKey key{std::bit_cast<std::uint64_t>(x),
                            std::bit_cast<std::uint64_t>(y)};
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
        const BigComplex tau{BigFloat::of(x, 64), BigFloat::of(y, 64)};
        const bool v = certified_abs_less(tau, eps, ctx);
        cache->emplace(key, v);
        return v;
    };
    r.cell_hint = [](double, double, double y0, double) {
        return y0 >= kOutHeight ? -1 : 0;
    };
    r.min_trust_depth = 6;
    char buf[64];
    std::snprintf(buf, sizeof buf, "sublevel set |j| < %.17g", eps);
    r.desc = buf;
    return hyperbolic_measure(r, tol);
}

namespace {

constexpr double kSigmaTol = 1e-4;

MeasureEstimate cached_sigma(double eps) {
    static std::mutex mu;
    static std::map<double, MeasureEstimate> table;
    const std::lock_guard<std::mutex> lock(mu);
    auto it = table.find(eps);
    if (it == table.end())
        it = table.emplace(eps, sigma_eps_measure(eps, kSigmaTol)).first;
    return it->second;
}

} // namespace

EquidistRecord gamma_eps_count(const Discriminant& d, double eps,
                               const PrecisionContext& ctx) {
    if (!(eps > 0.0) || eps > 1.0)
        throw InvalidArgument("eps must lie in (0, 1]");
    const std::vector<ReducedForm> forms = reduced_forms(d);
    EquidistRecord rec;
    rec.delta = d;
    rec.eps = eps;
    rec.D = static_cast<long>(forms.size());
    for (const ReducedForm& f : forms)
        if (certified_abs_less(cm_point(f, d), eps, ctx)) ++rec.gamma_count;
    rec.mu_sigma = cached_sigma(eps);
    rec.deviation = std::abs(static_cast<double>(rec.gamma_count) /
                                 static_cast<double>(rec.D) -
                             rec.mu_sigma.value);
    return rec;
}

long neighborhood_count(const Discriminant& d, const mpz_class& j0, double eps,
                        const PrecisionContext& ctx) {
    if (!(eps > 0.0) || eps > 1.0)
        throw InvalidArgument("eps must lie in (0, 1]");
    long n = 0;
    for (const ReducedForm& f : reduced_forms(d))
        if (certified_shifted_abs_less(cm_point(f, d), j0, eps, ctx)) ++n;
    return n;
}

std::vector<LiouvilleRow> liouville_check(const Discriminant& d) {
    if (d.delta == -3)
        throw InvalidArgument(
            "liouville distances are measured to the corner orbit itself");
    constexpr mpfr_prec_t P = 64;
    const BigFloat half = BigFloat::of(0.5, P);
    const BigFloat corner_im = BigFloat::div(
        BigFloat::sqrt(BigFloat::of(3L, P), P), BigFloat::of(2L, P), P);
    const double bound =
        4.0 * std::log(2.0 * std::sqrt(static_cast<double>(-d.delta)));

    std::vector<LiouvilleRow> rows;
    for (const ReducedForm& f : reduced_forms(d)) {
        const CMPoint p = cm_point(f, d);
        const BigFloat re = BigFloat::div(BigFloat::of(static_cast<long>(p.num), P),
                                          BigFloat::of(static_cast<long>(2 * p.a), P), P);
        const BigFloat im =
            BigFloat::div(BigFloat::sqrt(BigFloat::of(static_cast<long>(p.absd), P), P),
                          BigFloat::of(static_cast<long>(2 * p.a), P), P);
        const BigFloat dy = BigFloat::sub(im, corner_im, P);
        const BigFloat d1 = BigFloat::hypot(BigFloat::sub(re, half, P), dy, P);
        const BigFloat d2 = BigFloat::hypot(BigFloat::add(re, half, P), dy, P);
        LiouvilleRow row;
        row.form = f;
        row.min_dist = std::min(d1.to_double(), d2.to_double());
        row.bound = bound;
        row.pass = -std::log(row.min_dist) <= bound;
        rows.push_back(row);
    }
    return rows;
}

double jzlb_constant_estimate(long grid_n) {
    if (grid_n < 1000)
        throw InvalidArgument("grid_n must be at least 1000");
    const long n = static_cast<long>(
        std::lround(std::ceil(std::sqrt(static_cast<double>(grid_n)))));
    const double y_lo = kSqrt3Half, y_hi = 4.0;
    const PrecisionContext ctx{64, 32};
    double best = std::numeric_limits<double>::infinity();
    for (long i = 0; i < n; ++i) {
        const double x = -0.5 + (i + 0.5) / static_cast<double>(n);
        for (long k = 0; k < n; ++k) {
            const double y =
                y_lo + (k + 0.5) * (y_hi - y_lo) / static_cast<double>(n);
            if (x * x + y * y < 1.0) continue;
            const CertifiedComplex cj =
                eval_j(BigComplex{BigFloat::of(x, 64), BigFloat::of(y, 64)}, ctx);
            const double jabs = BigComplex::abs(cj.value, 64).to_double();
            const double d1 = std::hypot(x - 0.5, y - kSqrt3Half);
            const double d2 = std::hypot(x + 0.5, y - kSqrt3Half);
            best = std::min(best, jabs / std::pow(d1 * d2, 3.0));
        }
    }
    return best;
}

double dioapprox_ratio(const Discriminant& d, EtaPoint eta) {
    constexpr mpfr_prec_t P = 64;
    const bool zeta = eta == EtaPoint::zeta;
    const long long want_num = zeta ? 1 : 0;
    const long long want_absd = zeta ? 3 : 4;
    const BigFloat ere = BigFloat::of(zeta ? 0.5 : 0.0, P);
    const BigFloat eim =
        zeta ? BigFloat::div(BigFloat::sqrt(BigFloat::of(3L, P), P),
                             BigFloat::of(2L, P), P)
             : BigFloat::of(1.0, P);

    double best = -std::numeric_limits<double>::infinity();
    for (const ReducedForm& f : reduced_forms(d)) {
        const CMPoint p = cm_point(f, d);
        if (p.a == 1 && p.num == want_num && p.absd == want_absd)
            throw EtaCollision("a CM point coincides with eta");
        const BigFloat re = BigFloat::div(BigFloat::of(static_cast<long>(p.num), P),
                                          BigFloat::of(static_cast<long>(2 * p.a), P), P);
        const BigFloat im =
            BigFloat::div(BigFloat::sqrt(BigFloat::of(static_cast<long>(p.absd), P), P),
                          BigFloat::of(static_cast<long>(2 * p.a), P), P);
        const BigFloat dist = BigFloat::hypot(BigFloat::sub(re, ere, P),
                                              BigFloat::sub(im, eim, P), P);
        const double v = -std::log(dist.to_double());
        const double log_b = std::max(1.0, tau_height(p));
        best = std::max(best, v / log_b);
    }
    return best;
}

} // namespace cmus
