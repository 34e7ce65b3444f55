#ifndef CMUS_ANALYSIS_HPP
#define CMUS_ANALYSIS_HPP

#include "cmus/jeval.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cmus {

// value approximates the hyperbolic probability mass (3/pi) dx dy / y^2 of a
// region of the fundamental domain; the true mass lies in [value - abserr,
// value + abserr] up to the sampling caveat documented at hyperbolic_measure.
struct MeasureEstimate {
    double value = 0.0;
    double abserr = 0.0;
    std::string region_desc;
};

// A region of the fundamental domain, described to the quadrature engine.
// contains() is consulted only at points that certainly lie in the domain
// (so Im >= 0.866 always holds there).  cell_hint, when set, may classify a
// whole rectangle [x0,x1] x [y0,y1]: -1 disjoint from the region, +1
// contained in it, 0 unknown; it runs before any sampling and is the only
// way a verdict on a cell can be exact rather than sampled.  cusp_full
// declares that the region contains everything above the truncation height
// Im = 16, whose mass is added in closed form.  min_trust_depth keeps the
// engine subdividing past coarse cells before it believes a unanimous
// sample verdict.
struct Region {
    std::function<bool(double x, double y)> contains;
    std::function<int(double x0, double x1, double y0, double y1)> cell_hint;
    bool cusp_full = false;
    long min_trust_depth = 0;
    std::string desc;
};

// Adaptive axis-aligned quadrature of (3/pi)/y^2 over (region intersect
// fundamental domain).  Cells are bisected until the mass of those still
// straddling the domain or region boundary fits inside tol; that mass is
// what abserr reports.  Domain membership per cell is decided exactly in
// integer arithmetic; region membership uses cell_hint when it answers and
// corner-plus-center sampling otherwise, so the bound is rigorous up to
// boundary wiggles finer than the final cells.  Throws ToleranceNotMet when
// the subdivision budget runs out first.
MeasureEstimate hyperbolic_measure(const Region& region, double tol);

// Mass of the sublevel set { tau : |j(tau)| < eps } for eps in (0,1], built
// on hyperbolic_measure with certified point tests.
MeasureEstimate sigma_eps_measure(double eps, double tol);

// How the conjugate set of a discriminant meets the sublevel set above:
// gamma_count of the D = h(delta) points land in it, against expected mass
// mu_sigma; deviation = |gamma_count/D - mu_sigma.value|.
struct EquidistRecord {
    Discriminant delta;
    double eps = 0.0;
    long gamma_count = 0;
    long D = 0;
    MeasureEstimate mu_sigma;
    double deviation = 0.0;
};

EquidistRecord gamma_eps_count(const Discriminant& d, double eps,
                               const PrecisionContext& ctx);

// Number of conjugates with |j(tau) - j0| < eps for an integer j0.
long neighborhood_count(const Discriminant& d, const mpz_class& j0, double eps,
                        const PrecisionContext& ctx);

// For each form, the distance from its CM point to the corner orbit
// { zeta, zeta^2 }, zeta = e^{i pi / 3}, against the Liouville-type bound
//   -log min_dist <= 4 log(2 sqrt |delta|).
struct LiouvilleRow {
    ReducedForm form;
    double min_dist = 0.0;
    double bound = 0.0;
    bool pass = false;
};

std::vector<LiouvilleRow> liouville_check(const Discriminant& d);

// Grid estimate of inf |j(tau)| / (|tau - zeta|^3 |tau - zeta^2|^3) over the
// fundamental domain with Im tau <= 4 (the ratio grows like |j| toward the
// cusp, so the truncation does not disturb the infimum).  grid_n is the
// approximate total number of grid points, at least 1000.
double jzlb_constant_estimate(long grid_n);

// The two distinguished points eta used below: zeta = (1 + i sqrt 3)/2 and i.
enum class EtaPoint { zeta, gauss_i };

// max over conjugates of (-log |tau - eta|) / log B with log B = max(1,
// h(tau)); throws EtaCollision if some CM point equals eta exactly.
double dioapprox_ratio(const Discriminant& d, EtaPoint eta);

} // namespace cmus

#endif
