#include <CLI11.hpp>

#include "cmus/analysis.hpp"
#include "cmus/classpoly.hpp"
#include "cmus/discriminant.hpp"
#include "cmus/errors.hpp"
#include "cmus/forms.hpp"
#include "cmus/heights.hpp"
#include "cmus/jeval.hpp"
#include "cmus/scan.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

using namespace cmus;

int cmd_scan(const ScanConfig& cfg) {
    const ScanSummary sum = run_scan(cfg);
    std::fprintf(stderr, "records: %lld\n", sum.records);
    std::fprintf(stderr, "units found: %lld\n", sum.units_found);
    std::fprintf(stderr, "shifted units found: %lld\n",
                 sum.shifted_units_found);
    if (sum.skipped_precision > 0)
        std::fprintf(stderr, "skipped (precision exhausted): %lld\n",
                     sum.skipped_precision);
    if (sum.min_colmez_ratio > 0.0)
        std::fprintf(stderr, "min colmez ratio: %.6g\n", sum.min_colmez_ratio);
    if (sum.aborted)
        std::fprintf(stderr, "aborted after %lld records\n", sum.records);
    return sum.exit_code;
}

int cmd_classpoly(long long delta, bool hex) {
    const Discriminant d = validate_discriminant(delta);
    const ClassPolynomial poly = hilbert_class_poly(d);
    const int base = hex ? 16 : 10;
    std::printf("H(%lld) = %s\n", delta, polynomial_text(poly, base).c_str());
    std::string coeffs;
    for (const mpz_class& c : poly.coeffs) {
        if (!coeffs.empty()) coeffs += " ";
        if (hex && c < 0) coeffs += "-0x" + mpz_class(abs(c)).get_str(16);
        else if (hex) coeffs += "0x" + c.get_str(16);
        else coeffs += c.get_str();
    }
    std::printf("coefficients (low to high): %s\n", coeffs.c_str());
    std::printf("rounding margin bits: %.1f\n", poly.rounding_margin_bits);
    std::printf("precision used: %ld\n", poly.precision_used);
    return 0;
}

int cmd_measure(double eps, double tol, bool full_domain) {
    if (full_domain) {
        Region all;
        all.contains = [](double, double) { return true; };
        all.cell_hint = [](double, double, double, double) { return 1; };
        all.cusp_full = true;
        all.desc = "full fundamental domain";
        const MeasureEstimate m = hyperbolic_measure(all, tol);
        std::printf("mu(F) = %.10g +/- %.3g\n", m.value, m.abserr);
        return 0;
    }
    const MeasureEstimate m = sigma_eps_measure(eps, tol);
    std::printf("mu(Sigma_eps), eps = %g: %.10g +/- %.3g\n", eps, m.value,
                m.abserr);
    std::printf("ratio to eps^(2/3): %.10g\n",
                m.value / std::pow(eps, 2.0 / 3.0));
    return 0;
}

int cmd_report(long long delta) {
    const Discriminant d = validate_discriminant(delta);
    if (d.f == 1)
        std::printf("delta: %lld (fundamental)\n", d.delta);
    else
        std::printf("delta: %lld = %lld * %lld^2\n", d.delta, d.delta0, d.f);

    const ClassPolynomial poly = hilbert_class_poly(d);
    std::printf("class number: %ld\n", poly.degree());
    std::printf("H(%lld) = %s\n", delta, polynomial_text(poly).c_str());
    const mpz_class c0 = abs(poly.constant_term());
    const std::string c0s = c0.get_str();
    std::printf("|H(0)| = %s (%zu digit%s); unit: %s\n", c0s.c_str(),
                c0s.size(), c0s.size() == 1 ? "" : "s",
                is_unit(poly) ? "yes" : "no");

    const PrecisionContext ctx;
    const std::vector<ReducedForm> forms = reduced_forms(d);
    std::vector<CMPoint> pts;
    for (const ReducedForm& f : forms) pts.push_back(cm_point(f, d));
    const std::vector<CertifiedComplex> vals = eval_j_conjugates(pts, ctx);
    std::printf("conjugates (certified):\n");
    for (std::size_t i = 0; i < forms.size(); ++i) {
        const double jabs =
            BigFloat::hypot(vals[i].value.re, vals[i].value.im, 64)
                .to_double();
        std::printf("  form (%lld,%lld,%lld)  tau = %.8f%+.8fi  "
                    "|j| = %.8e +/- %.2e\n",
                    forms[i].a, forms[i].b, forms[i].c, pts[i].re(),
                    pts[i].im(), jabs, vals[i].err.to_double());
    }

    const HeightReport hr = height_report(d, ctx, &poly);
    std::printf("height: %.10g\n", hr.height.to_double());
    std::printf("  pos sum: %.10g  neg sum: %.10g  log|H(0)|: %.10g\n",
                hr.pos_sum.to_double(), hr.neg_sum.to_double(),
                hr.log_abs_norm.to_double());
    if (-d.delta >= 4)
        std::printf("colmez ratio: %.10g (height / log %lld)\n", hr.ratio,
                    -d.delta);
    else
        std::printf("colmez ratio: n/a (height is 0)\n");
    std::printf("conductor correction: %.10g\n", hr.nt_corr);

    if (d.delta == -3) {
        std::printf("liouville check: skipped (the CM point is the corner "
                    "zero itself)\n");
    } else {
        std::printf("liouville check (corner distances):\n");
        for (const LiouvilleRow& row : liouville_check(d))
            std::printf("  form (%lld,%lld,%lld): -log min dist = %.6g <= "
                        "%.6g  %s\n",
                        row.form.a, row.form.b, row.form.c,
                        -std::log(row.min_dist), row.bound,
                        row.pass ? "ok" : "VIOLATED");
    }

    const EquidistRecord eq = gamma_eps_count(d, 0.5, ctx);
    std::printf("gamma count, eps = 0.5: %ld of %ld\n", eq.gamma_count, eq.D);
    std::printf("mu(Sigma_0.5) = %.6g +/- %.2g, deviation = %.6g\n",
                eq.mu_sigma.value, eq.mu_sigma.abserr, eq.deviation);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"singular modulus toolkit: class polynomials, certified "
                 "j-values, heights, unit scans"};
    app.require_subcommand(1);

    ScanConfig cfg;
    CLI::App* scan = app.add_subcommand(
        "scan", "sweep all discriminants |delta| <= dmax");
    scan->add_option("--dmax", cfg.dmax, "largest |delta| to scan")
        ->required();
    scan->add_option("--shift", cfg.shifts,
                     "also test whether J - shift is a unit (repeatable)");
    scan->add_option("--eps", cfg.eps_list,
                     "count conjugates with |j| < eps (repeatable, in (0,1])");
    scan->add_option("--workers", cfg.workers, "worker threads")
        ->default_val(1);
    scan->add_option("--out", cfg.out_path, "output path (default: stdout)");
    scan->add_option("--checkpoint", cfg.checkpoint_path,
                     "checkpoint path for resumable scans (requires --out)");
    scan->add_option("--max-degree", cfg.max_degree,
                     "emit only rows with class number <= this");
    scan->add_flag("--csv", cfg.csv, "flat CSV instead of JSON lines");
    scan->add_flag("--timing", cfg.timing,
                   "real per-row elapsed_ms (breaks byte reproducibility)");
    scan->add_flag("--dump-const-terms", cfg.dump_const_terms,
                   "emit |H(0)| digits even past 64 characters");
    scan->add_option("--abort-after", cfg.abort_after,
                     "stop ungracefully after N records (recovery testing)");

    long long cp_delta = 0;
    bool hex = false;
    CLI::App* cpoly = app.add_subcommand(
        "classpoly", "print the class polynomial of one discriminant");
    cpoly->add_option("-d,--delta", cp_delta, "discriminant (negative)")
        ->required();
    cpoly->add_flag("--hex", hex, "hexadecimal coefficients");

    double eps = 0.0, tol = 1e-3;
    bool full_domain = false;
    CLI::App* measure = app.add_subcommand(
        "measure", "hyperbolic mass of the sublevel set |j| < eps");
    CLI::Option* eps_opt =
        measure->add_option("--eps", eps, "sublevel threshold, in (0,1]");
    measure->add_option("--tol", tol, "quadrature tolerance")
        ->default_val(1e-3);
    CLI::Option* full_opt = measure->add_flag(
        "--full-domain", full_domain,
        "measure the whole fundamental domain instead (mass 1 check)");
    eps_opt->excludes(full_opt);
    full_opt->excludes(eps_opt);

    long long rp_delta = 0;
    CLI::App* report = app.add_subcommand(
        "report", "every diagnostic for one discriminant");
    report->add_option("-d,--delta", rp_delta, "discriminant (negative)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (scan->parsed()) return cmd_scan(cfg);
        if (cpoly->parsed()) return cmd_classpoly(cp_delta, hex);
        if (measure->parsed()) {
            if (!*eps_opt && !full_domain) {
                std::fprintf(stderr,
                             "measure needs --eps or --full-domain\n");
                return 1;
            }
            return cmd_measure(eps, tol, full_domain);
        }
        if (report->parsed()) return cmd_report(rp_delta);
    } catch (const PrecisionExhausted& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Undecidable& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ToleranceNotMet& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
