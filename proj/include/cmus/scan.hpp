#ifndef CMUS_SCAN_HPP
#define CMUS_SCAN_HPP

#include "cmus/discriminant.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cmus {

// One JSON-Lines row of a discriminant scan.  const_term holds the exact
// decimal digits of |H(0)| when they fit in 64 characters (or when the dump
// flag forces them); const_term_digits always carries the digit count.
// colmez_ratio is NaN for delta = -3, serialized as null (the height is 0
// and the ratio to log|delta| is not meaningful there).
struct ScanRecord {
    long long delta = 0, delta0 = 0, f = 1;
    long long h = 0;
    int const_term_digits = 0;
    std::string const_term;
    bool is_unit = false;
    std::vector<std::pair<long long, bool>> shifted_units;
    double height = 0.0;
    double colmez_ratio = 0.0;
    std::vector<std::pair<double, long>> gamma_counts;
    long long elapsed_ms = 0;
};

struct Checkpoint {
    long long last_completed_delta = 0;
    std::string config_hash;
    long long records_written = 0;
};

struct ScanConfig {
    long long dmax = 0;
    std::vector<long long> shifts;
    std::vector<double> eps_list;
    int workers = 1;
    std::string out_path;        // empty writes to stdout
    std::string checkpoint_path; // empty disables checkpointing
    long long max_degree = 0;    // 0 disables the class-number filter
    bool csv = false;
    bool timing = false;         // real elapsed_ms values (not reproducible)
    bool dump_const_terms = false;
    long long abort_after = 0;   // stop after N records, as a crash would
};

struct ScanSummary {
    long long records = 0;
    long long units_found = 0;
    long long shifted_units_found = 0;
    long long skipped_precision = 0;
    double min_colmez_ratio = 0.0; // over |delta| >= 4; 0 when none scanned
    bool aborted = false;
    int exit_code = 0; // 0, or 2 when any row was lost to PrecisionExhausted
};

// All discriminants with |delta| <= dmax, in increasing |delta|.
std::vector<long long> scan_deltas(long long dmax);

// FNV-1a over the semantic configuration (dmax, shifts, eps list, degree
// filter, output shape, precision policy); resuming under a different hash
// is refused.
std::string scan_config_hash(const ScanConfig& cfg);

// The full per-discriminant pipeline: class polynomial, unit tests, height
// decomposition, and the certified sublevel counts for cfg.eps_list.
ScanRecord compute_scan_record(const Discriminant& d, const ScanConfig& cfg);

std::string format_scan_record(const ScanRecord& rec);

// Runs the scan over scan_deltas(cfg.dmax) with cfg.workers threads.  Rows
// are computed out of order but written strictly in increasing |delta|;
// with a checkpoint path the scan can resume after an interruption without
// duplicating or dropping a row, refusing a changed configuration with
// ConfigMismatch.  Rows whose computation dies with PrecisionExhausted are
// skipped and reported through exit_code = 2.
ScanSummary run_scan(const ScanConfig& cfg);

} // namespace cmus

#endif
