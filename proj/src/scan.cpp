#include "cmus/scan.hpp"

#include "cmus/classpoly.hpp"
#include "cmus/errors.hpp"
#include "cmus/heights.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace cmus {

namespace {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string policy_string() {
    const char* env = std::getenv("CMUS_PRECISION_POLICY");
    return env && *env ? env : "budget";
}

void validate_config(const ScanConfig& cfg) {
    if (cfg.dmax < 3)
        throw InvalidArgument("scan requires dmax >= 3");
    if (cfg.workers < 1)
        throw InvalidArgument("scan requires at least one worker");
    for (double eps : cfg.eps_list)
        if (!(eps > 0.0) || eps > 1.0)
            throw InvalidArgument("every eps must lie in (0, 1]");
    if (!cfg.checkpoint_path.empty() && cfg.out_path.empty())
        throw InvalidArgument("checkpointing requires an output file");
    if (!cfg.checkpoint_path.empty() && cfg.csv)
        throw InvalidArgument("checkpointing supports the JSON-Lines format only");
}

} // namespace

std::vector<long long> scan_deltas(long long dmax) {
    std::vector<long long> out;
    for (long long n = 3; n <= dmax; ++n)
        if (n % 4 == 0 || n % 4 == 3) out.push_back(-n);
    return out;
}

std::string scan_config_hash(const ScanConfig& cfg) {
    std::string canon = "dmax=" + std::to_string(cfg.dmax) + ";shifts=";
    for (std::size_t i = 0; i < cfg.shifts.size(); ++i)
        canon += (i ? "," : "") + std::to_string(cfg.shifts[i]);
    canon += ";eps=";
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
        canon += (i ? "," : "") + fmt_real(cfg.eps_list[i]);
    canon += ";max_degree=" + std::to_string(cfg.max_degree);
    canon += ";csv=" + std::to_string(cfg.csv);
    canon += ";timing=" + std::to_string(cfg.timing);
    canon += ";dump=" + std::to_string(cfg.dump_const_terms);
    canon += ";policy=" + policy_string();

    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

ScanRecord compute_scan_record(const Discriminant& d, const ScanConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ScanRecord rec;
    rec.delta = d.delta;
    rec.delta0 = d.delta0;
    rec.f = d.f;

    const ClassPolynomial poly = hilbert_class_poly(d);
    rec.h = poly.degree();
    const mpz_class c0 = abs(poly.constant_term());
    rec.const_term = c0.get_str();
    rec.const_term_digits = static_cast<int>(rec.const_term.size());
    if (rec.const_term_digits > 64 && !cfg.dump_const_terms)
        rec.const_term.clear();
    rec.is_unit = is_unit(poly);
    for (long long a : cfg.shifts)
        rec.shifted_units.emplace_back(
            a, is_shifted_unit(poly, mpz_class(static_cast<long>(a))));

    const HeightReport hr = height_report(d, PrecisionContext{}, &poly);
    rec.height = hr.height.to_double();
    rec.colmez_ratio = -d.delta >= 4
                           ? hr.ratio
                           : std::numeric_limits<double>::quiet_NaN();

    if (!cfg.eps_list.empty()) {
        const PrecisionContext gctx{128, 32};
        const std::vector<ReducedForm> forms = reduced_forms(d);
        for (double eps : cfg.eps_list) {
            long cnt = 0;
            for (const ReducedForm& f : forms)
                cnt += certified_abs_less(cm_point(f, d), eps, gctx);
            rec.gamma_counts.emplace_back(eps, cnt);
        }
    }

    if (cfg.timing)
        rec.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    return rec;
}

std::string format_scan_record(const ScanRecord& rec) {
    std::string s = "{\"delta\":" + std::to_string(rec.delta);
    s += ",\"delta0\":" + std::to_string(rec.delta0);
    s += ",\"f\":" + std::to_string(rec.f);
    s += ",\"h\":" + std::to_string(rec.h);
    s += ",\"const_term_digits\":" + std::to_string(rec.const_term_digits);
    if (!rec.const_term.empty()) s += ",\"const_term\":\"" + rec.const_term + "\"";
    s += ",\"is_unit\":";
    s += rec.is_unit ? "true" : "false";
    s += ",\"shifted_units\":[";
    for (std::size_t i = 0; i < rec.shifted_units.size(); ++i) {
        if (i) s += ",";
        s += "[" + std::to_string(rec.shifted_units[i].first) + "," +
             (rec.shifted_units[i].second ? "true" : "false") + "]";
    }
    s += "],\"height\":" + fmt_real(rec.height);
    s += ",\"colmez_ratio\":";
    s += std::isnan(rec.colmez_ratio) ? "null" : fmt_real(rec.colmez_ratio);
    s += ",\"gamma_counts\":[";
    for (std::size_t i = 0; i < rec.gamma_counts.size(); ++i) {
        if (i) s += ",";
        s += "[" + fmt_real(rec.gamma_counts[i].first) + "," +
             std::to_string(rec.gamma_counts[i].second) + "]";
    }
    s += "],\"elapsed_ms\":" + std::to_string(rec.elapsed_ms);
    s += "}";
    return s;
}

namespace {

std::string csv_rows(const ScanRecord& rec) {
    std::string base = std::to_string(rec.delta) + "," +
                       std::to_string(rec.delta0) + "," + std::to_string(rec.f) +
                       "," + std::to_string(rec.h) + "," +
                       std::to_string(rec.const_term_digits) + "," +
                       (rec.is_unit ? "true" : "false");
    std::string tail = fmt_real(rec.height) + "," +
                       (std::isnan(rec.colmez_ratio)
                            ? std::string()
                            : fmt_real(rec.colmez_ratio)) +
                       "," + std::to_string(rec.elapsed_ms);
    std::string out;
    if (rec.shifted_units.empty()) {
        out = base + ",,," + tail + "\n";
    } else {
        for (const auto& [alpha, flag] : rec.shifted_units)
            out += base + "," + std::to_string(alpha) + "," +
                   (flag ? "true" : "false") + "," + tail + "\n";
    }
    return out;
}

constexpr const char* kCsvHeader =
    "delta,delta0,f,h,const_term_digits,is_unit,alpha,alpha_is_unit,height,"
    "colmez_ratio,elapsed_ms\n";

void write_checkpoint_file(const std::string& path, const Checkpoint& ck) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os)
            throw IoFailure("cannot write checkpoint: " + tmp);
        os << "{\"last_completed_delta\":" << ck.last_completed_delta
           << ",\"config_hash\":\"" << ck.config_hash
           << "\",\"records_written\":" << ck.records_written << "}\n";
        if (!os.flush())
            throw IoFailure("cannot flush checkpoint: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoFailure("cannot replace checkpoint: " + path);
}

Checkpoint read_checkpoint_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw IoFailure("cannot read checkpoint: " + path);
    Checkpoint ck;
    try {
        const nlohmann::json j = nlohmann::json::parse(is);
        ck.last_completed_delta = j.at("last_completed_delta").get<long long>();
        ck.config_hash = j.at("config_hash").get<std::string>();
        ck.records_written = j.at("records_written").get<long long>();
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure("malformed checkpoint " + path + ": " + e.what());
    }
    return ck;
}

// Keep the first n_lines complete lines of the output file, dropping
// anything after them (rows written past the last checkpoint, or a torn
// final line), atomically via a temp file.
void truncate_to_lines(const std::string& path, long long n_lines) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        if (n_lines == 0) return; // nothing written yet is consistent
        throw IoFailure("checkpoint expects rows but output is unreadable: " +
                        path);
    }
    std::string keep;
    std::string line;
    long long got = 0;
    while (got < n_lines && std::getline(is, line)) {
        keep += line;
        keep += '\n';
        ++got;
    }
    if (got < n_lines)
        throw IoFailure("output file has fewer rows than the checkpoint: " +
                        path);
    is.close();
    const std::string tmp = path + ".tmp";
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os || !(os << keep).flush())
        throw IoFailure("cannot rewrite output prefix: " + tmp);
    os.close();
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoFailure("cannot replace output: " + path);
}

struct Slot {
    bool emit = false;
    bool precision_fail = false;
    std::string payload;
    bool is_unit = false;
    long long shifted_true = 0;
    double colmez = std::numeric_limits<double>::quiet_NaN();
};

} // namespace

ScanSummary run_scan(const ScanConfig& cfg) {
    validate_config(cfg);
    const std::vector<long long> deltas = scan_deltas(cfg.dmax);
    const std::string hash = scan_config_hash(cfg);

    std::size_t head = 0;       // next delta index to drain
    long long written = 0;      // rows already in the output
    const bool to_file = !cfg.out_path.empty();

    if (!cfg.checkpoint_path.empty()) {
        std::ifstream probe(cfg.checkpoint_path);
        if (probe.good()) {
            const Checkpoint ck = read_checkpoint_file(cfg.checkpoint_path);
            if (ck.config_hash != hash)
                throw ConfigMismatch(
                    "checkpoint was written under a different configuration");
            truncate_to_lines(cfg.out_path, ck.records_written);
            written = ck.records_written;
            while (head < deltas.size() &&
                   deltas[head] >= ck.last_completed_delta)
                ++head; // deltas decrease; completed ones are >= the marker
        }
    }

    std::ofstream file_out;
    if (to_file) {
        const auto mode = written > 0 ? std::ios::app : std::ios::trunc;
        file_out.open(cfg.out_path, std::ios::binary | mode);
        if (!file_out)
            throw IoFailure("cannot open output: " + cfg.out_path);
    }
    std::ostream& out = to_file ? file_out : std::cout;
    if (cfg.csv && written == 0) out << kCsvHeader;

    ScanSummary sum;
    sum.min_colmez_ratio = std::numeric_limits<double>::infinity();

    std::atomic<std::size_t> next{head};
    std::atomic<bool> stop{false};
    std::mutex mu; // guards ready/head/written/out/sum and checkpointing
    std::map<std::size_t, Slot> ready;
    long long last_ck_written = written;
    std::exception_ptr worker_failure;

    auto drain_locked = [&] {
        while (!stop.load() && !ready.empty() && ready.begin()->first == head) {
            Slot& s = ready.begin()->second;
            if (s.precision_fail) {
                ++sum.skipped_precision;
                sum.exit_code = 2;
            }
            if (s.emit) {
                out << s.payload;
                ++written;
                ++sum.records;
                sum.units_found += s.is_unit;
                sum.shifted_units_found += s.shifted_true;
                if (!std::isnan(s.colmez))
                    sum.min_colmez_ratio =
                        std::min(sum.min_colmez_ratio, s.colmez);
            }
            ++head;
            ready.erase(ready.begin());
            if (!cfg.checkpoint_path.empty() && written - last_ck_written >= 16) {
                out.flush();
                write_checkpoint_file(
                    cfg.checkpoint_path,
                    {deltas[head - 1], hash, written});
                last_ck_written = written;
            }
            if (cfg.abort_after > 0 && written >= cfg.abort_after) {
                stop.store(true);
                sum.aborted = true;
                return;
            }
        }
    };

    auto work = [&] {
        for (;;) {
            if (stop.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= deltas.size()) return;
            Slot s;
            try {
                const Discriminant d = validate_discriminant(deltas[i]);
                if (cfg.max_degree > 0 && class_number(d) > cfg.max_degree) {
                    // filtered quietly; the row count is what changes
                } else {
                    const ScanRecord rec = compute_scan_record(d, cfg);
                    s.emit = true;
                    s.payload = cfg.csv ? csv_rows(rec)
                                        : format_scan_record(rec) + "\n";
                    s.is_unit = rec.is_unit;
                    for (const auto& [alpha, flag] : rec.shifted_units)
                        s.shifted_true += flag;
                    s.colmez = rec.colmez_ratio;
                }
            } catch (const PrecisionExhausted&) {
                s.precision_fail = true;
            } catch (...) {
                const std::lock_guard<std::mutex> lk(mu);
                if (!worker_failure) worker_failure = std::current_exception();
                stop.store(true);
                return;
            }
            const std::lock_guard<std::mutex> lk(mu);
            try {
                ready[i] = std::move(s);
                drain_locked();
            } catch (...) {
                if (!worker_failure) worker_failure = std::current_exception();
                stop.store(true);
                return;
            }
        }
    };

    if (cfg.workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < cfg.workers; ++k) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    if (worker_failure) std::rethrow_exception(worker_failure);

    out.flush();
    if (to_file && !file_out)
        throw IoFailure("write failed: " + cfg.out_path);
    if (!cfg.checkpoint_path.empty() && !sum.aborted) {
        const long long last = head > 0 ? deltas[head - 1] : -3;
        write_checkpoint_file(cfg.checkpoint_path, {last, hash, written});
    }
    if (sum.records == 0 || !std::isfinite(sum.min_colmez_ratio))
        sum.min_colmez_ratio = 0.0;
    return sum;
}

} // namespace cmus
