#include "dpsim/experiments.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dpsim/coldboot.h"
#include "dpsim/primitives.h"
#include "dpsim/puf.h"
#include "dpsim/randomness.h"

namespace dpsim {

namespace {

Value I(std::uint64_t x) { return Value(std::int64_t(x)); }
Value D(double x) { return Value(x); }
Value S(std::string s) { return Value(std::move(s)); }
const Value kNone = Value(std::string());

double quantile(std::vector<double> v, double q)
{
    if (v.empty())
        return std::nan("");
    std::sort(v.begin(), v.end());
    double h = q * double(v.size() - 1);
    std::size_t lo = std::size_t(std::floor(h));
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

double mean(const std::vector<double>& v)
{
    return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double fraction_one(const std::vector<double>& v)
{
    if (v.empty())
        return std::nan("");
    return double(std::count(v.begin(), v.end(), 1.0)) / double(v.size());
}

// pair sampling seed per experiment, fixed by the master seed
std::uint64_t pair_seed(const DramConfig& c, std::uint64_t salt)
{
    return c.variation.master_seed * 0x9e3779b97f4a7c15ull + salt;
}

std::uint64_t device_segments(const DramConfig& c)
{
    return Segment::count(c.puf.segment_bytes, c.geometry);
}

std::vector<std::uint64_t> first_segments(const DramConfig& c, std::uint64_t n)
{
    n = std::min(n, device_segments(c));
    std::vector<std::uint64_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

std::string filter_name(const FilterPolicy& f)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "N%u_t%.2f", f.reads, f.keep_threshold);
    return buf;
}

FilterPolicy dataplant_filter(const DramConfig& c)
{
    return {c.puf.dataplant_filter_reads, c.puf.dataplant_filter_threshold};
}

FilterPolicy latency_filter(const DramConfig& c)
{
    return {c.puf.latency_filter_reads, c.puf.latency_filter_threshold};
}

const FilterPolicy kNoFilter{1, 1.0};

// ---------------------------------------------------------------------------

Report run_primitives(const DramConfig& c, const RunOptions&)
{
    Report r;
    struct Ref {
        const char* name;
        double lat, nj;
    };
    const Ref ref[] = {{"baseline", 546, 2000}, {"lisa", 148.5, 90},  {"rowclone", 90, 50},
                           {"ue_sa", 35, 17.3},     {"uc_pla", 13, 17.2}, {"d_tran", 35, 18}};
    auto& cost = r.table("costs", {"mechanism", "latency_ns", "energy_nj", "reference_latency_ns", "reference_energy_nj",
                                   "match"});
    for (const auto& row : cost_table(c)) {
        auto it = std::find_if(std::begin(ref), std::end(ref),
                               [&](const Ref& p) { return row.name == p.name; });
        if (it == std::end(ref)) {
            cost.add({S(row.name), D(row.latency_ns), D(row.energy_nj), kNone, kNone, kNone});
            continue;
        }
        bool match = row.latency_ns == it->lat && row.energy_nj == it->nj;
        cost.add({S(row.name), D(row.latency_ns), D(row.energy_nj), D(it->lat), D(it->nj), Value(match)});
    }

    const auto& t = c.timing;
    const auto& e = c.energy;
    auto& red = r.table("reductions", {"metric", "ratio", "ratio_rounded", "reference", "match"});
    auto add_red = [&](const char* name, double v, double digits, double ref_v) {
        double scale = std::pow(10.0, digits);
        double rounded = std::round(v * scale) / scale;
        red.add({S(name), D(v), D(rounded), D(ref_v), Value(rounded == ref_v)});
    };
    add_red("latency_baseline_over_ue_sa", t.baseline_row_latency / t.act_latency, 1, 15.6);
    add_red("latency_baseline_over_uc_pla", t.baseline_row_latency / t.pre_latency, 0, 42);
    add_red("energy_baseline_over_uc_pla", e.baseline_write / e.uc_pla, 0, 116);

    // receipts of real operations on one full 8KB row
    auto& rec = r.table("receipts", {"operation", "latency_ns", "energy_nj", "energy_observed_nj",
                                     "destroyed_cell_content", "generated_zeros"});
    auto zeros = [](const BitVector& b) { return I(std::count(b.begin(), b.end(), 0)); };
    Subarray sub(c, Address{}, 2, 0);
    sub.write_row(0, BitVector(sub.cols(), 1));
    auto a = ue_sa(sub, 0, false);
    rec.add({S("ue_sa"), D(a.latency_ns), D(a.energy_nj), D(a.energy_observed_nj),
             Value(a.destroyed_cell_content), zeros(a.generated_bits)});
    sub.precharge();
    a = ue_sa(sub, 0, true);
    rec.add({S("ue_sa_writeback"), D(a.latency_ns), D(a.energy_nj), D(a.energy_observed_nj),
             Value(a.destroyed_cell_content), zeros(a.generated_bits)});
    sub.precharge();
    a = uc_pla_arm(sub, 0);
    auto bits = sub.activate(0);
    sub.precharge();
    rec.add({S("uc_pla"), D(a.latency_ns), D(a.energy_nj), D(a.energy_observed_nj),
             Value(a.destroyed_cell_content), zeros(bits)});
    a = d_tran(sub, 1, 0, false);
    sub.precharge();
    rec.add({S("d_tran"), D(a.latency_ns), D(a.energy_nj), D(a.energy_observed_nj),
             Value(a.destroyed_cell_content), zeros(a.generated_bits)});
    a = d_tran(sub, 1, 0, true);
    sub.precharge();
    rec.add({S("d_tran_writeback"), D(a.latency_ns), D(a.energy_nj), D(a.energy_observed_nj),
             Value(a.destroyed_cell_content), zeros(a.generated_bits)});
    return r;
}

Report run_mc(const DramConfig& c, const RunOptions& o)
{
    Report r;
    const std::uint64_t draws = o.full ? 100000 : 10000;
    auto& t = r.table("unpredictability", {"axis", "variation_percent", "temperature_c", "draws", "unpredictable",
                                           "unpredictable_percent", "reference_percent"});
    auto add = [&](const char* axis, double var, double temp, double ref) {
        auto m = mc_unpredictability(c, var, temp, draws, o.threads);
        t.add({S(axis), D(var * 100.0), D(temp), I(m.draws), I(m.zeros), D(m.fraction() * 100.0), D(ref)});
    };
    const double pv[] = {0.02, 0.03, 0.04, 0.05};
    const double pv_ref[] = {0.0, 0.0, 0.02, 0.19};
    for (int i = 0; i < 4; ++i)
        add("variation", pv[i], 30.0, pv_ref[i]);
    const double temps[] = {30, 60, 70, 85};
    const double t_ref[] = {0.02, 0.19, 0.21, 0.15};
    for (int i = 0; i < 4; ++i)
        add("temperature", 0.04, temps[i], t_ref[i]);
    return r;
}

void summarize(Table& sum, Table& hist, const std::string& model, const FilterPolicy& f, const char* kind,
               const std::vector<double>& v)
{
    sum.add({S(model), S(filter_name(f)), S(kind), I(v.size()), D(quantile(v, 0.0)), D(quantile(v, 0.25)),
             D(quantile(v, 0.5)), D(quantile(v, 0.75)), D(quantile(v, 1.0)), D(mean(v)), D(fraction_one(v))});
    constexpr int bins = 20;
    std::vector<std::uint64_t> n(bins);
    for (double x : v)
        ++n[std::min(bins - 1, int(x * bins))];
    for (int b = 0; b < bins; ++b)
        hist.add({S(model), S(filter_name(f)), S(kind), D(double(b) / bins), D(double(b + 1) / bins), I(n[b])});
}

const std::vector<std::string> kSummaryCols = {"model", "filter", "kind", "pairs", "min", "q1",
                                               "median", "q3", "max", "mean", "fraction_one"};
const std::vector<std::string> kHistCols = {"model", "filter", "kind", "bin_lo", "bin_hi", "count"};

Report run_jaccard(const DramConfig& c, const RunOptions& o)
{
    Report r;
    auto& sum = r.table("summary", kSummaryCols);
    auto& hist = r.table("histogram", kHistCols);
    auto& pairs = r.table("pairs", {"model", "filter", "pair_id", "kind", "index"});
    const std::uint64_t n_pairs = 10000;
    PufDevice dev(c);
    LatencyPuf lat(c);
    auto pop = pick_segments(device_segments(c), 16, pair_seed(c, 1));
    struct Run {
        PufModel* m;
        FilterPolicy f;
    };
    const Run runs[] = {{&dev, kNoFilter}, {&dev, dataplant_filter(c)}, {&lat, kNoFilter}, {&lat, latency_filter(c)}};
    for (const auto& run : runs) {
        auto rep = intra_inter_distributions(*run.m, pop, run.f, PairSampling{pair_seed(c, 2), n_pairs, o.threads});
        summarize(sum, hist, run.m->name(), run.f, "intra", rep.intra);
        summarize(sum, hist, run.m->name(), run.f, "inter", rep.inter);
        for (std::size_t i = 0; i < rep.intra.size(); ++i)
            pairs.add({S(run.m->name()), S(filter_name(run.f)), I(i), S("intra"), D(rep.intra[i])});
        for (std::size_t i = 0; i < rep.inter.size(); ++i)
            pairs.add({S(run.m->name()), S(filter_name(run.f)), I(i), S("inter"), D(rep.inter[i])});
    }
    r.meta("segments_in_population", std::to_string(pop.size()));
    r.meta("latency_puf_note", "comparison foil, not a validated chip model");
    return r;
}

Report run_temperature(const DramConfig& c, const RunOptions& o)
{
    Report r;
    auto& t = r.table("intra_vs_temperature", {"model", "filter", "temperature_c", "delta_t", "pairs", "q1",
                                               "median", "q3", "mean", "fraction_one"});
    const std::vector<double> temps = {30, 40, 50, 60, 70, 85};
    const std::uint64_t n_pairs = o.full ? 10000 : 1000;
    auto pop = pick_segments(device_segments(c), 16, pair_seed(c, 3));
    const PairSampling s{pair_seed(c, 4), n_pairs, o.threads};
    for (bool foil : {false, true}) {
        FilterPolicy f = foil ? latency_filter(c) : dataplant_filter(c);
        double enroll = foil ? c.puf.latency.enroll_temperature : 30.0;
        for (const auto& p : temperature_sweep(c, foil, temps, pop, f, s))
            t.add({S(foil ? "latency_puf" : "dataplant"), S(filter_name(f)), D(p.temperature),
                   D(p.temperature - enroll), I(p.intra.size()), D(quantile(p.intra, 0.25)),
                   D(quantile(p.intra, 0.5)), D(quantile(p.intra, 0.75)), D(mean(p.intra)),
                   D(fraction_one(p.intra))});
    }
    r.meta("latency_puf_note", "comparison foil, not a validated chip model");
    return r;
}

Report run_aging(const DramConfig& c, const RunOptions& o)
{
    Report r;
    auto& t = r.table("intra_vs_aging", {"drift_sigma_v", "filter", "pairs", "min", "q1", "median", "mean",
                                         "fraction_one"});
    const std::uint64_t n_pairs = o.full ? 10000 : 2000;
    auto pop = pick_segments(device_segments(c), 16, pair_seed(c, 5));
    const PairSampling s{pair_seed(c, 6), n_pairs, o.threads};
    const double d0 = c.variation.aging_drift_sigma;
    for (double k : {0.0, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        auto v = aging_experiment(c, d0 * k, pop, kNoFilter, s);
        t.add({D(d0 * k), S(filter_name(kNoFilter)), I(v.size()), D(quantile(v, 0.0)), D(quantile(v, 0.25)),
               D(quantile(v, 0.5)), D(mean(v)), D(fraction_one(v))});
    }
    return r;
}

Report run_time(const DramConfig& c, const RunOptions&)
{
    Report r;
    auto& t = r.table("evaluation_time", {"puf", "reads", "threshold", "time_ms", "reference_ms", "ratio_vs_nofilter",
                                          "reference_ratio"});
    struct Row {
        PufKind k;
        FilterPolicy f;
        double ref_ms;
    };
    const Row rows[] = {{PufKind::LatencyPuf, latency_filter(c), 88.2},
                        {PufKind::PreLatPuf, kNoFilter, 1.59},
                        {PufKind::DataplantFiltered, dataplant_filter(c), 4.41},
                        {PufKind::DataplantNoFilter, kNoFilter, 0.88}};
    const double nof = evaluation_time(PufKind::DataplantNoFilter, kNoFilter, c);
    for (const auto& row : rows) {
        double ns = evaluation_time(row.k, row.f, c);
        t.add({S(to_string(row.k)), I(row.f.reads), D(row.f.keep_threshold), D(ns * 1e-6), D(row.ref_ms),
               D(ns / nof), D(row.ref_ms / 0.88)});
    }
    r.meta("per_read_cost_ms", format_value(c.puf.per_read_cost_ms));
    return r;
}

Report run_retention(const DramConfig& c, const RunOptions& o)
{
    Report r;
    auto& t = r.table("coverage", {"wait_hours", "temperature_c", "segments", "cells", "covered", "coverage",
                                   "median_jaccard_vs_uc_pla", "mean_jaccard_vs_uc_pla"});
    auto segs = first_segments(c, o.full ? 64 : 8);
    const std::pair<double, double> points[] = {{1, 30},  {6, 30},  {24, 30}, {48, 30},
                                                {96, 30}, {48, 60}, {4, 85},  {48, 85}};
    for (auto [h, temp] : points) {
        auto res = retention_emulation(c, h, temp, segs, 0, o.threads);
        t.add({D(h), D(temp), I(segs.size()), I(res.cells), I(res.covered), D(res.coverage()),
               D(quantile(res.jaccard_vs_uc_pla, 0.5)), D(mean(res.jaccard_vs_uc_pla))});
    }
    return r;
}

Report run_nist(const DramConfig& c, const RunOptions& o)
{
    Report r;
    PufDevice dev(c);
    auto ds = device_stream(dev, first_segments(c, device_segments(c)), 0, o.threads);
    const std::vector<double> ref = {0.681, 1.000, 0.298, 0.287, 0.536, 0.165, 0.808, 0.210,
                                       0.987, 0.0185, 0.988, 0.194, 0.940, 0.951, 0.693};
    const std::vector<std::string> cols = {"test", "p_values", "mean_p", "min_p", "threshold", "pass",
                                           "pass_strict", "skipped", "reason", "reference_p"};
    NistParams np;
    auto emit = [&](Table& t, const BitSequence& bits) {
        auto res = nist_suite(bits, np);
        for (std::size_t i = 0; i < res.size(); ++i) {
            const auto& x = res[i];
            bool strict = !x.skipped && x.min_p() >= np.alpha;
            t.add({S(x.test_name), I(x.p_values.size()), x.skipped ? kNone : D(x.mean_p()),
                   x.skipped ? kNone : D(x.min_p()), D(x.threshold), Value(x.pass), Value(strict),
                   Value(x.skipped), S(x.reason), D(ref.at(i))});
        }
    };
    emit(r.table("extracted", cols), ds.extracted);
    emit(r.table("raw", cols), ds.raw);
    r.meta("segments", std::to_string(device_segments(c)));
    r.meta("responses", std::to_string(ds.responses));
    r.meta("positions", std::to_string(ds.positions));
    r.meta("raw_bits", std::to_string(ds.raw.size()));
    r.meta("extracted_bits", std::to_string(ds.extracted.size()));
    r.meta("alpha", format_value(np.alpha));
    return r;
}

Report run_coldboot(const DramConfig& c, const RunOptions& o)
{
    Report r;
    std::vector<std::uint64_t> caps;
    for (std::uint64_t cap = 64ull << 20; cap <= 64ull << 30; cap <<= 1)
        caps.push_back(cap);
    auto cmp = compare_mechanisms(c, caps, o.threads);
    auto& lat = r.table("comparison", {"mechanism", "capacity_bytes", "rows", "latency_s", "energy_j",
                                       "per_row_latency_ns", "per_row_energy_nj", "commands"});
    for (const auto& d : cmp.reports)
        lat.add({S(to_string(d.mechanism)), I(d.capacity), I(d.rows), D(d.latency_s), D(d.energy_j),
                 D(d.per_row_latency_ns), D(d.per_row_energy_nj), I(d.commands)});

    auto& ratios = r.table("ratios", {"profile", "capacity_bytes", "metric", "numerator_s", "denominator_s", "ratio",
                                      "reference", "tolerance", "within"});
    auto ratio_rows = [&](const DramConfig& base) {
        const std::uint64_t cap = 4ull << 30;
        auto t = compare_mechanisms(base, {cap}, o.threads);
        auto L = [&](Mechanism m) { return t.at(cap, m).latency_s; };
        auto add = [&](const char* metric, double num, double den, double ref, double tol, bool within) {
            ratios.add({S(base.profile), I(cap), S(metric), D(num), D(den), D(num / den), D(ref),
                        tol > 0 ? D(tol) : kNone, Value(within)});
        };
        double burst = L(Mechanism::SELF_BURST);
        double rc = L(Mechanism::CMD_ROWCLONE), lisa = L(Mechanism::CMD_LISA);
        double dp = L(Mechanism::CMD_DATAPLANT_UE);
        add("self_sr_ms", L(Mechanism::SELF_SR) * 1e3, 1.0, base.tREFW_ms(), 0, true);
        add("self_burst_ms", burst * 1e3, 1.0, 9.0, 0.10, std::abs(burst * 1e3 / 9.0 - 1.0) <= 0.10);
        add("rowclone_over_self_burst", rc, burst, 19.5, 0.30, std::abs(rc / burst / 19.5 - 1.0) <= 0.30);
        add("lisa_over_self_burst", lisa, burst, 32.6, 0.30, std::abs(lisa / burst / 32.6 - 1.0) <= 0.30);
        add("rowclone_over_dataplant", rc, dp, 1.5, 0, rc / dp >= 1.2 && rc / dp <= 2.6);
    };
    ratio_rows(c);
    if (c.profile != "DDR4-2400") {
        DramConfig d4 = c;
        d4.profile = "DDR4-2400";
        ratio_rows(d4);
    }

    const std::uint64_t cap = caps.front();
    auto& sav = r.table("energy_savings", {"mechanism", "capacity_bytes", "energy_j", "savings_vs_tcg", "reference",
                                           "within_20_percent"});
    const double tcg = cmp.at(cap, Mechanism::TCG_SOFTWARE).energy_j;
    const std::pair<Mechanism, double> ref[] = {{Mechanism::CMD_LISA, 25},
                                                  {Mechanism::CMD_ROWCLONE, 45},
                                                  {Mechanism::CMD_DATAPLANT_UE, 114}};
    for (auto [m, p] : ref) {
        double e = cmp.at(cap, m).energy_j;
        sav.add({S(to_string(m)), I(cap), D(e), D(tcg / e), D(p), Value(std::abs(tcg / e / p - 1.0) <= 0.2)});
    }

    auto& ovh = r.table("overheads", {"metric", "self_destruction", "chacha8", "aes128"});
    for (const auto& row : overhead_table())
        ovh.add({S(row.metric), S(row.self_destruction), S(row.chacha8), S(row.aes128)});
    r.meta("bus_energy_per_command_nj", format_value(c.energy.bus_energy_per_command));
    r.meta("interleaving", "rows round-robin over channel, rank, bank; idle-queue controller");
    return r;
}

Report run_dealloc(const DramConfig& c, const RunOptions&)
{
    Report r;
    auto& t = r.table("dealloc", {"bytes", "mechanism", "rows", "latency_ns", "energy_nj"});
    for (std::uint64_t bytes : {4096ull, 8192ull, 16384ull, 65536ull, 2ull << 20, 1ull << 30})
        for (auto m : all_dealloc_mechanisms()) {
            auto d = dealloc_cost(c, bytes, m);
            t.add({I(bytes), S(to_string(m)), I(d.rows), D(d.latency_ns), D(d.energy_nj)});
        }
    return r;
}

using Runner = Report (*)(const DramConfig&, const RunOptions&);

struct Entry {
    ExperimentInfo info;
    Runner run;
};

const std::vector<Entry>& registry()
{
    static const std::vector<Entry> e = {
        {{"primitives", "per-row latency/energy of every in-DRAM mechanism and receipts of real primitive ops",
          "Table 1, Table 9"},
         run_primitives},
        {{"mc-unpredictability", "Monte Carlo SA draws: unpredictable fraction vs variation and temperature",
          "Table 2"},
         run_mc},
        {{"puf-jaccard", "intra/inter Jaccard distributions, Dataplant PUF and latency PUF foil", "Fig 7"},
         run_jaccard},
        {{"puf-temperature", "intra Jaccard against a 30C enrollment from 30C to 85C", "Fig 8"}, run_temperature},
        {{"puf-aging", "intra Jaccard before/after offset drift", "Fig 9"}, run_aging},
        {{"puf-time", "PUF evaluation time per challenge", "Table 5"}, run_time},
        {{"retention", "refresh-disabled retention emulation coverage", "retention coverage study"},
         run_retention},
        {{"nist", "SP 800-22 suite on the extracted device stream", "Table 6"}, run_nist},
        {{"coldboot", "time and energy to destroy all data, 64MB to 64GB", "Fig 10, Table 7, Table 8"},
         run_coldboot},
        {{"dealloc", "cost of zeroing deallocated memory per mechanism", "Table 1 per-row costs at allocation scale"},
         run_dealloc},
    };
    return e;
}

std::size_t edit_distance(const std::string& a, const std::string& b)
{
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

const std::vector<ExperimentInfo>& list_experiments()
{
    static const std::vector<ExperimentInfo> v = [] {
        std::vector<ExperimentInfo> out;
        for (const auto& e : registry())
            out.push_back(e.info);
        return out;
    }();
    return v;
}

bool has_experiment(const std::string& name)
{
    for (const auto& e : registry())
        if (e.info.name == name)
            return true;
    return false;
}

std::string suggest_experiment(const std::string& name)
{
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& e : registry()) {
        std::size_t d = edit_distance(name, e.info.name);
        if (d < best_d) {
            best_d = d;
            best = e.info.name;
        }
    }
    return best_d <= std::max<std::size_t>(3, best.size() / 3) ? best : std::string();
}

Report run_experiment(const std::string& name, const DramConfig& cfg, const RunOptions& opts)
{
    for (const auto& e : registry()) {
        if (e.info.name != name)
            continue;
        Report r = e.run(cfg, opts);
        r.experiment = name;
        // fixed keys first, experiment-specific ones after
        auto extra = std::move(r.metadata);
        r.metadata.clear();
        r.meta("tool_version", kToolVersion);
        r.meta("schema_version", std::to_string(kSchemaVersion));
        r.meta("experiment", name);
        r.meta("config_hash", config_hash(cfg));
        r.meta("master_seed", std::to_string(cfg.variation.master_seed));
        r.meta("profile", cfg.profile);
        r.meta("full", opts.full ? "true" : "false");
        r.meta("uc_pla_sa_weight", format_value(cfg.variation.uc_pla_sa_weight));
        for (auto& kv : extra)
            r.meta(kv.first, kv.second);
        return r;
    }
    throw std::invalid_argument("unknown experiment: " + name);
}

}  // namespace dpsim
