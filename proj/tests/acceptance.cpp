// Acceptance run: one PASS/FAIL line per criterion, details underneath.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <limits>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dpsim/circuit.h"
#include "dpsim/coldboot.h"
#include "dpsim/experiments.h"
#include "dpsim/fsm.h"
#include "dpsim/primitives.h"
#include "dpsim/puf.h"
#include "dpsim/randomness.h"

using namespace dpsim;

namespace {

struct Check {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const char* fmt, ...) __attribute__((format(printf, 3, 4)))
    {
        char buf[512];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        notes.push_back(std::string(cond ? "ok   " : "FAIL ") + buf);
        ok = ok && cond;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

double quantile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    double h = q * double(v.size() - 1);
    std::size_t lo = std::size_t(h), hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

bool within_rel(double x, double target, double tol) { return std::abs(x / target - 1.0) <= tol; }

std::vector<std::uint64_t> all_segments(const DramConfig& c)
{
    std::vector<std::uint64_t> v(Segment::count(c.puf.segment_bytes, c.geometry));
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = i;
    return v;
}

// ---------------------------------------------------------------------------

void c1(Check& k)
{
    auto t0 = std::chrono::steady_clock::now();
    auto r = run_experiment("primitives", default_config());
    const auto& costs = r.get("costs");
    struct Want {
        const char* name;
        double lat, nj;
    };
    const Want want[] = {{"ue_sa", 35, 17.3},     {"uc_pla", 13, 17.2},    {"rowclone", 90, 50},
                         {"lisa", 148.5, 90},     {"baseline", 546, 2000}};
    for (const auto& w : want)
        for (std::size_t i = 0; i < costs.rows.size(); ++i)
            if (std::get<std::string>(costs.at(i, "mechanism")) == w.name) {
                double lat = std::get<double>(costs.at(i, "latency_ns"));
                double nj = std::get<double>(costs.at(i, "energy_nj"));
                k.expect(lat == w.lat && nj == w.nj, "%s %.1fns/%.1fnJ (want %.1f/%.1f)", w.name, lat, nj, w.lat,
                         w.nj);
            }
    const auto& red = r.get("reductions");
    for (std::size_t i = 0; i < red.rows.size(); ++i) {
        double got = std::get<double>(red.at(i, "ratio_rounded"));
        double want = std::get<double>(red.at(i, "reference"));
        k.expect(got == want, "%s = %.4g rounds to %g (want %g)", std::get<std::string>(red.at(i, "metric")).c_str(),
                 std::get<double>(red.at(i, "ratio")), got, want);
    }
    const auto& rec = r.get("receipts");
    k.expect(std::get<double>(rec.at(1, "energy_nj")) == 17.3 && std::get<double>(rec.at(2, "energy_nj")) == 17.2,
             "receipts of real UE-SA (writeback) and UC-PLA ops carry 17.3nJ and 17.2nJ");
    double s = seconds_since(t0);
    k.expect(s < 1.0, "runtime %.3fs < 1s", s);
}

void c2(Check& k)
{
    auto t0 = std::chrono::steady_clock::now();
    auto c = default_config();
    const std::uint64_t n = 100000;
    auto pct = [&](double var, double temp) { return mc_unpredictability(c, var, temp, n, 1).fraction() * 100.0; };
    double p2 = pct(0.02, 30), p3 = pct(0.03, 30), p4 = pct(0.04, 30), p5 = pct(0.05, 30);
    k.expect(p2 == 0.0, "2%% variation: %.3f%% (want 0%%)", p2);
    k.expect(p3 == 0.0, "3%% variation: %.3f%% (want 0%%)", p3);
    k.expect(std::abs(p4 - 0.02) <= 0.015, "4%% variation: %.3f%% (want 0.02 +- 0.015%%)", p4);
    k.expect(std::abs(p5 - 0.19) <= 0.08, "5%% variation: %.3f%% (want 0.19 +- 0.08%%)", p5);
    for (double t : {30.0, 60.0, 70.0, 85.0}) {
        double p = pct(0.04, t);
        k.expect(p >= 0.01 && p <= 0.3, "4%% variation at %.0fC: %.3f%% (want within [0.01, 0.3]%%)", t, p);
    }
    double s = seconds_since(t0);
    k.expect(s < 30.0, "runtime %.1fs < 30s (%llu draws per point)", s, (unsigned long long)n);
}

void c3(Check& k)
{
    auto t0 = std::chrono::steady_clock::now();
    auto c = default_config();
    PufDevice dev(c);
    LatencyPuf lat(c);
    auto pop = pick_segments(dev.segment_count(), 16, 1);
    PairSampling s{1, 10000, 1};
    FilterPolicy nof{1, 1.0};
    auto dp = intra_inter_distributions(dev, pop, nof, s);
    double mi = median(dp.intra), me = median(dp.inter);
    k.expect(mi >= 0.95, "Dataplant intra median %.4f >= 0.95 (%zu pairs)", mi, dp.intra.size());
    k.expect(me <= 0.1, "Dataplant inter median %.4f <= 0.1 (%zu pairs)", me, dp.inter.size());
    auto lp = intra_inter_distributions(lat, pop, nof, s);
    double iqr = quantile(lp.intra, 0.75) - quantile(lp.intra, 0.25);
    k.expect(iqr >= 0.3, "latency foil unfiltered intra IQR %.4f >= 0.3", iqr);
    double sec = seconds_since(t0);
    k.expect(sec < 120.0, "runtime %.1fs < 2min", sec);
}

void c4(Check& k)
{
    auto c = default_config();
    FilterPolicy nof{1, 1.0}, dpf{5, 0.9}, lf{100, 0.91};
    double n = evaluation_time(PufKind::DataplantNoFilter, nof, c);
    double f = evaluation_time(PufKind::DataplantFiltered, dpf, c);
    double l = evaluation_time(PufKind::LatencyPuf, lf, c);
    double p = evaluation_time(PufKind::PreLatPuf, nof, c);
    k.expect(std::abs(f / n - 5.01) <= 0.05, "filtered/nofilter = %.4f (want 5.01 +- 0.05)", f / n);
    k.expect(std::abs(l / n - 100.0) <= 2.0, "latency_puf/nofilter = %.3f (want 100 +- 2)", l / n);
    k.expect(within_rel(n * 1e-6, 0.88, 0.01), "dataplant_nofilter %.4fms (want 0.88ms +- 1%%)", n * 1e-6);
    k.expect(within_rel(f * 1e-6, 4.41, 0.01), "dataplant_filtered %.4fms (want 4.41ms +- 1%%)", f * 1e-6);
    k.expect(within_rel(l * 1e-6, 88.2, 0.01), "latency_puf %.3fms (want 88.2ms +- 1%%)", l * 1e-6);
    k.expect(within_rel(p * 1e-6, 1.59, 0.01), "prelat_puf %.4fms (want 1.59ms +- 1%%)", p * 1e-6);
}

void c5(Check& k)
{
    auto c = default_config();
    PufDevice dev(c);
    auto pop = all_segments(c);
    auto st = estimate_frr_far(dev, pop, FilterPolicy{1, 1.0}, PairSampling{2, 10000, 1});
    k.expect(st.frr() >= 0.003 && st.frr() <= 0.013, "FRR %.3f%% over %llu trials (want [0.3, 1.3]%%, reference 0.64%%)",
             st.frr() * 100, (unsigned long long)st.trials);
    k.expect(st.false_accepts == 0, "FAR %.3f%% (%llu false accepts, want 0)", st.far() * 100,
             (unsigned long long)st.false_accepts);
    auto rep = repeatability(dev, pop, FilterPolicy{25, 0.5}, 25, 1);
    double r = rep.fraction() * 100.0;
    k.expect(r >= 99.7 && std::abs(r - 99.72) <= 0.2,
             "single-read repeatability %.3f%% over %llu reads (want >= 99.7%%, within 0.2pp of 99.72%%)", r,
             (unsigned long long)rep.reads);
}

void c6(Check& k)
{
    auto t0 = std::chrono::steady_clock::now();
    auto mb = monobit(bits_from_string("1011010101"));
    double oracle = std::erfc(2.0 / std::sqrt(10.0) / std::sqrt(2.0));
    k.expect(std::abs(mb.p_values[0] - oracle) < 5e-5 && std::abs(mb.p_values[0] - 0.5271) < 5e-5,
             "monobit on 1011010101: p = %.6f, closed form %.6f", mb.p_values[0], oracle);

    BitSequence zeros(100000, 0);
    bool m = monobit(zeros).pass, ru = runs(zeros).pass, cu = cumulative_sums(zeros).pass;
    k.expect(!m && !ru && !cu, "all-zeros stream fails monobit (%s), runs (%s), cusum (%s)", m ? "pass" : "fail",
             ru ? "pass" : "fail", cu ? "pass" : "fail");

    auto c = default_config();
    PufDevice dev(c);
    auto ds = device_stream(dev, all_segments(c), 0, 1);
    k.expect(ds.extracted.size() >= 1000000, "extracted stream %zu bits from %llu positions (want >= 1e6)",
             ds.extracted.size(), (unsigned long long)ds.positions);
    auto res = nist_suite(ds.extracted);
    int passed = 0;
    for (const auto& r : res) {
        passed += r.pass;
        k.expect(r.pass, "%-34s min p %.4f  mean p %.4f  (%zu p-values, threshold %.2g)%s", r.test_name.c_str(),
                 r.skipped ? 0.0 : r.min_p(), r.skipped ? 0.0 : r.mean_p(), r.p_values.size(), r.threshold,
                 r.skipped ? (" skipped: " + r.reason).c_str() : "");
    }
    k.expect(passed == 15, "%d/15 tests pass at alpha = 0.01", passed);
    double s = seconds_since(t0);
    k.expect(s < 180.0, "runtime %.1fs < 3min", s);
}

void c7(Check& k)
{
    for (const char* prof : {"DDR3-1600", "DDR4-2400", "LPDDR4-3200"}) {
        auto c = make_profile(prof, 4ull << 30);
        double sr = schedule_destruction(c, Mechanism::SELF_SR).latency_s * 1e3;
        double want = std::string(prof).rfind("LPDDR", 0) == 0 ? 32.0 : 64.0;
        k.expect(sr == want, "%s SELF_SR = %.6gms (want %gms exactly)", prof, sr, want);
    }
    auto c = make_profile("DDR4-2400", 4ull << 30);
    auto L = [&](Mechanism m) { return schedule_destruction(c, m).latency_s; };
    double burst = L(Mechanism::SELF_BURST), rc = L(Mechanism::CMD_ROWCLONE), lisa = L(Mechanism::CMD_LISA);
    double ue = L(Mechanism::CMD_DATAPLANT_UE), uc = L(Mechanism::CMD_DATAPLANT_UC);
    k.expect(within_rel(burst * 1e3, 9.0, 0.10), "DDR4 4GB SELF_BURST = %.4fms (want 9ms +- 10%%)", burst * 1e3);
    k.expect(within_rel(rc / burst, 19.5, 0.30),
             "Cmd-D Rowclone / Self-D-Burst = %.3f (%.3fms / %.3fms; want 19.5 +- 30%%)", rc / burst, rc * 1e3,
             burst * 1e3);
    k.expect(within_rel(lisa / burst, 32.6, 0.30),
             "Cmd-D Lisa / Self-D-Burst = %.3f (%.3fms / %.3fms; want 32.6 +- 30%%)", lisa / burst, lisa * 1e3,
             burst * 1e3);
    k.expect(rc / ue >= 1.2 && rc / ue <= 2.6,
             "Cmd-D Rowclone / Cmd-D Dataplant(UE) = %.3f (%.3fms / %.3fms; want [1.2, 2.6], reference 1.5)", rc / ue,
             rc * 1e3, ue * 1e3);
    k.expect(rc / uc >= 1.2 && rc / uc <= 2.6,
             "Cmd-D Rowclone / Cmd-D Dataplant(UC) = %.3f (%.3fms / %.3fms; want [1.2, 2.6], reference 1.5)", rc / uc,
             rc * 1e3, uc * 1e3);
}

void c8(Check& k)
{
    auto c = make_profile("DDR4-2400", 4ull << 30);
    double tcg = destruction_energy(c, Mechanism::TCG_SOFTWARE);
    const std::pair<Mechanism, double> want[] = {
        {Mechanism::CMD_LISA, 25}, {Mechanism::CMD_ROWCLONE, 45}, {Mechanism::CMD_DATAPLANT_UE, 114}};
    for (auto [m, p] : want) {
        double r = tcg / destruction_energy(c, m);
        k.expect(within_rel(r, p, 0.20), "%s savings vs TCG %.2fx (want %gx +- 20%%)", to_string(m).c_str(), r, p);
    }
    double per_row = c.energy.baseline_write / c.energy.uc_pla;
    k.expect(std::round(per_row) == 116.0, "per-row baseline/UC-PLA energy %.4f rounds to %g (want 116)", per_row,
             std::round(per_row));
}

void c9(Check& k)
{
    auto t0 = std::chrono::steady_clock::now();
    for (auto v : {FsmVariant::self_destruct, FsmVariant::command_based})
        for (std::uint64_t rows : {1ull, 3ull, 8ull}) {
            auto r = check_fsm_safety(v, rows, 12);
            k.expect(r.violations == 0, "%s rows=%llu: %llu sequences of length <= 12, %llu violations",
                     v == FsmVariant::self_destruct ? "self_destruct" : "command_based", (unsigned long long)rows,
                     (unsigned long long)r.sequences, (unsigned long long)r.violations);
        }
    auto bf = check_fsm_safety_bruteforce(FsmVariant::command_based, 3, 6);
    auto dp = check_fsm_safety(FsmVariant::command_based, 3, 6);
    k.expect(bf.sequences == dp.sequences && bf.violations == dp.violations,
             "brute-force cross-check at length 6: %llu sequences, %llu violations",
             (unsigned long long)bf.sequences, (unsigned long long)bf.violations);
    double s = seconds_since(t0);
    k.expect(s < 10.0, "runtime %.2fs < 10s", s);
}

std::uint64_t checksum(const Subarray& s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint32_t r = 0; r < s.rows(); ++r)
        for (auto b : s.stored_bits(r))
            h = (h ^ b) * 1099511628211ull;
    return h;
}

void c10(Check& k)
{
    // charge sharing
    {
        ElectricalParams e;
        std::mt19937_64 rng(10);
        std::uniform_real_distribution<double> v(0.0, 1.0), cap(5e-15, 40e-15);
        double worst = 0.0;
        for (int i = 0; i < 100000; ++i) {
            CellState cell{v(rng), cap(rng)};
            BitlinePair bl{v(rng), 0.5, true};
            double before = cell.capacitance * cell.voltage + e.c_bitline() * bl.v_bl;
            charge_share(cell, bl, e);
            double after = cell.capacitance * cell.voltage + e.c_bitline() * bl.v_bl;
            worst = std::max(worst, std::abs(after - before) / before);
        }
        k.expect(worst <= 4 * std::numeric_limits<double>::epsilon(),
                 "charge conserved over 1e5 random states, worst relative error %.3g", worst);
    }
    // UE-SA without writeback leaves memory bit-identical
    {
        auto c = default_config();
        Subarray sub(c, Address{}, 32, 0);
        std::mt19937_64 rng(11);
        for (std::uint32_t r = 0; r < sub.rows(); ++r) {
            BitVector b(sub.cols());
            for (auto& x : b)
                x = rng() & 1;
            sub.write_row(r, b);
        }
        auto before = checksum(sub);
        for (std::uint32_t r = 0; r < sub.rows(); ++r) {
            ue_sa(sub, r, false);
            sub.precharge();
        }
        auto after = checksum(sub);
        k.expect(before == after, "UE-SA checksum before %016llx after %016llx", (unsigned long long)before,
                 (unsigned long long)after);
    }
    // scheduler legality
    {
        std::mt19937_64 rng(42);
        const char* profiles[] = {"DDR3-1600", "DDR4-2400", "LPDDR4-3200"};
        const Mechanism cmd[] = {Mechanism::CMD_BASELINE, Mechanism::CMD_LISA, Mechanism::CMD_ROWCLONE,
                                 Mechanism::CMD_DATAPLANT_UE, Mechanism::CMD_DATAPLANT_UC};
        int bad = 0;
        std::uint64_t events = 0;
        for (int i = 0; i < 100; ++i) {
            auto c = make_profile(profiles[rng() % 3], 64ull << 20);
            c.timing.tRRD = 2.0 + double(rng() % 80) / 10.0;
            c.timing.tFAW = 10.0 + double(rng() % 400) / 10.0;
            c.geometry.banks_per_rank = 1u << (rng() % 5);
            c.geometry.subarrays_per_bank = 1;
            c.declared_capacity.reset();
            c = validate_config(c);
            auto m = cmd[rng() % 5];
            auto r = schedule_destruction(c, m, true);
            events += r.trace.size();
            bad += !validate_trace(r.trace, power_constraints(c), mechanism_cost(c, m).row_latency_ns).ok;
        }
        k.expect(bad == 0, "tRRD/tFAW/bank legality: %d of 100 random configs violate (%llu row-ops checked)", bad,
                 (unsigned long long)events);
    }
    // thread-count independence, end to end
    {
        auto c = default_config();
        for (const char* e : {"mc-unpredictability", "puf-temperature", "retention", "nist", "coldboot"}) {
            std::string ref;
            bool same = true;
            for (unsigned th : {1u, 4u, 16u}) {
                auto r = run_experiment(e, c, RunOptions{false, th});
                std::string bytes = to_json(r).dump(2);
                for (const auto& t : r.tables)
                    bytes += to_csv(r, t);
                if (th == 1)
                    ref = bytes;
                else
                    same = same && bytes == ref;
            }
            k.expect(same, "%s output byte-identical at 1, 4 and 16 threads (%zu bytes)", e, ref.size());
        }
    }
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* title;
        std::function<void(Check&)> run;
    };
    const Criterion all[] = {
        {1, "per-row cost constants", c1},
        {2, "Monte Carlo unpredictability", c2},
        {3, "Jaccard quality", c3},
        {4, "evaluation-time ratios", c4},
        {5, "authentication FRR/FAR and repeatability", c5},
        {6, "NIST suite", c6},
        {7, "cold boot latency", c7},
        {8, "cold boot energy", c8},
        {9, "FSM safety", c9},
        {10, "property suites", c10},
    };
    int failed = 0;
    for (const auto& cr : all) {
        Check k;
        auto t0 = std::chrono::steady_clock::now();
        try {
            cr.run(k);
        } catch (const std::exception& e) {
            k.expect(false, "exception: %s", e.what());
        }
        std::printf("%s %2d %s (%.1fs)\n", k.ok ? "PASS" : "FAIL", cr.id, cr.title, seconds_since(t0));
        for (const auto& n : k.notes)
            std::printf("       %s\n", n.c_str());
        std::fflush(stdout);
        failed += !k.ok;
    }
    std::printf("%d/10 criteria pass\n", 10 - failed);
    return failed;
}
