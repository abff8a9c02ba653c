#include "dpsim/coldboot.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "dpsim/parallel.h"

namespace dpsim {

namespace {

const std::array<const char*, 8> kNames = {"TCG_SOFTWARE",     "CMD_BASELINE",     "CMD_LISA", "CMD_ROWCLONE",
                                           "CMD_DATAPLANT_UE", "CMD_DATAPLANT_UC", "SELF_SR",  "SELF_BURST"};

}  // namespace

std::string to_string(Mechanism m) { return kNames.at(std::size_t(m)); }

Mechanism mechanism_from_string(const std::string& s)
{
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (s == kNames[i])
            return Mechanism(i);
    throw std::invalid_argument("unknown mechanism: " + s);
}

const std::vector<Mechanism>& all_mechanisms()
{
    static const std::vector<Mechanism> v = {Mechanism::TCG_SOFTWARE,     Mechanism::CMD_BASELINE,
                                             Mechanism::CMD_LISA,         Mechanism::CMD_ROWCLONE,
                                             Mechanism::CMD_DATAPLANT_UE, Mechanism::CMD_DATAPLANT_UC,
                                             Mechanism::SELF_SR,          Mechanism::SELF_BURST};
    return v;
}

bool is_self(Mechanism m) { return m == Mechanism::SELF_SR || m == Mechanism::SELF_BURST; }

double burst_row_time_ns(const DramConfig& c)
{
    const auto& cb = c.coldboot;
    double anchor_rows = double(cb.burst_anchor_capacity / cb.burst_anchor_row_bytes);
    return cb.burst_anchor_ms * 1e6 / anchor_rows;
}

MechanismCost mechanism_cost(const DramConfig& c, Mechanism m)
{
    const auto& t = c.timing;
    const auto& e = c.energy;
    const int writes = int(c.geometry.row_size_bytes / 64);
    const double ue_energy = e.ue_sa_generate + e.ue_sa_writeback;
    switch (m) {
    case Mechanism::TCG_SOFTWARE:
    case Mechanism::CMD_BASELINE:
        // ACT, one WR per 64B line, PRE
        return {t.baseline_row_latency, e.baseline_write, 1, writes + 2, true, true};
    case Mechanism::CMD_LISA:
        // ACT src, RBM hop, ACT dst, PRE
        return {t.lisa_row_latency, e.lisa, 2, 4, true, false};
    case Mechanism::CMD_ROWCLONE:
        // ACT src, ACT dst, PRE
        return {t.rowclone_row_latency, e.rowclone, 2, 3, true, false};
    case Mechanism::CMD_DATAPLANT_UE:
        return {t.act_latency, ue_energy, 1, 2, true, false};
    case Mechanism::CMD_DATAPLANT_UC:
        return {t.pre_latency, e.uc_pla, 1, 1, false, false};
    case Mechanism::SELF_SR:
        return {c.tREFW_ms() * 1e6 / double(c.geometry.total_rows()), ue_energy, 1, 0, false, false};
    case Mechanism::SELF_BURST:
        return {burst_row_time_ns(c), ue_energy, 1, 0, false, false};
    }
    throw std::invalid_argument("unknown mechanism");
}

PowerConstraints power_constraints(const DramConfig& c)
{
    return {c.timing.tRRD, c.timing.tFAW, c.geometry.total_banks()};
}

DestructionReport schedule_destruction(const DramConfig& c, Mechanism m, bool keep_trace)
{
    const auto mc = mechanism_cost(c, m);
    DestructionReport r;
    r.mechanism = m;
    r.rows = c.geometry.total_rows();
    r.capacity = c.geometry.total_capacity();
    r.per_row_latency_ns = mc.row_latency_ns;
    r.per_row_energy_nj = mc.row_energy_nj;
    r.commands = r.rows * std::uint64_t(mc.commands);
    r.energy_j = destruction_energy(c, m);

    if (m == Mechanism::SELF_SR) {
        // one destructive self-refresh window
        r.latency_s = c.tREFW_ms() / 1000.0;
        return r;
    }
    if (m == Mechanism::SELF_BURST) {
        r.latency_s = double(r.rows) * mc.row_latency_ns * 1e-9;
        return r;
    }

    const auto pc = power_constraints(c);
    const std::uint64_t banks = pc.banks_parallel;
    std::vector<double> bank_ready(banks, 0.0);
    std::array<double, 4> window;  // last four row-op times
    window.fill(-1e300);
    std::size_t wpos = 0;
    double last = -1e300;
    double end = 0.0;
    double prev_end = 0.0;
    if (keep_trace)
        r.trace.reserve(r.rows * std::uint64_t(mc.row_ops));

    for (std::uint64_t k = 0; k < r.rows; ++k) {
        const std::uint64_t b = k % banks;
        double ready = bank_ready[b];
        if (mc.bus_serial)
            ready = std::max(ready, prev_end);
        double first = 0.0, t = 0.0;
        for (int op = 0; op < mc.row_ops; ++op) {
            t = std::max({op == 0 ? ready : t, last + pc.tRRD, window[wpos] + pc.tFAW});
            if (op == 0)
                first = t;
            last = t;
            window[wpos] = t;
            wpos = (wpos + 1) % 4;
            if (keep_trace)
                r.trace.push_back({t, std::uint32_t(b), k / banks});
        }
        double done = std::max(first + mc.row_latency_ns, t);
        if (mc.precharge_after && !mc.bus_serial)
            done += c.timing.tRP;
        bank_ready[b] = done;
        prev_end = done;
        end = std::max(end, done);
    }
    r.latency_s = end * 1e-9;
    return r;
}

TraceCheck validate_trace(const std::vector<TraceEvent>& trace, const PowerConstraints& pc, double min_bank_gap_ns)
{
    TraceCheck chk;
    std::vector<TraceEvent> ev(trace);
    std::stable_sort(ev.begin(), ev.end(),
                     [](const TraceEvent& a, const TraceEvent& b) { return a.time_ns < b.time_ns; });
    constexpr double eps = 1e-9;
    for (std::size_t i = 1; i < ev.size(); ++i)
        if (ev[i].time_ns - ev[i - 1].time_ns < pc.tRRD - eps)
            ++chk.trrd_violations;
    for (std::size_t i = 4; i < ev.size(); ++i)
        if (ev[i].time_ns - ev[i - 4].time_ns < pc.tFAW - eps)
            ++chk.tfaw_violations;
    if (min_bank_gap_ns > 0.0) {
        std::vector<const TraceEvent*> last(pc.banks_parallel, nullptr);
        for (const auto& e : ev) {
            if (e.bank >= last.size())
                last.resize(e.bank + 1, nullptr);
            const TraceEvent* p = last[e.bank];
            if (p && p->row != e.row && e.time_ns - p->time_ns < min_bank_gap_ns - eps)
                ++chk.bank_overlaps;
            last[e.bank] = &e;
        }
    }
    chk.ok = chk.trrd_violations == 0 && chk.tfaw_violations == 0 && chk.bank_overlaps == 0;
    return chk;
}

double destruction_energy(const DramConfig& c, Mechanism m)
{
    const auto mc = mechanism_cost(c, m);
    const double rows = double(c.geometry.total_rows());
    double nj = rows * mc.row_energy_nj;
    if (!is_self(m))
        nj += rows * double(mc.commands) * c.energy.bus_energy_per_command;
    return nj * 1e-9;
}

const DestructionReport& ComparisonTable::at(std::uint64_t capacity, Mechanism m) const
{
    for (const auto& r : reports)
        if (r.capacity == capacity && r.mechanism == m)
            return r;
    throw std::out_of_range("no report for " + to_string(m) + " at " + std::to_string(capacity) + " bytes");
}

ComparisonTable compare_mechanisms(const DramConfig& base, const std::vector<std::uint64_t>& capacities,
                                   unsigned threads)
{
    std::vector<DramConfig> cfgs;
    for (auto cap : capacities) {
        DramConfig c = make_profile(base.profile, cap);
        // per-row costs and knobs follow the base config
        c.timing.act_latency = base.timing.act_latency;
        c.timing.pre_latency = base.timing.pre_latency;
        c.timing.baseline_row_latency = base.timing.baseline_row_latency;
        c.timing.lisa_row_latency = base.timing.lisa_row_latency;
        c.timing.rowclone_row_latency = base.timing.rowclone_row_latency;
        c.energy = base.energy;
        c.coldboot = base.coldboot;
        c.variation = base.variation;
        cfgs.push_back(validate_config(c));
    }
    const auto& mechs = all_mechanisms();
    ComparisonTable t;
    t.reports.resize(cfgs.size() * mechs.size());
    parallel_for(t.reports.size(), threads, [&](std::size_t i) {
        t.reports[i] = schedule_destruction(cfgs[i / mechs.size()], mechs[i % mechs.size()]);
    });
    return t;
}

const std::vector<OverheadRow>& overhead_table()
{
    static const std::vector<OverheadRow> rows = {
        {"runtime_performance", "0%", "0%", "0%"},
        {"runtime_power", "0%", "17%", "12%"},
        {"area", "~0%", "0.9%", "1.25%"},
    };
    return rows;
}

std::string to_string(DeallocMechanism m)
{
    switch (m) {
    case DeallocMechanism::Software: return "software";
    case DeallocMechanism::Lisa: return "lisa";
    case DeallocMechanism::Rowclone: return "rowclone";
    case DeallocMechanism::UeSa: return "ue_sa";
    case DeallocMechanism::UcPla: return "uc_pla";
    case DeallocMechanism::DTran: return "d_tran";
    }
    return "?";
}

const std::vector<DeallocMechanism>& all_dealloc_mechanisms()
{
    static const std::vector<DeallocMechanism> v = {DeallocMechanism::Software, DeallocMechanism::Lisa,
                                                    DeallocMechanism::Rowclone, DeallocMechanism::UeSa,
                                                    DeallocMechanism::UcPla,    DeallocMechanism::DTran};
    return v;
}

DeallocCost dealloc_cost(const DramConfig& c, std::uint64_t bytes, DeallocMechanism m)
{
    if (bytes == 0)
        throw std::invalid_argument("dealloc_cost: bytes must be > 0");
    const auto& t = c.timing;
    const auto& e = c.energy;
    double lat = 0, nj = 0;
    switch (m) {
    case DeallocMechanism::Software: lat = t.baseline_row_latency, nj = e.baseline_write; break;
    case DeallocMechanism::Lisa: lat = t.lisa_row_latency, nj = e.lisa; break;
    case DeallocMechanism::Rowclone: lat = t.rowclone_row_latency, nj = e.rowclone; break;
    case DeallocMechanism::UeSa: lat = t.act_latency, nj = e.ue_sa_generate + e.ue_sa_writeback; break;
    case DeallocMechanism::UcPla: lat = t.pre_latency, nj = e.uc_pla; break;
    case DeallocMechanism::DTran: lat = t.act_latency, nj = e.d_tran_generate + e.d_tran_writeback; break;
    }
    DeallocCost d;
    const std::uint64_t rs = c.geometry.row_size_bytes;
    d.rows = (bytes + rs - 1) / rs;
    d.latency_ns = double(d.rows) * lat;
    d.energy_nj = double(d.rows) * nj;
    return d;
}

}  // namespace dpsim
