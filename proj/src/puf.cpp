#include "dpsim/puf.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpsim/parallel.h"
#include "dpsim/seed.h"

namespace dpsim {

void check_filter(const FilterPolicy& f)
{
    if (f.reads < 1)
        throw std::invalid_argument("filter: reads must be >= 1");
    if (!(f.keep_threshold > 0.0 && f.keep_threshold <= 1.0))
        throw std::invalid_argument("filter: keep_threshold must be in (0, 1]");
}

double jaccard(const PufResponse& a, const PufResponse& b)
{
    const auto& x = a.positions;
    const auto& y = b.positions;
    if (x.empty() && y.empty())
        return 1.0;
    std::size_t i = 0, j = 0, both = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i] == y[j]) {
            ++both;
            ++i;
            ++j;
        } else if (x[i] < y[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return double(both) / double(x.size() + y.size() - both);
}

PufResponse filter_responses(const std::vector<PufResponse>& reads, double threshold)
{
    if (reads.empty())
        throw std::invalid_argument("filter_responses: no reads");
    if (reads.size() == 1)
        return reads[0];
    std::vector<std::uint32_t> all;
    for (const auto& r : reads)
        all.insert(all.end(), r.positions.begin(), r.positions.end());
    std::sort(all.begin(), all.end());
    const double need = std::ceil(threshold * double(reads.size()) - 1e-9);
    PufResponse out;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t k = i;
        while (k < all.size() && all[k] == all[i])
            ++k;
        if (double(k - i) >= need)
            out.positions.push_back(all[i]);
        i = k;
    }
    return out;
}

PufResponse PufModel::evaluate(std::uint64_t segment, const FilterPolicy& f, std::uint64_t trial_base) const
{
    check_filter(f);
    if (f.reads == 1)
        return read(segment, trial_base);
    std::vector<PufResponse> reads;
    reads.reserve(f.reads);
    for (std::uint32_t i = 0; i < f.reads; ++i)
        reads.push_back(read(segment, trial_base + i));
    return filter_responses(reads, f.keep_threshold);
}

// ---------------------------------------------------------------------------
// PufDevice

namespace {

constexpr double kReach = 9.0;     // noise never exceeds 8.3 sigma (see to_normal)
constexpr double kZBound = 8.5;

std::uint64_t seg_rows_of(const DramConfig& c)
{
    return c.puf.segment_bytes / c.geometry.row_size_bytes;
}

}  // namespace

PufDevice::PufDevice(const DramConfig& c, PrimitiveTag primitive)
    : cfg_(c), prim_(primitive), sampler_(c)
{
    if (prim_ == PrimitiveTag::D_TRAN)
        throw std::invalid_argument("D-tran output is deterministic and cannot serve as a PUF");
    segments_ = Segment::count(c.puf.segment_bytes, c.geometry);
    seg_rows_ = seg_rows_of(c);
    seg_bits_ = seg_rows_ * c.geometry.row_bits();
    if (segments_ == 0)
        throw std::invalid_argument("device holds no complete segment");

    const auto& v = c.variation;
    reach_ = kReach * v.cell_noise_sigma;
    double drift = v.aged ? v.aging_drift_sigma : 0.0;
    double sig_off = sampler_.offset_sigma();
    // Lowest level a cell could reach given its own z-score; cells whose
    // uniform lies above the bound are certain ones.
    double z_star, sigma;
    if (prim_ == PrimitiveTag::UC_PLA) {
        double lam = v.uc_pla_sa_weight;
        double off_min = v.sa_offset_bias - kZBound * sig_off - kZBound * drift;
        z_star = (reach_ + kZBound * drift - lam * off_min - v.cell_offset_bias);
        sigma = v.cell_offset_sigma;
    } else {
        z_star = (reach_ + kZBound * drift - v.sa_offset_bias);
        sigma = sig_off;
    }
    if (sigma > 0.0)
        u_candidate_ = std::min(1.0, normal_cdf(z_star / sigma) * 1.001 + 1e-12);
    else
        u_candidate_ = z_star >= 0.0 ? 1.0 : 0.0;
}

std::string PufDevice::name() const
{
    return prim_ == PrimitiveTag::UC_PLA ? "dataplant_uc_pla" : "dataplant_ue_sa";
}

double PufDevice::level(const Address& a) const
{
    if (prim_ == PrimitiveTag::UC_PLA)
        return sampler_.cell_offset(a) + cfg_.variation.uc_pla_sa_weight * sampler_.sa_offset(a);
    return sampler_.sa_offset(a);
}

PufDevice::SegmentModel PufDevice::build_model(std::uint64_t segment) const
{
    Segment seg = Segment::nth(segment, cfg_.puf.segment_bytes, cfg_.geometry);
    const std::uint32_t row_bits = static_cast<std::uint32_t>(cfg_.geometry.row_bits());
    const bool uc = prim_ == PrimitiveTag::UC_PLA;
    const std::uint64_t scan_start = sampler_.seed_start(uc ? ComponentKind::CellOffset : ComponentKind::SaOffset);
    const std::uint64_t noise_start = sampler_.seed_start(ComponentKind::CellNoise);
    const double sigma_n = cfg_.variation.cell_noise_sigma;

    SegmentModel m;
    for (std::uint64_t r = 0; r < seg.rows(); ++r) {
        Address a = seg.address_of(r * row_bits);
        Address scan = a;
        if (!uc)
            scan.row = 0;
        const std::uint64_t prefix = SeedChain::row_prefix(scan_start, scan);
        const std::uint64_t nprefix = SeedChain::row_prefix(noise_start, a);
        const std::uint32_t base = static_cast<std::uint32_t>(r * row_bits);
        for (std::uint32_t col = 0; col < row_bits; ++col) {
            if (to_uniform(SeedChain::finish(prefix, col, 0)) > u_candidate_)
                continue;
            a.column = col;
            double f = level(a);
            if (sigma_n <= 0.0) {
                if (!(f > 0.0))
                    m.sure_zero.push_back(base + col);
            } else if (f < -reach_) {
                m.sure_zero.push_back(base + col);
            } else if (f <= reach_) {
                m.ambiguous.push_back(Ambiguous{base + col, col, f, nprefix});
            }
        }
    }
    return m;
}

void PufDevice::prepare(const std::vector<std::uint64_t>& segments)
{
    for (auto s : segments)
        if (!cache_.count(s))
            cache_.emplace(s, build_model(s));
}

PufResponse PufDevice::read_model(const SegmentModel& m, std::uint64_t trial) const
{
    const double sigma_n = cfg_.variation.cell_noise_sigma;
    std::vector<std::uint32_t> flipped;
    for (const auto& c : m.ambiguous) {
        double n = sigma_n * to_normal(SeedChain::finish(c.noise_prefix, c.column, trial));
        if (!(c.level + n > 0.0))
            flipped.push_back(c.position);
    }
    PufResponse out;
    out.positions.resize(m.sure_zero.size() + flipped.size());
    std::merge(m.sure_zero.begin(), m.sure_zero.end(), flipped.begin(), flipped.end(), out.positions.begin());
    return out;
}

PufResponse PufDevice::read(std::uint64_t segment, std::uint64_t trial) const
{
    auto it = cache_.find(segment);
    if (it != cache_.end())
        return read_model(it->second, trial);
    return read_model(build_model(segment), trial);
}

PufResponse PufDevice::evaluate_challenge(const Challenge& ch, const FilterPolicy& f, std::uint64_t trial_base) const
{
    if (ch.segment_bytes != cfg_.puf.segment_bytes)
        throw std::invalid_argument("challenge segment size differs from the device segment size");
    if (ch.primitive != prim_)
        throw std::invalid_argument("challenge primitive differs from the device primitive");
    Segment s(ch.segment_start, ch.segment_bytes, cfg_.geometry);
    if (s.first_row() % seg_rows_ != 0)
        throw std::invalid_argument("challenge segment is not aligned to the segment grid");
    return evaluate(s.first_row() / seg_rows_, f, trial_base);
}

// ---------------------------------------------------------------------------
// LatencyPuf

LatencyPuf::LatencyPuf(const DramConfig& c) : cfg_(c)
{
    segments_ = Segment::count(c.puf.segment_bytes, c.geometry);
    seg_rows_ = seg_rows_of(c);
    seg_bits_ = seg_rows_ * c.geometry.row_bits();
}

std::vector<LatencyPuf::Weak> LatencyPuf::weak_cells(std::uint64_t segment) const
{
    const auto& lp = cfg_.puf.latency;
    const std::uint64_t master = cfg_.variation.master_seed;
    const std::uint64_t s_weak = SeedChain::start(master, ComponentKind::LatencyWeak);
    const std::uint64_t s_str = SeedChain::start(master, ComponentKind::LatencyStrength);
    const std::uint64_t s_trial = SeedChain::start(master, ComponentKind::LatencyTrial);
    const double shift = lp.kappa * (cfg_.variation.temperature - lp.enroll_temperature);
    Segment seg = Segment::nth(segment, cfg_.puf.segment_bytes, cfg_.geometry);
    const std::uint32_t row_bits = static_cast<std::uint32_t>(cfg_.geometry.row_bits());

    std::vector<Weak> out;
    for (std::uint64_t r = 0; r < seg.rows(); ++r) {
        Address a = seg.address_of(r * row_bits);
        double row_shift = lp.row_sigma * to_normal(derive_component_seed(master, ComponentKind::LatencyRow, a));
        std::uint64_t pw = SeedChain::row_prefix(s_weak, a);
        std::uint64_t ps = SeedChain::row_prefix(s_str, a);
        std::uint64_t pt = SeedChain::row_prefix(s_trial, a);
        for (std::uint32_t col = 0; col < row_bits; ++col) {
            if (to_uniform(SeedChain::finish(pw, col, 0)) >= lp.weak_cell_fraction)
                continue;
            double s = lp.strength_mean + lp.strength_sigma * to_normal(SeedChain::finish(ps, col, 0)) + row_shift;
            double p = 1.0 / (1.0 + std::exp(-(s + shift)));
            out.push_back(Weak{static_cast<std::uint32_t>(r * row_bits + col), p, pt, col});
        }
    }
    return out;
}

void LatencyPuf::prepare(const std::vector<std::uint64_t>& segments)
{
    for (auto s : segments)
        if (!cache_.count(s))
            cache_.emplace(s, weak_cells(s));
}

PufResponse LatencyPuf::read(std::uint64_t segment, std::uint64_t trial) const
{
    auto it = cache_.find(segment);
    std::vector<Weak> local;
    if (it == cache_.end())
        local = weak_cells(segment);
    const auto& weak = it != cache_.end() ? it->second : local;
    PufResponse out;
    for (const auto& w : weak)
        if (to_uniform(SeedChain::finish(w.trial_prefix, w.column, trial)) < w.p_fail)
            out.positions.push_back(w.position);
    return out;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

std::uint64_t sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, std::uint64_t n)
{
    Address a;
    a.column = static_cast<std::uint32_t>(stream);
    return to_index(derive_component_seed(seed, ComponentKind::Sampling, a, index), n);
}

void need_population(const std::vector<std::uint64_t>& pop)
{
    if (pop.size() < 2)
        throw std::invalid_argument("pair sampling needs at least two segments");
}

}  // namespace

std::vector<std::uint64_t> pick_segments(std::uint64_t device_segments, std::uint64_t population,
                                         std::uint64_t seed)
{
    if (population == 0 || device_segments == 0)
        return {};
    population = std::min(population, device_segments);
    std::uint64_t stride = device_segments / population;
    std::uint64_t offset = sample(seed, 99, 0, stride);
    std::vector<std::uint64_t> out(population);
    for (std::uint64_t i = 0; i < population; ++i)
        out[i] = i * stride + offset;
    return out;
}

JaccardReport intra_inter_distributions(PufModel& m, const std::vector<std::uint64_t>& pop,
                                        const FilterPolicy& f, const PairSampling& s)
{
    need_population(pop);
    check_filter(f);
    m.prepare(pop);
    const std::uint64_t P = pop.size(), N = f.reads;
    JaccardReport rep;
    rep.pair_count = s.pairs;
    rep.intra = cross_intra(m, m, pop, f, s);
    rep.inter.resize(s.pairs);
    parallel_for(s.pairs, s.threads, [&](std::size_t p) {
        std::uint64_t i = sample(s.seed, 1, p, P);
        std::uint64_t j = (i + 1 + sample(s.seed, 2, p, P - 1)) % P;
        auto a = m.evaluate(pop[i], f, (2 * s.pairs + 2 * p) * N);
        auto b = m.evaluate(pop[j], f, (2 * s.pairs + 2 * p + 1) * N);
        rep.inter[p] = jaccard(a, b);
    });
    return rep;
}

std::vector<double> cross_intra(PufModel& enrolled, PufModel& probe, const std::vector<std::uint64_t>& pop,
                                const FilterPolicy& f, const PairSampling& s)
{
    need_population(pop);
    check_filter(f);
    enrolled.prepare(pop);
    probe.prepare(pop);
    const std::uint64_t P = pop.size(), N = f.reads;
    std::vector<double> out(s.pairs);
    parallel_for(s.pairs, s.threads, [&](std::size_t p) {
        std::uint64_t i = sample(s.seed, 0, p, P);
        auto a = enrolled.evaluate(pop[i], f, (2 * p) * N);
        auto b = probe.evaluate(pop[i], f, (2 * p + 1) * N);
        out[p] = jaccard(a, b);
    });
    return out;
}

std::vector<TemperaturePoint> temperature_sweep(const DramConfig& base, bool latency_foil,
                                                const std::vector<double>& temps,
                                                const std::vector<std::uint64_t>& pop, const FilterPolicy& f,
                                                const PairSampling& s)
{
    auto at = [&](double t) {
        if (t < 20.0 || t > 90.0)
            throw std::invalid_argument("temperature sweep: " + std::to_string(t) + "C outside [20, 90]");
        DramConfig c = base;
        c.variation.temperature = t;
        return validate_config(c);
    };
    const double t_enroll = latency_foil ? base.puf.latency.enroll_temperature : 30.0;
    std::vector<TemperaturePoint> out;
    if (latency_foil) {
        LatencyPuf enrolled(at(t_enroll));
        for (double t : temps) {
            LatencyPuf probe(at(t));
            out.push_back({t, cross_intra(enrolled, probe, pop, f, s)});
        }
    } else {
        PufDevice enrolled(at(t_enroll));
        for (double t : temps) {
            PufDevice probe(at(t));
            out.push_back({t, cross_intra(enrolled, probe, pop, f, s)});
        }
    }
    return out;
}

std::vector<double> aging_experiment(const DramConfig& base, double drift, const std::vector<std::uint64_t>& pop,
                                     const FilterPolicy& f, const PairSampling& s)
{
    if (drift < 0.0)
        throw std::invalid_argument("aging drift must be >= 0");
    DramConfig fresh = base;
    fresh.variation.aged = false;
    DramConfig aged = base;
    aged.variation.aged = true;
    aged.variation.aging_drift_sigma = drift;
    PufDevice before(validate_config(fresh));
    PufDevice after(validate_config(aged));
    return cross_intra(before, after, pop, f, s);
}

PufResponse evaluate_on_subarray(Subarray& s, std::uint32_t row, PrimitiveTag prim, const FilterPolicy& f)
{
    check_filter(f);
    if (!s.precharged())
        s.precharge();
    std::vector<PufResponse> reads;
    for (std::uint32_t i = 0; i < f.reads; ++i) {
        BitVector bits;
        switch (prim) {
        case PrimitiveTag::UC_PLA:
            uc_pla_arm(s, row);
            bits = s.activate(row);
            break;
        case PrimitiveTag::UE_SA:
            bits = ue_sa(s, row, false).generated_bits;
            break;
        case PrimitiveTag::D_TRAN:
            bits = d_tran(s, row, 1, false).generated_bits;
            break;
        }
        s.precharge();
        PufResponse r;
        for (std::uint32_t c = 0; c < bits.size(); ++c)
            if (!bits[c])
                r.positions.push_back(c);
        reads.push_back(std::move(r));
    }
    return filter_responses(reads, f.keep_threshold);
}

bool authenticate(const PufResponse& enrolled, const PufResponse& probe)
{
    return enrolled == probe;
}

AuthStats estimate_frr_far(PufModel& m, const std::vector<std::uint64_t>& pop, const FilterPolicy& f,
                           const PairSampling& s)
{
    need_population(pop);
    check_filter(f);
    m.prepare(pop);
    const std::uint64_t P = pop.size(), N = f.reads;
    std::vector<std::uint8_t> rej(s.pairs), acc(s.pairs);
    parallel_for(s.pairs, s.threads, [&](std::size_t t) {
        std::uint64_t i = sample(s.seed, 3, t, P);
        std::uint64_t j = (i + 1 + sample(s.seed, 4, t, P - 1)) % P;
        auto enrolled = m.evaluate(pop[i], f, (3 * t) * N);
        auto same = m.evaluate(pop[i], f, (3 * t + 1) * N);
        auto other = m.evaluate(pop[j], f, (3 * t + 2) * N);
        rej[t] = !authenticate(enrolled, same);
        acc[t] = authenticate(enrolled, other);
    });
    AuthStats st;
    st.trials = s.pairs;
    for (std::size_t t = 0; t < s.pairs; ++t) {
        st.false_rejects += rej[t];
        st.false_accepts += acc[t];
    }
    return st;
}

Repeatability repeatability(PufModel& m, const std::vector<std::uint64_t>& segments, const FilterPolicy& reference,
                            std::uint32_t reads_per_segment, unsigned threads)
{
    check_filter(reference);
    m.prepare(segments);
    std::vector<std::uint32_t> match(segments.size());
    parallel_for(segments.size(), threads, [&](std::size_t i) {
        auto ref = m.evaluate(segments[i], reference, 0);
        std::uint32_t k = 0;
        for (std::uint32_t r = 0; r < reads_per_segment; ++r)
            k += m.read(segments[i], reference.reads + r) == ref;
        match[i] = k;
    });
    Repeatability out;
    out.reads = std::uint64_t(segments.size()) * reads_per_segment;
    for (auto k : match)
        out.matching += k;
    return out;
}

double flagged_fraction(PufModel& m, const std::vector<std::uint64_t>& segments, unsigned threads)
{
    if (segments.empty())
        return 0.0;
    std::vector<std::uint64_t> n(segments.size());
    parallel_for(segments.size(), threads, [&](std::size_t i) { n[i] = m.read(segments[i], 0).positions.size(); });
    std::uint64_t total = 0;
    for (auto x : n)
        total += x;
    return double(total) / (double(segments.size()) * double(m.segment_bits()));
}

std::string to_string(PufKind k)
{
    switch (k) {
    case PufKind::LatencyPuf: return "latency_puf";
    case PufKind::PreLatPuf: return "prelat_puf";
    case PufKind::DataplantFiltered: return "dataplant_filtered";
    case PufKind::DataplantNoFilter: return "dataplant_nofilter";
    }
    return "?";
}

double per_read_cost_ns(const DramConfig& c)
{
    return c.puf.per_read_cost_ms * 1e6 - (c.timing.pre_latency + c.timing.act_latency);
}

double evaluation_time(PufKind kind, const FilterPolicy& f, const DramConfig& c)
{
    check_filter(f);
    const double base = per_read_cost_ns(c);
    const auto& t = c.timing;
    switch (kind) {
    case PufKind::DataplantNoFilter:
        return base + t.pre_latency + t.act_latency;
    case PufKind::DataplantFiltered:
        return f.reads * (base + t.pre_latency + t.act_latency);
    case PufKind::LatencyPuf:
        return f.reads * (base + c.puf.latency.reduced_tRCD + t.pre_latency);
    case PufKind::PreLatPuf:
        return c.puf.prelat_eval_ms * 1e6;
    }
    return 0.0;
}

RetentionResult retention_emulation(const DramConfig& c, double wait_hours, double temperature,
                                    const std::vector<std::uint64_t>& segments, std::uint64_t trial,
                                    unsigned threads)
{
    if (!(wait_hours > 0.0))
        throw std::invalid_argument("retention wait must be > 0");
    const VariationSampler vs(c);
    const auto& e = c.electrical;
    const double lam = c.variation.uc_pla_sa_weight;
    const double dt = wait_hours * 3600.0;
    PufDevice direct(c);

    RetentionResult out;
    out.wait_hours = wait_hours;
    out.temperature = temperature;
    out.responses.resize(segments.size());
    out.jaccard_vs_uc_pla.resize(segments.size());
    std::vector<std::uint64_t> covered(segments.size());
    parallel_for(segments.size(), threads, [&](std::size_t i) {
        Segment seg = Segment::nth(segments[i], c.puf.segment_bytes, c.geometry);
        std::vector<std::uint8_t> cov(seg.bits());
        std::uint64_t k = 0;
        for (std::uint64_t pos = 0; pos < seg.bits(); ++pos) {
            Address a = seg.address_of(pos);
            double tau = vs.tau(a);
            double cap = vs.cell_capacitance(a);
            SenseAmpInstance sa{vs.sa_offset(a), true};
            double eps = vs.cell_offset(a);
            double n = vs.noise(a, trial);
            int bit[2];
            for (int init = 0; init < 2; ++init) {
                CellState cell{init ? e.vdd : 0.0, cap};
                leak(cell, dt, temperature, tau, e);
                BitlinePair bl{e.precharge_level(), e.precharge_level(), true};
                charge_share(cell, bl, e);
                bit[init] = sense_connected(sa, eps, lam, bl, e, n);
            }
            if (bit[0] == bit[1]) {
                cov[pos] = 1;
                ++k;
                if (bit[0] == 0)
                    out.responses[i].positions.push_back(static_cast<std::uint32_t>(pos));
            }
        }
        covered[i] = k;
        PufResponse ref;
        for (auto p : direct.read(segments[i], trial).positions)
            if (cov[p])
                ref.positions.push_back(p);
        out.jaccard_vs_uc_pla[i] = jaccard(out.responses[i], ref);
    });
    for (std::size_t i = 0; i < segments.size(); ++i) {
        out.covered += covered[i];
        out.cells += Segment::nth(segments[i], c.puf.segment_bytes, c.geometry).bits();
    }
    return out;
}

}  // namespace dpsim
