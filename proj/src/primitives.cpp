#include "dpsim/primitives.h"

#include "dpsim/parallel.h"
#include "dpsim/seed.h"

namespace dpsim {

std::string to_string(PrimitiveTag t)
{
    switch (t) {
    case PrimitiveTag::UE_SA: return "UE_SA";
    case PrimitiveTag::UC_PLA: return "UC_PLA";
    case PrimitiveTag::D_TRAN: return "D_TRAN";
    }
    return "?";
}

PrimitiveTag primitive_from_string(const std::string& s)
{
    if (s == "UE_SA") return PrimitiveTag::UE_SA;
    if (s == "UC_PLA") return PrimitiveTag::UC_PLA;
    if (s == "D_TRAN") return PrimitiveTag::D_TRAN;
    throw SimulationError("unknown primitive: " + s);
}

static double ones_fraction(const BitVector& b)
{
    if (b.empty())
        return 0.5;
    std::size_t n = 0;
    for (auto x : b)
        n += x;
    return double(n) / double(b.size());
}

OpReceipt ue_sa(Subarray& s, std::uint32_t row, bool writeback)
{
    if (!s.precharged())
        throw SimulationError("UE-SA needs a precharged subarray");
    const auto& c = s.config();
    double prior = ones_fraction(s.stored_bits(row));

    OpReceipt r;
    r.generated_bits = s.sense_disconnected(row);
    if (writeback)
        s.drive_row_buffer(r.generated_bits, row);
    r.latency_ns = c.timing.act_latency;
    r.energy_nj = c.energy.ue_sa_generate + (writeback ? c.energy.ue_sa_writeback : 0.0);
    r.energy_observed_nj = r.energy_nj * (1.0 + c.energy.ue_sa_data_dependence * (2.0 * prior - 1.0));
    r.destroyed_cell_content = writeback;
    s.ledger().charge(r.latency_ns, r.energy_nj);
    return r;
}

OpReceipt uc_pla_arm(Subarray& s, std::uint32_t row)
{
    const auto& c = s.config();
    if (row >= s.rows())
        throw std::out_of_range("row out of range");
    s.close_row();
    s.arm_row(row);
    OpReceipt r;
    r.latency_ns = c.timing.pre_latency;
    r.energy_nj = c.energy.uc_pla;
    r.energy_observed_nj = r.energy_nj;
    r.destroyed_cell_content = true;
    s.ledger().charge(r.latency_ns, r.energy_nj);
    return r;
}

OpReceipt d_tran(Subarray& s, std::uint32_t row, int value, bool writeback)
{
    if (!s.precharged())
        throw SimulationError("D-tran needs a precharged subarray");
    if (row >= s.rows())
        throw std::out_of_range("row out of range");
    const auto& c = s.config();
    OpReceipt r;
    r.generated_bits.assign(s.cols(), value ? 1 : 0);
    s.drive_row_buffer(r.generated_bits, writeback ? std::optional<std::uint32_t>(row) : std::nullopt);
    r.latency_ns = c.timing.act_latency;
    r.energy_nj = c.energy.d_tran_generate + (writeback ? c.energy.d_tran_writeback : 0.0);
    r.energy_observed_nj = r.energy_nj;
    r.destroyed_cell_content = writeback;
    s.ledger().charge(r.latency_ns, r.energy_nj);
    return r;
}

static void check_partition(int p)
{
    if (p < 0 || p >= ModeRegisters::kPartitions)
        throw SimulationError("MR3 partition out of range: " + std::to_string(p));
}

PrimitiveTag select_primitive(const ModeRegisters& mrs, int partition)
{
    check_partition(partition);
    return mrs.mr3_partition_bits[partition] ? PrimitiveTag::UC_PLA : PrimitiveTag::UE_SA;
}

void load_mode_register(ModeRegisters& mrs, int partition, bool uc_pla)
{
    check_partition(partition);
    mrs.mr3_partition_bits[partition] = uc_pla;
}

std::vector<CostRow> cost_table(const DramConfig& c)
{
    const auto& t = c.timing;
    const auto& e = c.energy;
    return {
        {"baseline", t.baseline_row_latency, e.baseline_write},
        {"lisa", t.lisa_row_latency, e.lisa},
        {"rowclone", t.rowclone_row_latency, e.rowclone},
        {"activation", t.act_latency, e.activation},
        {"precharge", t.pre_latency, e.precharge},
        {"ue_sa", t.act_latency, e.ue_sa_generate + e.ue_sa_writeback},
        {"uc_pla", t.pre_latency, e.uc_pla},
        {"d_tran", t.act_latency, e.d_tran_generate + e.d_tran_writeback},
    };
}

McResult mc_unpredictability(const DramConfig& c, double variation_percent, double temperature,
                             std::uint64_t draws, unsigned threads)
{
    VariationModel v = c.variation;
    v.variation_percent = variation_percent;
    v.temperature = temperature;
    const double sigma = v.sa_offset_sigma();
    if (!(sigma >= 0.0))
        throw std::invalid_argument("mc_unpredictability: negative offset sigma");
    // the same z-scores at every level, so counts grow monotonically with sigma
    const std::uint64_t s_off = SeedChain::start(v.master_seed, ComponentKind::McDraw);
    const std::uint64_t off_prefix = SeedChain::row_prefix(s_off, Address{});
    const std::uint64_t noise_prefix = SeedChain::row_prefix(s_off, Address{0, 0, 0, 0, 1, 0});

    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t chunks = (draws + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> zeros(chunks, 0);
    parallel_for(chunks, threads, [&](std::size_t k) {
        std::uint64_t lo = k * kChunk, hi = std::min(draws, lo + kChunk), z = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            SenseAmpInstance sa{v.sa_offset_bias + sigma * to_normal(SeedChain::finish(off_prefix, i, 0)), true};
            BitlinePair bl{c.electrical.precharge_level(), c.electrical.precharge_level(), true};
            double n = v.cell_noise_sigma * to_normal(SeedChain::finish(noise_prefix, i, 0));
            z += sense(sa, bl, c.electrical, n) == 0;
        }
        zeros[k] = z;
    });
    McResult r{variation_percent, temperature, draws, 0};
    for (auto z : zeros)
        r.zeros += z;
    return r;
}

}  // namespace dpsim
