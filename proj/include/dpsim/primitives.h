#ifndef DPSIM_PRIMITIVES_H
#define DPSIM_PRIMITIVES_H

#include <cstdint>
#include <string>
#include <vector>

#include "dpsim/circuit.h"
#include "dpsim/config.h"

namespace dpsim {

enum class PrimitiveTag { UE_SA, UC_PLA, D_TRAN };

std::string to_string(PrimitiveTag t);
PrimitiveTag primitive_from_string(const std::string& s);

struct PrimitiveKind {
    PrimitiveTag tag = PrimitiveTag::UE_SA;
    bool writeback = false;   // UE_SA and D_TRAN only
    int d_tran_value = 0;     // D_TRAN only
};

struct OpReceipt {
    double latency_ns = 0.0;
    double energy_nj = 0.0;           // nominal per-row cost
    double energy_observed_nj = 0.0;  // with the data-dependent term
    bool destroyed_cell_content = false;
    BitVector generated_bits;
};

// UE-SA: fire the SAs with the wordline low; optionally raise it afterwards
// to write the generated values into the row.
OpReceipt ue_sa(Subarray& s, std::uint32_t row, bool writeback);

// UC-PLA: wordline and precharge logic together pull the row to vdd/2. The
// subarray is left precharged.
OpReceipt uc_pla_arm(Subarray& s, std::uint32_t row);

// D-tran: the extra SA transistor forces `value`.
OpReceipt d_tran(Subarray& s, std::uint32_t row, int value, bool writeback);

// MR3 partition bit: false selects UE-SA, true selects UC-PLA.
PrimitiveTag select_primitive(const ModeRegisters& mrs, int partition);
void load_mode_register(ModeRegisters& mrs, int partition, bool uc_pla);

// Per-row cost table (latency ns, energy nJ) of every in-DRAM mechanism.
struct CostRow {
    std::string name;
    double latency_ns;
    double energy_nj;
};

std::vector<CostRow> cost_table(const DramConfig& c);

// Monte Carlo over independent SA instances: each draw fabricates one SA at
// the given variation level and temperature and fires UE-SA on a precharged
// bitline pair. A draw is unpredictable when the SA outputs 0.
struct McResult {
    double variation_percent = 0;
    double temperature = 0;
    std::uint64_t draws = 0;
    std::uint64_t zeros = 0;
    double fraction() const { return draws ? double(zeros) / double(draws) : 0.0; }
};

McResult mc_unpredictability(const DramConfig& c, double variation_percent, double temperature,
                             std::uint64_t draws, unsigned threads = 1);

}  // namespace dpsim

#endif
