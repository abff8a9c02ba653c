#ifndef DPSIM_COLDBOOT_H
#define DPSIM_COLDBOOT_H

#include <cstdint>
#include <string>
#include <vector>

#include "dpsim/config.h"

namespace dpsim {

enum class Mechanism {
    TCG_SOFTWARE,
    CMD_BASELINE,
    CMD_LISA,
    CMD_ROWCLONE,
    CMD_DATAPLANT_UE,
    CMD_DATAPLANT_UC,
    SELF_SR,
    SELF_BURST,
};

std::string to_string(Mechanism m);
Mechanism mechanism_from_string(const std::string& s);
const std::vector<Mechanism>& all_mechanisms();

bool is_self(Mechanism m);

// Per-row shape of one destruction op.
struct MechanismCost {
    double row_latency_ns;
    double row_energy_nj;
    int row_ops;            // ACT-like ops per row, each counted by tRRD/tFAW
    int commands;           // external bus commands per row
    bool precharge_after;   // bank needs tRP after the op
    bool bus_serial;        // data moves over the channel; rows cannot overlap
};

MechanismCost mechanism_cost(const DramConfig& c, Mechanism m);

struct PowerConstraints {
    double tRRD;
    double tFAW;
    std::uint64_t banks_parallel;
};

PowerConstraints power_constraints(const DramConfig& c);

struct TraceEvent {
    double time_ns;
    std::uint32_t bank;
    std::uint64_t row;
};

struct DestructionReport {
    Mechanism mechanism;
    std::uint64_t capacity = 0;
    std::uint64_t rows = 0;
    double latency_s = 0;
    double energy_j = 0;
    double per_row_latency_ns = 0;
    double per_row_energy_nj = 0;
    std::uint64_t commands = 0;
    std::vector<TraceEvent> trace;  // row-ops, filled on request
};

// Rows go round-robin over all banks (channel, rank, bank order). Each row-op
// issues at max(bank ready, previous row-op + tRRD, fourth previous + tFAW).
DestructionReport schedule_destruction(const DramConfig& c, Mechanism m, bool keep_trace = false);

// Row-op legality: consecutive ops >= tRRD apart device-wide (so also per
// bank) and at most 4 ops in any window shorter than tFAW.
struct TraceCheck {
    bool ok = true;
    std::uint64_t trrd_violations = 0;
    std::uint64_t tfaw_violations = 0;
    std::uint64_t bank_overlaps = 0;
};

TraceCheck validate_trace(const std::vector<TraceEvent>& trace, const PowerConstraints& pc,
                          double min_bank_gap_ns);

double destruction_energy(const DramConfig& c, Mechanism m);

// Burst self-refresh time per row, fixed by the burst anchor.
double burst_row_time_ns(const DramConfig& c);

struct ComparisonTable {
    std::vector<DestructionReport> reports;  // capacity-major, mechanism order
    const DestructionReport& at(std::uint64_t capacity, Mechanism m) const;
};

// One report per (capacity, mechanism) on `profile` scaled to each capacity.
ComparisonTable compare_mechanisms(const DramConfig& base, const std::vector<std::uint64_t>& capacities,
                                   unsigned threads = 1);

// Static reference rows: overheads of self-destruction vs two ciphers.
struct OverheadRow {
    std::string metric;
    std::string self_destruction;
    std::string chacha8;
    std::string aes128;
};

const std::vector<OverheadRow>& overhead_table();

// Secure deallocation at per-operation cost level.
enum class DeallocMechanism { Software, Lisa, Rowclone, UeSa, UcPla, DTran };

std::string to_string(DeallocMechanism m);
const std::vector<DeallocMechanism>& all_dealloc_mechanisms();

struct DeallocCost {
    std::uint64_t rows = 0;
    double latency_ns = 0;
    double energy_nj = 0;
};

DeallocCost dealloc_cost(const DramConfig& c, std::uint64_t bytes, DeallocMechanism m);

}  // namespace dpsim

#endif
