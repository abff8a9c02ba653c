#ifndef DPSIM_CONFIG_H
#define DPSIM_CONFIG_H

#include <bitset>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace dpsim {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class DramStandard { DDR3, DDR4, LPDDR4 };

std::string to_string(DramStandard s);
DramStandard standard_from_string(const std::string& s);

struct DramGeometry {
    std::uint32_t channels = 1;
    std::uint32_t ranks_per_channel = 1;
    std::uint32_t banks_per_rank = 8;
    std::uint32_t subarrays_per_bank = 128;
    std::uint32_t rows_per_subarray = 512;
    std::uint64_t row_size_bytes = 8192;
    std::uint32_t bus_width_bits = 64;
    double data_rate = 1600.0;  // MT/s

    std::uint64_t total_banks() const {
        return std::uint64_t(channels) * ranks_per_channel * banks_per_rank;
    }
    std::uint64_t total_subarrays() const { return total_banks() * subarrays_per_bank; }
    std::uint64_t total_rows() const { return total_subarrays() * rows_per_subarray; }
    std::uint64_t total_capacity() const { return total_rows() * row_size_bytes; }
    std::uint64_t row_bits() const { return row_size_bytes * 8; }

    bool operator==(const DramGeometry&) const = default;
};

// All times in ns unless the name says otherwise.
struct TimingParams {
    double cycle_time = 1.25;
    double tRCD = 13.75;
    double tRP = 13.75;
    double tRAS = 35.0;
    double tRRD = 6.0;
    double tFAW = 30.0;
    double tRFC = 260.0;
    double tREFI = 7800.0;
    std::optional<double> tREFW_ms;  // filled by validate_config when omitted
    double act_latency = 35.0;
    double pre_latency = 13.0;
    // Per-8KB-row latencies of the copy/write based mechanisms.
    double baseline_row_latency = 546.0;
    double lisa_row_latency = 148.5;
    double rowclone_row_latency = 90.0;

    bool operator==(const TimingParams&) const = default;
};

struct ElectricalParams {
    double vdd = 1.0;
    double c_cell = 22e-15;
    double c_bitline_ratio = 10.0;

    double precharge_level() const { return vdd / 2.0; }
    double c_bitline() const { return c_bitline_ratio * c_cell; }

    bool operator==(const ElectricalParams&) const = default;
};

// Energies in nJ per 8KB row.
struct EnergyParams {
    double baseline_write = 2000.0;
    double lisa = 90.0;
    double rowclone = 50.0;
    double activation = 17.3;
    double precharge = 17.2;
    double ue_sa_generate = 7.3;
    double ue_sa_writeback = 10.0;
    double uc_pla = 17.2;
    double d_tran_generate = 8.0;
    double d_tran_writeback = 10.0;
    double bus_energy_per_command = 0.0;
    // Relative swing of UE-SA energy with the prior cell content (+-5%).
    double ue_sa_data_dependence = 0.05;

    bool operator==(const EnergyParams&) const = default;
};

// Process variation and noise. Voltages are bitline-referred.
struct VariationModel {
    std::uint64_t master_seed = 0x5eed;
    double variation_percent = 0.04;
    double sa_offset_bias = 0.010;
    // sigma = sa_offset_sigma_per_percent * (variation_percent * 100)
    double sa_offset_sigma_per_percent = 0.010 / (3.5400837992061445 * 4.0);
    double cell_noise_sigma = 80e-9;
    double temperature = 30.0;
    double temp_sensitivity = 0.004;
    double aging_drift_sigma = 1e-5;
    bool aged = false;
    double cell_offset_bias = 0.0145;
    double cell_offset_sigma = 0.005;
    double uc_pla_sa_weight = 0.1;  // lambda
    double tau_median_s = 24.0 * 3600.0;
    double tau_log_sigma = 1.0;

    double sa_offset_sigma() const;  // temperature-scaled

    bool operator==(const VariationModel&) const = default;
};

struct ModeRegisters {
    static constexpr int kPartitions = 13;
    std::bitset<kPartitions> mr3_partition_bits;

    bool operator==(const ModeRegisters&) const = default;
};

struct LatencyPufParams {
    double reduced_tRCD = 2.5;
    double weak_cell_fraction = 0.002;
    double strength_mean = 0.0;
    double strength_sigma = 1.0;
    double row_sigma = 2.0;
    double kappa = 0.06;  // logit shift per degree C
    double enroll_temperature = 30.0;

    bool operator==(const LatencyPufParams&) const = default;
};

struct PufParams {
    std::uint64_t segment_bytes = 8192;
    double per_read_cost_ms = 0.88;  // one 8KB evaluation round, measured
    double prelat_eval_ms = 1.59;
    std::uint32_t dataplant_filter_reads = 5;
    double dataplant_filter_threshold = 0.9;
    std::uint32_t latency_filter_reads = 100;
    double latency_filter_threshold = 0.91;
    std::uint32_t cacheline_bits = 512;
    LatencyPufParams latency;

    bool operator==(const PufParams&) const = default;
};

struct ColdbootParams {
    double burst_anchor_ms = 9.0;
    std::uint64_t burst_anchor_capacity = 4ull << 30;
    std::uint64_t burst_anchor_row_bytes = 8192;

    bool operator==(const ColdbootParams&) const = default;
};

struct Derived {
    std::uint64_t total_rows = 0;
    std::uint64_t total_capacity = 0;
    std::uint64_t refresh_ops_per_window = 0;

    bool operator==(const Derived&) const = default;
};

struct DramConfig {
    std::string profile = "DDR3-1600";
    DramStandard standard = DramStandard::DDR3;
    std::optional<std::uint64_t> declared_capacity;
    DramGeometry geometry;
    TimingParams timing;
    ElectricalParams electrical;
    EnergyParams energy;
    VariationModel variation;
    ModeRegisters mode_registers;
    PufParams puf;
    ColdbootParams coldboot;
    Derived derived;

    double tREFW_ms() const;  // requires a validated config

    bool operator==(const DramConfig&) const = default;
};

/// Checks every invariant and fills in defaults and derived quantities.
/// Throws ConfigError naming the first violated invariant.
DramConfig validate_config(DramConfig config);

/// Parses a JSON document. Unknown keys anywhere are errors.
DramConfig parse_config(const nlohmann::json& j);
DramConfig parse_config_text(const std::string& text);
DramConfig load_config_file(const std::string& path);
nlohmann::json config_to_json(const DramConfig& config);

/// Named device profiles scaled to a capacity: "DDR3-1600", "DDR4-2400",
/// "LPDDR4-3200". Capacity must be a power-of-two multiple of 64MB.
DramConfig make_profile(const std::string& name, std::uint64_t capacity_bytes);

/// The default desk-scale device (DDR3-1600, 64MB).
DramConfig default_config();

/// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const DramConfig& config);

}  // namespace dpsim

#endif
