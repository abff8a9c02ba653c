#include "dpsim/config.h"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

using nlohmann::json;

namespace dpsim {

std::string to_string(DramStandard s)
{
    switch (s) {
    case DramStandard::DDR3: return "DDR3";
    case DramStandard::DDR4: return "DDR4";
    case DramStandard::LPDDR4: return "LPDDR4";
    }
    return "?";
}

DramStandard standard_from_string(const std::string& s)
{
    if (s == "DDR3") return DramStandard::DDR3;
    if (s == "DDR4") return DramStandard::DDR4;
    if (s == "LPDDR4") return DramStandard::LPDDR4;
    throw ConfigError("standard: unknown value '" + s + "' (expected DDR3, DDR4 or LPDDR4)");
}

double VariationModel::sa_offset_sigma() const
{
    double scale = 1.0 + temp_sensitivity * (temperature - 30.0);
    return sa_offset_sigma_per_percent * variation_percent * 100.0 * scale;
}

double DramConfig::tREFW_ms() const
{
    if (!timing.tREFW_ms)
        throw ConfigError("tREFW: not set (config not validated)");
    return *timing.tREFW_ms;
}

namespace {

void require(bool cond, const std::string& what)
{
    if (!cond)
        throw ConfigError(what);
}

void require_positive(double v, const std::string& name)
{
    require(std::isfinite(v) && v > 0.0, name + ": must be > 0");
}

void require_count(std::uint64_t v, const std::string& name)
{
    require(v >= 1, name + ": must be >= 1");
}

}  // namespace

DramConfig validate_config(DramConfig c)
{
    const auto& g = c.geometry;
    require_count(g.channels, "geometry.channels");
    require_count(g.ranks_per_channel, "geometry.ranks_per_channel");
    require_count(g.banks_per_rank, "geometry.banks_per_rank");
    require_count(g.subarrays_per_bank, "geometry.subarrays_per_bank");
    require_count(g.rows_per_subarray, "geometry.rows_per_subarray");
    require_count(g.row_size_bytes, "geometry.row_size_bytes");
    require(std::has_single_bit(g.row_size_bytes), "geometry.row_size_bytes: must be a power of two");
    require_count(g.bus_width_bits, "geometry.bus_width_bits");
    require_positive(g.data_rate, "geometry.data_rate");
    if (c.declared_capacity)
        require(*c.declared_capacity == g.total_capacity(),
                "declared_capacity: " + std::to_string(*c.declared_capacity) +
                    " does not match geometry capacity " + std::to_string(g.total_capacity()));

    auto& t = c.timing;
    require_positive(t.cycle_time, "timing.cycle_time");
    require_positive(t.tRCD, "timing.tRCD");
    require_positive(t.tRP, "timing.tRP");
    require_positive(t.tRAS, "timing.tRAS");
    require_positive(t.tRRD, "timing.tRRD");
    require_positive(t.tFAW, "timing.tFAW");
    require_positive(t.tRFC, "timing.tRFC");
    require_positive(t.tREFI, "timing.tREFI");
    if (!t.tREFW_ms)
        t.tREFW_ms = c.standard == DramStandard::LPDDR4 ? 32.0 : 64.0;
    require_positive(*t.tREFW_ms, "timing.tREFW_ms");
    require_positive(t.act_latency, "timing.act_latency");
    require_positive(t.pre_latency, "timing.pre_latency");
    require_positive(t.baseline_row_latency, "timing.baseline_row_latency");
    require_positive(t.lisa_row_latency, "timing.lisa_row_latency");
    require_positive(t.rowclone_row_latency, "timing.rowclone_row_latency");

    const auto& e = c.electrical;
    require_positive(e.vdd, "electrical.vdd");
    require_positive(e.c_cell, "electrical.c_cell");
    require_positive(e.c_bitline_ratio, "electrical.c_bitline_ratio");

    const auto& en = c.energy;
    for (auto [v, n] : {std::pair{en.baseline_write, "energy.baseline_write"},
                        {en.lisa, "energy.lisa"},
                        {en.rowclone, "energy.rowclone"},
                        {en.activation, "energy.activation"},
                        {en.precharge, "energy.precharge"},
                        {en.ue_sa_generate, "energy.ue_sa_generate"},
                        {en.ue_sa_writeback, "energy.ue_sa_writeback"},
                        {en.uc_pla, "energy.uc_pla"},
                        {en.d_tran_generate, "energy.d_tran_generate"},
                        {en.d_tran_writeback, "energy.d_tran_writeback"}})
        require_positive(v, n);
    require(en.bus_energy_per_command >= 0.0, "energy.bus_energy_per_command: must be >= 0");
    require(en.ue_sa_data_dependence >= 0.0 && en.ue_sa_data_dependence < 1.0,
            "energy.ue_sa_data_dependence: must be in [0, 1)");
    require(std::abs(en.ue_sa_generate + en.ue_sa_writeback - en.activation) < 1e-9,
            "energy: ue_sa_generate + ue_sa_writeback must equal activation");

    const auto& v = c.variation;
    require(v.variation_percent >= 0.0 && v.variation_percent < 1.0,
            "variation.variation_percent: must be in [0, 1)");
    require(v.sa_offset_sigma_per_percent >= 0.0, "variation.sa_offset_sigma_per_percent: must be >= 0");
    require(v.cell_noise_sigma >= 0.0, "variation.cell_noise_sigma: must be >= 0");
    require(v.temperature >= -40.0 && v.temperature <= 150.0, "variation.temperature: must be in [-40, 150]");
    require(v.sa_offset_sigma() >= 0.0, "variation.temp_sensitivity: yields a negative sigma");
    require(v.aging_drift_sigma >= 0.0, "variation.aging_drift_sigma: must be >= 0");
    require(v.cell_offset_sigma >= 0.0, "variation.cell_offset_sigma: must be >= 0");
    require(v.uc_pla_sa_weight >= 0.0, "variation.uc_pla_sa_weight: must be >= 0");
    require_positive(v.tau_median_s, "variation.tau_median_s");
    require(v.tau_log_sigma >= 0.0, "variation.tau_log_sigma: must be >= 0");

    const auto& p = c.puf;
    require_count(p.segment_bytes, "puf.segment_bytes");
    require(p.segment_bytes % g.row_size_bytes == 0, "puf.segment_bytes: must be a multiple of the row size");
    require_positive(p.per_read_cost_ms, "puf.per_read_cost_ms");
    require_positive(p.prelat_eval_ms, "puf.prelat_eval_ms");
    require_count(p.dataplant_filter_reads, "puf.dataplant_filter_reads");
    require_count(p.latency_filter_reads, "puf.latency_filter_reads");
    require(p.dataplant_filter_threshold > 0.0 && p.dataplant_filter_threshold <= 1.0,
            "puf.dataplant_filter_threshold: must be in (0, 1]");
    require(p.latency_filter_threshold > 0.0 && p.latency_filter_threshold <= 1.0,
            "puf.latency_filter_threshold: must be in (0, 1]");
    require(std::has_single_bit(std::uint64_t(p.cacheline_bits)) && p.cacheline_bits >= 2,
            "puf.cacheline_bits: must be a power of two >= 2");
    require_positive(p.latency.reduced_tRCD, "puf.latency.reduced_tRCD");
    require(p.latency.weak_cell_fraction >= 0.0 && p.latency.weak_cell_fraction <= 1.0,
            "puf.latency.weak_cell_fraction: must be in [0, 1]");
    require(p.latency.strength_sigma >= 0.0 && p.latency.row_sigma >= 0.0,
            "puf.latency: sigmas must be >= 0");
    require(p.latency.kappa >= 0.0, "puf.latency.kappa: must be >= 0");

    require_positive(c.coldboot.burst_anchor_ms, "coldboot.burst_anchor_ms");
    require_count(c.coldboot.burst_anchor_capacity, "coldboot.burst_anchor_capacity");
    require_count(c.coldboot.burst_anchor_row_bytes, "coldboot.burst_anchor_row_bytes");

    c.derived.total_rows = g.total_rows();
    c.derived.total_capacity = g.total_capacity();
    c.derived.refresh_ops_per_window =
        static_cast<std::uint64_t>(std::llround(*t.tREFW_ms * 1e6 / t.tREFI));
    require_count(c.derived.refresh_ops_per_window, "timing: tREFW / tREFI");
    return c;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

// Reads the known keys of one object and rejects everything else.
class Section {
  public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name))
    {
        if (!j_.is_object())
            throw ConfigError(name_ + ": expected an object");
    }

    template <typename T>
    void get(const char* key, T& out)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end())
            return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(path(key) + ": wrong type");
        }
    }

    template <typename T>
    void get_opt(const char* key, std::optional<T>& out)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null())
            return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(path(key) + ": wrong type");
        }
    }

    const json* sub(const char* key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError(path(it.key()) + ": unknown key");
    }

  private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

}  // namespace

DramConfig parse_config(const json& j)
{
    DramConfig c = default_config();
    c.timing.tREFW_ms.reset();
    Section top(j, "");
    std::string profile = c.profile;
    std::optional<std::uint64_t> capacity;
    top.get("profile", profile);
    top.get_opt("declared_capacity", capacity);
    // A named profile resets every section before overrides are applied.
    if (profile != c.profile || capacity) {
        c = make_profile(profile, capacity.value_or(64ull << 20));
        c.timing.tREFW_ms.reset();
    }
    c.declared_capacity = capacity;
    std::string standard = to_string(c.standard);
    top.get("standard", standard);
    c.standard = standard_from_string(standard);

    if (auto* s = top.sub("geometry")) {
        Section g(*s, "geometry");
        auto& x = c.geometry;
        g.get("channels", x.channels);
        g.get("ranks_per_channel", x.ranks_per_channel);
        g.get("banks_per_rank", x.banks_per_rank);
        g.get("subarrays_per_bank", x.subarrays_per_bank);
        g.get("rows_per_subarray", x.rows_per_subarray);
        g.get("row_size_bytes", x.row_size_bytes);
        g.get("bus_width_bits", x.bus_width_bits);
        g.get("data_rate", x.data_rate);
        g.finish();
    }
    if (auto* s = top.sub("timing")) {
        Section t(*s, "timing");
        auto& x = c.timing;
        t.get("cycle_time", x.cycle_time);
        t.get("tRCD", x.tRCD);
        t.get("tRP", x.tRP);
        t.get("tRAS", x.tRAS);
        t.get("tRRD", x.tRRD);
        t.get("tFAW", x.tFAW);
        t.get("tRFC", x.tRFC);
        t.get("tREFI", x.tREFI);
        t.get_opt("tREFW_ms", x.tREFW_ms);
        t.get("act_latency", x.act_latency);
        t.get("pre_latency", x.pre_latency);
        t.get("baseline_row_latency", x.baseline_row_latency);
        t.get("lisa_row_latency", x.lisa_row_latency);
        t.get("rowclone_row_latency", x.rowclone_row_latency);
        t.finish();
    }
    if (auto* s = top.sub("electrical")) {
        Section e(*s, "electrical");
        auto& x = c.electrical;
        e.get("vdd", x.vdd);
        e.get("c_cell", x.c_cell);
        e.get("c_bitline_ratio", x.c_bitline_ratio);
        e.finish();
    }
    if (auto* s = top.sub("energy")) {
        Section e(*s, "energy");
        auto& x = c.energy;
        e.get("baseline_write", x.baseline_write);
        e.get("lisa", x.lisa);
        e.get("rowclone", x.rowclone);
        e.get("activation", x.activation);
        e.get("precharge", x.precharge);
        e.get("ue_sa_generate", x.ue_sa_generate);
        e.get("ue_sa_writeback", x.ue_sa_writeback);
        e.get("uc_pla", x.uc_pla);
        e.get("d_tran_generate", x.d_tran_generate);
        e.get("d_tran_writeback", x.d_tran_writeback);
        e.get("bus_energy_per_command", x.bus_energy_per_command);
        e.get("ue_sa_data_dependence", x.ue_sa_data_dependence);
        e.finish();
    }
    if (auto* s = top.sub("variation")) {
        Section v(*s, "variation");
        auto& x = c.variation;
        v.get("master_seed", x.master_seed);
        v.get("variation_percent", x.variation_percent);
        v.get("sa_offset_bias", x.sa_offset_bias);
        v.get("sa_offset_sigma_per_percent", x.sa_offset_sigma_per_percent);
        v.get("cell_noise_sigma", x.cell_noise_sigma);
        v.get("temperature", x.temperature);
        v.get("temp_sensitivity", x.temp_sensitivity);
        v.get("aging_drift_sigma", x.aging_drift_sigma);
        v.get("aged", x.aged);
        v.get("cell_offset_bias", x.cell_offset_bias);
        v.get("cell_offset_sigma", x.cell_offset_sigma);
        v.get("uc_pla_sa_weight", x.uc_pla_sa_weight);
        v.get("tau_median_s", x.tau_median_s);
        v.get("tau_log_sigma", x.tau_log_sigma);
        v.finish();
    }
    if (auto* s = top.sub("mode_registers")) {
        Section m(*s, "mode_registers");
        std::vector<bool> bits;
        m.get("mr3_partition_bits", bits);
        m.finish();
        if (!bits.empty() && bits.size() != ModeRegisters::kPartitions)
            throw ConfigError("mode_registers.mr3_partition_bits: expected exactly 13 entries");
        for (std::size_t i = 0; i < bits.size(); ++i)
            c.mode_registers.mr3_partition_bits[i] = bits[i];
    }
    if (auto* s = top.sub("puf")) {
        Section p(*s, "puf");
        auto& x = c.puf;
        p.get("segment_bytes", x.segment_bytes);
        p.get("per_read_cost_ms", x.per_read_cost_ms);
        p.get("prelat_eval_ms", x.prelat_eval_ms);
        p.get("dataplant_filter_reads", x.dataplant_filter_reads);
        p.get("dataplant_filter_threshold", x.dataplant_filter_threshold);
        p.get("latency_filter_reads", x.latency_filter_reads);
        p.get("latency_filter_threshold", x.latency_filter_threshold);
        p.get("cacheline_bits", x.cacheline_bits);
        if (auto* ls = p.sub("latency")) {
            Section l(*ls, "puf.latency");
            auto& y = x.latency;
            l.get("reduced_tRCD", y.reduced_tRCD);
            l.get("weak_cell_fraction", y.weak_cell_fraction);
            l.get("strength_mean", y.strength_mean);
            l.get("strength_sigma", y.strength_sigma);
            l.get("row_sigma", y.row_sigma);
            l.get("kappa", y.kappa);
            l.get("enroll_temperature", y.enroll_temperature);
            l.finish();
        }
        p.finish();
    }
    if (auto* s = top.sub("coldboot")) {
        Section b(*s, "coldboot");
        auto& x = c.coldboot;
        b.get("burst_anchor_ms", x.burst_anchor_ms);
        b.get("burst_anchor_capacity", x.burst_anchor_capacity);
        b.get("burst_anchor_row_bytes", x.burst_anchor_row_bytes);
        b.finish();
    }
    top.finish();
    return validate_config(std::move(c));
}

DramConfig parse_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

DramConfig load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json config_to_json(const DramConfig& c)
{
    json j;
    j["profile"] = c.profile;
    j["standard"] = to_string(c.standard);
    j["declared_capacity"] = c.declared_capacity ? json(*c.declared_capacity) : json(nullptr);
    const auto& g = c.geometry;
    j["geometry"] = {{"channels", g.channels},
                     {"ranks_per_channel", g.ranks_per_channel},
                     {"banks_per_rank", g.banks_per_rank},
                     {"subarrays_per_bank", g.subarrays_per_bank},
                     {"rows_per_subarray", g.rows_per_subarray},
                     {"row_size_bytes", g.row_size_bytes},
                     {"bus_width_bits", g.bus_width_bits},
                     {"data_rate", g.data_rate}};
    const auto& t = c.timing;
    j["timing"] = {{"cycle_time", t.cycle_time},
                   {"tRCD", t.tRCD},
                   {"tRP", t.tRP},
                   {"tRAS", t.tRAS},
                   {"tRRD", t.tRRD},
                   {"tFAW", t.tFAW},
                   {"tRFC", t.tRFC},
                   {"tREFI", t.tREFI},
                   {"tREFW_ms", t.tREFW_ms ? json(*t.tREFW_ms) : json(nullptr)},
                   {"act_latency", t.act_latency},
                   {"pre_latency", t.pre_latency},
                   {"baseline_row_latency", t.baseline_row_latency},
                   {"lisa_row_latency", t.lisa_row_latency},
                   {"rowclone_row_latency", t.rowclone_row_latency}};
    const auto& e = c.electrical;
    j["electrical"] = {{"vdd", e.vdd}, {"c_cell", e.c_cell}, {"c_bitline_ratio", e.c_bitline_ratio}};
    const auto& en = c.energy;
    j["energy"] = {{"baseline_write", en.baseline_write},
                   {"lisa", en.lisa},
                   {"rowclone", en.rowclone},
                   {"activation", en.activation},
                   {"precharge", en.precharge},
                   {"ue_sa_generate", en.ue_sa_generate},
                   {"ue_sa_writeback", en.ue_sa_writeback},
                   {"uc_pla", en.uc_pla},
                   {"d_tran_generate", en.d_tran_generate},
                   {"d_tran_writeback", en.d_tran_writeback},
                   {"bus_energy_per_command", en.bus_energy_per_command},
                   {"ue_sa_data_dependence", en.ue_sa_data_dependence}};
    const auto& v = c.variation;
    j["variation"] = {{"master_seed", v.master_seed},
                      {"variation_percent", v.variation_percent},
                      {"sa_offset_bias", v.sa_offset_bias},
                      {"sa_offset_sigma_per_percent", v.sa_offset_sigma_per_percent},
                      {"cell_noise_sigma", v.cell_noise_sigma},
                      {"temperature", v.temperature},
                      {"temp_sensitivity", v.temp_sensitivity},
                      {"aging_drift_sigma", v.aging_drift_sigma},
                      {"aged", v.aged},
                      {"cell_offset_bias", v.cell_offset_bias},
                      {"cell_offset_sigma", v.cell_offset_sigma},
                      {"uc_pla_sa_weight", v.uc_pla_sa_weight},
                      {"tau_median_s", v.tau_median_s},
                      {"tau_log_sigma", v.tau_log_sigma}};
    std::vector<bool> bits(ModeRegisters::kPartitions);
    for (int i = 0; i < ModeRegisters::kPartitions; ++i)
        bits[i] = c.mode_registers.mr3_partition_bits[i];
    j["mode_registers"] = {{"mr3_partition_bits", bits}};
    const auto& p = c.puf;
    j["puf"] = {{"segment_bytes", p.segment_bytes},
                {"per_read_cost_ms", p.per_read_cost_ms},
                {"prelat_eval_ms", p.prelat_eval_ms},
                {"dataplant_filter_reads", p.dataplant_filter_reads},
                {"dataplant_filter_threshold", p.dataplant_filter_threshold},
                {"latency_filter_reads", p.latency_filter_reads},
                {"latency_filter_threshold", p.latency_filter_threshold},
                {"cacheline_bits", p.cacheline_bits},
                {"latency",
                 {{"reduced_tRCD", p.latency.reduced_tRCD},
                  {"weak_cell_fraction", p.latency.weak_cell_fraction},
                  {"strength_mean", p.latency.strength_mean},
                  {"strength_sigma", p.latency.strength_sigma},
                  {"row_sigma", p.latency.row_sigma},
                  {"kappa", p.latency.kappa},
                  {"enroll_temperature", p.latency.enroll_temperature}}}};
    j["coldboot"] = {{"burst_anchor_ms", c.coldboot.burst_anchor_ms},
                     {"burst_anchor_capacity", c.coldboot.burst_anchor_capacity},
                     {"burst_anchor_row_bytes", c.coldboot.burst_anchor_row_bytes}};
    return j;
}

// ---------------------------------------------------------------------------
// Profiles

DramConfig make_profile(const std::string& name, std::uint64_t capacity)
{
    constexpr std::uint64_t kMin = 64ull << 20;
    if (capacity < kMin || capacity % kMin != 0 || !std::has_single_bit(capacity / kMin))
        throw ConfigError("profile capacity: must be a power-of-two multiple of 64MB, got " +
                          std::to_string(capacity));

    DramConfig c;
    c.profile = name;
    auto& g = c.geometry;
    auto& t = c.timing;
    if (name == "DDR3-1600") {
        c.standard = DramStandard::DDR3;
        g.banks_per_rank = 8;
        g.data_rate = 1600;
        t = TimingParams{};
    } else if (name == "DDR4-2400") {
        c.standard = DramStandard::DDR4;
        g.banks_per_rank = 16;
        g.data_rate = 2400;
        t.cycle_time = 0.833;
        t.tRCD = 14.16;
        t.tRP = 14.16;
        t.tRAS = 32.0;
        t.tRRD = 5.3;
        t.tFAW = 30.0;
        t.tRFC = 350.0;
        t.tREFI = 7800.0;
    } else if (name == "LPDDR4-3200") {
        c.standard = DramStandard::LPDDR4;
        g.banks_per_rank = 8;
        g.bus_width_bits = 32;
        g.data_rate = 3200;
        t.cycle_time = 0.625;
        t.tRCD = 18.0;
        t.tRP = 18.0;
        t.tRAS = 42.0;
        t.tRRD = 10.0;
        t.tFAW = 40.0;
        t.tRFC = 280.0;
        t.tREFI = 3904.0;
    } else {
        throw ConfigError("profile: unknown name '" + name + "'");
    }

    // Capacity grows through subarrays per bank, then ranks (up to 4).
    g.row_size_bytes = 8192;
    g.rows_per_subarray = 512;
    std::uint64_t rows = capacity / g.row_size_bytes;
    std::uint64_t per_bank = rows / g.banks_per_rank;
    std::uint64_t subarrays = per_bank / g.rows_per_subarray;
    std::uint32_t ranks = 1;
    while (subarrays > 512 && ranks < 4) {
        ranks *= 2;
        subarrays /= 2;
    }
    g.ranks_per_channel = ranks;
    g.subarrays_per_bank = static_cast<std::uint32_t>(subarrays);
    c.declared_capacity = capacity;
    return validate_config(c);
}

DramConfig default_config()
{
    return make_profile("DDR3-1600", 64ull << 20);
}

std::string config_hash(const DramConfig& c)
{
    std::string s = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace dpsim
