#include "dpsim/circuit.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dpsim {

std::string to_string(Signal s)
{
    switch (s) {
    case Signal::Wordline: return "wordline";
    case Signal::SenseAmp: return "sense_amp";
    case Signal::PrechargeLogic: return "precharge_logic";
    }
    return "?";
}

std::string to_string(Action a)
{
    switch (a) {
    case Action::Raise: return "raise";
    case Action::Lower: return "lower";
    case Action::Trigger: return "trigger";
    }
    return "?";
}

std::string to_string(CommandKind k)
{
    switch (k) {
    case CommandKind::ACT: return "ACT";
    case CommandKind::PRE: return "PRE";
    case CommandKind::UE_SA: return "UE_SA";
    case CommandKind::UE_SA_WRITEBACK: return "UE_SA_WRITEBACK";
    case CommandKind::UC_PLA: return "UC_PLA";
    case CommandKind::D_TRAN: return "D_TRAN";
    }
    return "?";
}

CommandKind command_from_string(const std::string& s)
{
    for (auto k : {CommandKind::ACT, CommandKind::PRE, CommandKind::UE_SA, CommandKind::UE_SA_WRITEBACK,
                   CommandKind::UC_PLA, CommandKind::D_TRAN})
        if (to_string(k) == s)
            return k;
    throw SimulationError("unknown command kind: " + s);
}

// Event times are schematic: only the ordering is meaningful.
CommandWaveform waveform_of(CommandKind kind, const TimingParams& t)
{
    const double share = 5.0;  // charge sharing window before SA enable
    CommandWaveform w{kind, {}};
    auto& ev = w.events;
    switch (kind) {
    case CommandKind::ACT:
        ev = {{Signal::Wordline, Action::Raise, 0.0},
              {Signal::SenseAmp, Action::Trigger, share},
              {Signal::Wordline, Action::Lower, t.act_latency}};
        break;
    case CommandKind::PRE:
        ev = {{Signal::Wordline, Action::Lower, 0.0},
              {Signal::SenseAmp, Action::Lower, 1.0},
              {Signal::PrechargeLogic, Action::Trigger, 2.0}};
        break;
    case CommandKind::UE_SA:
        ev = {{Signal::SenseAmp, Action::Trigger, 0.0}};
        break;
    case CommandKind::UE_SA_WRITEBACK:
    case CommandKind::D_TRAN:
        ev = {{Signal::SenseAmp, Action::Trigger, 0.0},
              {Signal::Wordline, Action::Raise, share},
              {Signal::Wordline, Action::Lower, t.act_latency}};
        break;
    case CommandKind::UC_PLA:
        ev = {{Signal::Wordline, Action::Raise, 0.0},
              {Signal::PrechargeLogic, Action::Trigger, 0.0},
              {Signal::Wordline, Action::Lower, t.pre_latency}};
        break;
    }
    return w;
}

std::string waveform_csv(const CommandWaveform& w)
{
    std::ostringstream os;
    os << "signal,action,time_ns\n";
    for (const auto& e : w.events)
        os << to_string(e.signal) << ',' << to_string(e.action) << ',' << e.time_ns << '\n';
    return os.str();
}

bool waveform_valid(const CommandWaveform& w)
{
    const auto& ev = w.events;
    if (ev.empty())
        return false;
    for (std::size_t i = 1; i < ev.size(); ++i)
        if (ev[i].time_ns < ev[i - 1].time_ns)
            return false;
    auto first = [&](Signal s, Action a) -> const WaveEvent* {
        for (const auto& e : ev)
            if (e.signal == s && e.action == a)
                return &e;
        return nullptr;
    };
    const WaveEvent* wl = first(Signal::Wordline, Action::Raise);
    const WaveEvent* sa = first(Signal::SenseAmp, Action::Trigger);
    const WaveEvent* pl = first(Signal::PrechargeLogic, Action::Trigger);
    switch (w.kind) {
    case CommandKind::ACT:
        return wl && sa && wl->time_ns < sa->time_ns;
    case CommandKind::PRE:
        return pl && !wl;
    case CommandKind::UE_SA:
    case CommandKind::UE_SA_WRITEBACK:
    case CommandKind::D_TRAN:
        return sa && (!wl || sa->time_ns < wl->time_ns) &&
               (w.kind == CommandKind::UE_SA ? !wl : wl != nullptr);
    case CommandKind::UC_PLA:
        return wl && pl && wl->time_ns == pl->time_ns && !sa;
    }
    return false;
}

double charge_share(CellState& cell, BitlinePair& bl, const ElectricalParams& e)
{
    if (!bl.precharged)
        throw SimulationError("charge sharing on a bitline that is not precharged");
    double cb = e.c_bitline();
    double delta = (cell.voltage - bl.v_bl) * cell.capacitance / (cell.capacitance + cb);
    bl.v_bl += delta;
    bl.precharged = false;
    cell.voltage = bl.v_bl;
    return delta;
}

static int drive(BitlinePair& bl, const ElectricalParams& e, bool one)
{
    bl.v_bl = one ? e.vdd : 0.0;
    bl.v_blbar = one ? 0.0 : e.vdd;
    bl.precharged = false;
    return one ? 1 : 0;
}

int sense(const SenseAmpInstance& sa, BitlinePair& bl, const ElectricalParams& e, double noise)
{
    double delta = bl.v_bl - e.precharge_level();
    return drive(bl, e, (delta + sa.offset) + noise > 0.0);
}

int sense_connected(const SenseAmpInstance& sa, double cell_offset, double sa_weight, BitlinePair& bl,
                    const ElectricalParams& e, double noise)
{
    double delta = bl.v_bl - e.precharge_level();
    return drive(bl, e, (delta + (cell_offset + sa_weight * sa.offset)) + noise > 0.0);
}

double effective_tau(double tau_s, double temperature)
{
    return tau_s * std::exp2((30.0 - temperature) / 10.0);
}

void leak(CellState& cell, double dt_s, double temperature, double tau_s, const ElectricalParams& e)
{
    if (dt_s < 0.0)
        throw SimulationError("leak: negative time step");
    if (dt_s == 0.0)
        return;
    double p = e.precharge_level();
    cell.voltage = p + (cell.voltage - p) * std::exp(-dt_s / effective_tau(tau_s, temperature));
}

// ---------------------------------------------------------------------------

Subarray::Subarray(const DramConfig& c, const Address& base, std::uint32_t rows, std::uint32_t cols)
    : cfg_(c), sampler_(c), base_(base)
{
    const auto& g = c.geometry;
    rows_ = rows ? rows : g.rows_per_subarray;
    cols_ = cols ? cols : static_cast<std::uint32_t>(g.row_bits());
    if (rows_ > g.rows_per_subarray || cols_ > g.row_bits())
        throw SimulationError("subarray larger than the configured geometry");
    base_.row = 0;
    base_.column = 0;
    check_address(base_, g);

    cells_.resize(std::size_t(rows_) * cols_);
    cell_offsets_.resize(cells_.size());
    for (std::uint32_t r = 0; r < rows_; ++r)
        for (std::uint32_t col = 0; col < cols_; ++col) {
            Address a = cell_address(r, col);
            auto i = idx(r, col);
            cells_[i] = CellState{0.0, sampler_.cell_capacitance(a)};
            cell_offsets_[i] = sampler_.cell_offset(a);
        }
    sas_.resize(cols_);
    for (std::uint32_t col = 0; col < cols_; ++col)
        sas_[col] = SenseAmpInstance{sampler_.sa_offset(cell_address(0, col)), false};
    BitlinePair pre{c.electrical.precharge_level(), c.electrical.precharge_level(), true};
    bitlines_.assign(cols_, pre);
}

Address Subarray::cell_address(std::uint32_t row, std::uint32_t col) const
{
    Address a = base_;
    a.row = row;
    a.column = col;
    return a;
}

void Subarray::precharge()
{
    close_row();
    ledger_.charge(cfg_.timing.pre_latency, cfg_.energy.precharge);
}

void Subarray::close_row()
{
    double p = cfg_.electrical.precharge_level();
    for (auto& bl : bitlines_)
        bl = BitlinePair{p, p, true};
    for (auto& sa : sas_)
        sa.enabled = false;
    row_buffer_.reset();
    open_row_.reset();
}

const BitVector& Subarray::activate(std::uint32_t row)
{
    if (!precharged())
        throw SimulationError("ACT to a subarray with an open row");
    if (row >= rows_)
        throw std::out_of_range("row out of range");
    const auto& e = cfg_.electrical;
    const double w = cfg_.variation.uc_pla_sa_weight;
    BitVector bits(cols_);
    for (std::uint32_t col = 0; col < cols_; ++col) {
        auto i = idx(row, col);
        auto& sa = sas_[col];
        charge_share(cells_[i], bitlines_[col], e);
        sa.enabled = true;
        double n = sampler_.noise(cell_address(row, col), trial_);
        bits[col] = static_cast<std::uint8_t>(sense_connected(sa, cell_offsets_[i], w, bitlines_[col], e, n));
        cells_[i].voltage = bitlines_[col].v_bl;  // restore
    }
    ++trial_;
    row_buffer_ = std::move(bits);
    open_row_ = row;
    ledger_.charge(cfg_.timing.act_latency, cfg_.energy.activation);
    return *row_buffer_;
}

void Subarray::write_row(std::uint32_t row, const BitVector& bits)
{
    if (bits.size() != cols_)
        throw SimulationError("write_row: width mismatch");
    for (std::uint32_t col = 0; col < cols_; ++col)
        cells_[idx(row, col)].voltage = bits[col] ? cfg_.electrical.vdd : 0.0;
}

BitVector Subarray::stored_bits(std::uint32_t row) const
{
    BitVector out(cols_);
    double p = cfg_.electrical.precharge_level();
    for (std::uint32_t col = 0; col < cols_; ++col)
        out[col] = cells_[idx(row, col)].voltage > p;
    return out;
}

void Subarray::arm_row(std::uint32_t row)
{
    double p = cfg_.electrical.precharge_level();
    for (std::uint32_t col = 0; col < cols_; ++col)
        cells_[idx(row, col)].voltage = p;
}

BitVector Subarray::sense_disconnected(std::uint32_t noise_row)
{
    if (!precharged())
        throw SimulationError("SA trigger on a subarray with an open row");
    const auto& e = cfg_.electrical;
    BitVector bits(cols_);
    for (std::uint32_t col = 0; col < cols_; ++col) {
        sas_[col].enabled = true;
        double n = sampler_.noise(cell_address(noise_row, col), trial_);
        bits[col] = static_cast<std::uint8_t>(sense(sas_[col], bitlines_[col], e, n));
    }
    ++trial_;
    row_buffer_ = bits;
    return bits;
}

void Subarray::drive_row_buffer(const BitVector& bits, std::optional<std::uint32_t> row_to_restore)
{
    if (bits.size() != cols_)
        throw SimulationError("drive_row_buffer: width mismatch");
    for (std::uint32_t col = 0; col < cols_; ++col)
        drive(bitlines_[col], cfg_.electrical, bits[col] != 0);
    row_buffer_ = bits;
    if (row_to_restore) {
        write_row(*row_to_restore, bits);
        open_row_ = row_to_restore;
    }
}

void Subarray::leak_all(double dt_s, double temperature)
{
    for (std::uint32_t r = 0; r < rows_; ++r)
        for (std::uint32_t col = 0; col < cols_; ++col)
            leak(cells_[idx(r, col)], dt_s, temperature, sampler_.tau(cell_address(r, col)),
                 cfg_.electrical);
}

}  // namespace dpsim
