#ifndef DPSIM_CIRCUIT_H
#define DPSIM_CIRCUIT_H

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpsim/address.h"
#include "dpsim/config.h"
#include "dpsim/variation.h"

namespace dpsim {

class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using BitVector = std::vector<std::uint8_t>;  // one 0/1 value per entry

struct CellState {
    double voltage = 0.0;
    double capacitance = 22e-15;
};

struct BitlinePair {
    double v_bl = 0.5;
    double v_blbar = 0.5;
    bool precharged = true;
};

struct SenseAmpInstance {
    double offset = 0.0;
    bool enabled = false;
};

enum class Signal { Wordline, SenseAmp, PrechargeLogic };
enum class Action { Raise, Lower, Trigger };
enum class CommandKind { ACT, PRE, UE_SA, UE_SA_WRITEBACK, UC_PLA, D_TRAN };

std::string to_string(Signal s);
std::string to_string(Action a);
std::string to_string(CommandKind k);
CommandKind command_from_string(const std::string& s);

struct WaveEvent {
    Signal signal;
    Action action;
    double time_ns;
};

struct CommandWaveform {
    CommandKind kind;
    std::vector<WaveEvent> events;
};

CommandWaveform waveform_of(CommandKind kind, const TimingParams& t = TimingParams{});
std::string waveform_csv(const CommandWaveform& w);  // signal,action,time_ns
bool waveform_valid(const CommandWaveform& w);

// Returns delta; bitline and cell settle at the shared voltage.
double charge_share(CellState& cell, BitlinePair& bl, const ElectricalParams& e);

// SA decision with no cell attached (bit = delta + offset + noise > 0).
// Drives the bitline pair to the rails.
int sense(const SenseAmpInstance& sa, BitlinePair& bl, const ElectricalParams& e, double noise);

// SA decision with a cell on the bitline. The cell's own variation enters
// next to a weighted share of the SA offset.
int sense_connected(const SenseAmpInstance& sa, double cell_offset, double sa_weight,
                    BitlinePair& bl, const ElectricalParams& e, double noise);

// Retention decay toward vdd/2.
void leak(CellState& cell, double dt_s, double temperature, double tau_s, const ElectricalParams& e);
double effective_tau(double tau_s, double temperature);

struct Ledger {
    double latency_ns = 0.0;
    double energy_nj = 0.0;
    std::uint64_t commands = 0;

    void charge(double lat, double en)
    {
        latency_ns += lat;
        energy_nj += en;
        ++commands;
    }
};

// One subarray. Rows and columns may be trimmed below the geometry bounds to
// keep tests small; energies stay per full row.
class Subarray {
  public:
    Subarray(const DramConfig& c, const Address& base, std::uint32_t rows = 0, std::uint32_t cols = 0);

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    const DramConfig& config() const { return cfg_; }
    const VariationSampler& sampler() const { return sampler_; }
    Address cell_address(std::uint32_t row, std::uint32_t col) const;

    CellState& cell(std::uint32_t row, std::uint32_t col) { return cells_[idx(row, col)]; }
    const CellState& cell(std::uint32_t row, std::uint32_t col) const { return cells_[idx(row, col)]; }
    const std::vector<SenseAmpInstance>& sense_amps() const { return sas_; }
    const std::vector<BitlinePair>& bitlines() const { return bitlines_; }
    const std::optional<BitVector>& row_buffer() const { return row_buffer_; }
    std::optional<std::uint32_t> open_row() const { return open_row_; }
    bool precharged() const { return !row_buffer_.has_value(); }

    // Noise index of the next sensing operation; each one consumes a trial.
    std::uint64_t trial() const { return trial_; }
    void set_trial(std::uint64_t t) { trial_ = t; }

    void precharge();
    void close_row();  // precharge state change without a ledger entry
    const BitVector& activate(std::uint32_t row);

    // Raw state access used by primitives and tests.
    void write_row(std::uint32_t row, const BitVector& bits);  // full-rail store
    BitVector stored_bits(std::uint32_t row) const;            // voltage > vdd/2
    void arm_row(std::uint32_t row);                           // cells to vdd/2
    BitVector sense_disconnected(std::uint32_t noise_row = 0); // SAs fire at delta 0
    void drive_row_buffer(const BitVector& bits, std::optional<std::uint32_t> row_to_restore);
    void leak_all(double dt_s, double temperature);

    Ledger& ledger() { return ledger_; }
    const Ledger& ledger() const { return ledger_; }

  private:
    std::size_t idx(std::uint32_t row, std::uint32_t col) const
    {
        if (row >= rows_ || col >= cols_)
            throw std::out_of_range("subarray cell out of range");
        return std::size_t(row) * cols_ + col;
    }

    DramConfig cfg_;
    VariationSampler sampler_;
    Address base_;
    std::uint32_t rows_, cols_;
    std::vector<CellState> cells_;
    std::vector<double> cell_offsets_;
    std::vector<SenseAmpInstance> sas_;
    std::vector<BitlinePair> bitlines_;
    std::optional<BitVector> row_buffer_;
    std::optional<std::uint32_t> open_row_;
    std::uint64_t trial_ = 0;
    Ledger ledger_;
};

}  // namespace dpsim

#endif
