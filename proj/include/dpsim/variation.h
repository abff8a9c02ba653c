#ifndef DPSIM_VARIATION_H
#define DPSIM_VARIATION_H

#include <cstdint>

#include "dpsim/address.h"
#include "dpsim/config.h"
#include "dpsim/seed.h"

namespace dpsim {

// Fabrication and evaluation randomness of one device. Every draw is a pure
// function of (master_seed, kind, address, trial).
class VariationSampler {
  public:
    explicit VariationSampler(const DramConfig& c);

    // SA offsets depend on the bitline only; the row field is ignored.
    double sa_offset(const Address& a) const;
    double cell_offset(const Address& a) const;
    double noise(const Address& a, std::uint64_t trial) const;
    double tau(const Address& a) const;  // seconds, at 30C
    double cell_capacitance(const Address& a) const;

    double offset_sigma() const { return offset_sigma_; }
    double noise_sigma() const { return v_.cell_noise_sigma; }
    const VariationModel& model() const { return v_; }

    // z-scores without scaling, for fast paths that cache the chain prefix
    std::uint64_t seed_start(ComponentKind k) const { return SeedChain::start(v_.master_seed, k); }

  private:
    VariationModel v_;
    double c_cell_;
    double offset_sigma_;
    std::uint64_t s_offset_, s_cell_, s_noise_, s_tau_, s_cap_, s_age_sa_, s_age_cell_;
};

}  // namespace dpsim

#endif
