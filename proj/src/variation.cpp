#include "dpsim/variation.h"

#include <algorithm>
#include <cmath>

namespace dpsim {

VariationSampler::VariationSampler(const DramConfig& c)
    : v_(c.variation), c_cell_(c.electrical.c_cell), offset_sigma_(c.variation.sa_offset_sigma())
{
    s_offset_ = seed_start(ComponentKind::SaOffset);
    s_cell_ = seed_start(ComponentKind::CellOffset);
    s_noise_ = seed_start(ComponentKind::CellNoise);
    s_tau_ = seed_start(ComponentKind::CellTau);
    s_cap_ = seed_start(ComponentKind::CellCap);
    s_age_sa_ = seed_start(ComponentKind::AgingSa);
    s_age_cell_ = seed_start(ComponentKind::AgingCell);
}

static std::uint64_t chain(std::uint64_t start, const Address& a, std::uint64_t trial)
{
    return SeedChain::finish(SeedChain::row_prefix(start, a), a.column, trial);
}

double VariationSampler::sa_offset(const Address& a) const
{
    Address sa = a;
    sa.row = 0;
    double off = v_.sa_offset_bias;
    if (offset_sigma_ > 0.0)
        off += offset_sigma_ * to_normal(chain(s_offset_, sa, 0));
    if (v_.aged && v_.aging_drift_sigma > 0.0)
        off += v_.aging_drift_sigma * to_normal(chain(s_age_sa_, sa, 0));
    return off;
}

double VariationSampler::cell_offset(const Address& a) const
{
    double e = v_.cell_offset_bias;
    if (v_.cell_offset_sigma > 0.0)
        e += v_.cell_offset_sigma * to_normal(chain(s_cell_, a, 0));
    if (v_.aged && v_.aging_drift_sigma > 0.0)
        e += v_.aging_drift_sigma * to_normal(chain(s_age_cell_, a, 0));
    return e;
}

double VariationSampler::noise(const Address& a, std::uint64_t trial) const
{
    if (v_.cell_noise_sigma <= 0.0)
        return 0.0;
    return v_.cell_noise_sigma * to_normal(chain(s_noise_, a, trial));
}

double VariationSampler::tau(const Address& a) const
{
    return v_.tau_median_s * std::exp(v_.tau_log_sigma * to_normal(chain(s_tau_, a, 0)));
}

double VariationSampler::cell_capacitance(const Address& a) const
{
    // Relative spread follows the process variation level; floored well above 0.
    double z = to_normal(chain(s_cap_, a, 0));
    return c_cell_ * std::max(0.5, 1.0 + v_.variation_percent * z);
}

}  // namespace dpsim
