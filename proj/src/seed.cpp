#include "dpsim/seed.h"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace dpsim {

double normal_quantile(double u)
{
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double to_normal(std::uint64_t h)
{
    return normal_quantile(to_uniform(h));
}

}  // namespace dpsim
