#include "seqscale/rng.hpp"

#include <cmath>
#include <numbers>

namespace seqscale::rng {

double Stream::gaussian(std::uint64_t counter) const {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    // 1 - u1 lies in (0, 1], keeping the log finite.
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace seqscale::rng
