#include "erdm/rng.hpp"

#include <cmath>
#include <limits>

namespace erdm {

double SeededRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SeededRng::below(std::uint64_t n) {
    if (n == 0) {
        return 0;
    }
    constexpr auto max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x = 0;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double SeededRng::exponential() { return -std::log1p(-uniform()); }

}  // namespace erdm
