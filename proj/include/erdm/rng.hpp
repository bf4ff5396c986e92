#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace erdm {

/// Deterministic generator for restarts, folds and synthetic data. The raw
/// output of std::mt19937_64 is fully specified; every derived draw is
/// computed here rather than through the implementation-defined std
/// distributions, so results match across standard libraries.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    double uniform();                      // [0, 1)
    std::uint64_t below(std::uint64_t n);  // [0, n)
    bool chance(double p) { return uniform() < p; }

    /// Dirichlet(1, ..., 1) over the active coordinates, zero elsewhere.
    template <std::size_t N>
    std::array<double, N> dirichlet_ones(const std::array<bool, N>& active);

    template <class Container>
    void shuffle(Container& c) {
        for (std::size_t i = c.size(); i > 1; --i) {
            std::swap(c[i - 1], c[static_cast<std::size_t>(below(i))]);
        }
    }

    template <class Container>
    const auto& pick(const Container& c) {
        return c[static_cast<std::size_t>(below(c.size()))];
    }

  private:
    double exponential();

    std::mt19937_64 engine_;
};

template <std::size_t N>
std::array<double, N> SeededRng::dirichlet_ones(const std::array<bool, N>& active) {
    std::array<double, N> v{};
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (active[i]) {
            v[i] = exponential();
            sum += v[i];
        }
    }
    if (sum > 0.0) {
        for (auto& x : v) {
            x /= sum;
        }
    }
    return v;
}

}  // namespace erdm
