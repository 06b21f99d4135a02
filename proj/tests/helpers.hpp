#ifndef LVSEG_TEST_HELPERS_HPP
#define LVSEG_TEST_HELPERS_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lvseg/image.hpp"

namespace testutil {

// Mask from a row of strings; '#' = foreground.
inline lvseg::BinaryMask mask_from(const std::vector<std::string>& rows) {
  lvseg::BinaryMask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) m.set(x, y, rows[static_cast<size_t>(y)][static_cast<size_t>(x)] == '#');
  return m;
}

inline bool subset_of(const lvseg::BinaryMask& a, const lvseg::BinaryMask& b) {
  for (size_t i = 0; i < a.bits.size(); ++i)
    if (a.bits[i] && !b.bits[i]) return false;
  return true;
}

// Deterministic gaussian sampler independent of the library's generator.
class Gauss {
 public:
  explicit Gauss(uint32_t seed) : rng_(seed) {}
  double operator()(double mean, double sigma) {
    double u1;
    do {
      u1 = (rng_() + 0.5) / 4294967296.0;
    } while (u1 <= 0.0);
    const double u2 = (rng_() + 0.5) / 4294967296.0;
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
  }
  uint32_t raw() { return rng_(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * ((rng_() + 0.5) / 4294967296.0); }

 private:
  std::mt19937 rng_;
};

}  // namespace testutil

#endif
