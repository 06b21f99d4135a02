#include "lvseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "lvseg/morphology.hpp"

namespace lvseg {

namespace {

// Box-Muller on top of mt19937 so phantom pixels do not depend on the
// standard library's normal_distribution implementation.
class GaussianGen {
 public:
  explicit GaussianGen(uint32_t seed) : rng_(seed) {}
  double next() {
    if (have_) {
      have_ = false;
      return cached_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform() { return (rng_() + 0.5) * (1.0 / 4294967296.0); }
  std::mt19937 rng_;
  bool have_ = false;
  double cached_ = 0.0;
};

double angular_distance(double a, double b) {
  double d = std::fmod(a - b, 2.0 * std::numbers::pi);
  if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
  if (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
  return std::fabs(d);
}

}  // namespace

PhantomSlice generate_phantom(const PhantomSpec& spec) {
  const int n = spec.image_size;
  const double outer = spec.pool_radius + spec.wall_thickness;
  if (n <= 0 || spec.pool_radius <= 0 || spec.wall_thickness <= 0)
    throw std::invalid_argument("generate_phantom: non-positive geometry");
  if (outer >= n / 2.0) throw std::invalid_argument("generate_phantom: heart does not fit image");
  if (spec.noise_sigma < 0) throw std::invalid_argument("generate_phantom: negative noise_sigma");
  if (spec.noise_sigma > 0) {
    // region means must stay pairwise separated by 4 sigma
    const double gap = 4.0 * spec.noise_sigma;
    if (std::fabs(spec.background_mean - spec.wall_mean) < gap ||
        std::fabs(spec.pool_mean - spec.wall_mean) < gap ||
        std::fabs(spec.pool_mean - spec.background_mean) < gap)
      throw std::invalid_argument("generate_phantom: intensity modes not separated from noise");
  }

  PhantomSlice out;
  out.spec = spec;
  out.image = GrayImage(n, n);
  out.truth.pool = BinaryMask(n, n);
  out.truth.wall = BinaryMask(n, n);

  GaussianGen noise(spec.seed);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double dx = x - spec.cx, dy = y - spec.cy;
      const double d = std::hypot(dx, dy);
      const double ang = std::atan2(dy, dx);

      bool in_pool = d <= spec.pool_radius;
      bool in_wall = !in_pool && d <= outer;
      bool in_papillary = false;
      for (const PapillaryBlob& p : spec.papillary) {
        const double px = spec.cx + (spec.pool_radius + p.radius_offset) * std::cos(p.angle);
        const double py = spec.cy + (spec.pool_radius + p.radius_offset) * std::sin(p.angle);
        if (std::hypot(x - px, y - py) <= p.blob_radius) {
          in_papillary = true;
          break;
        }
      }
      bool in_rv = false;
      if (spec.rv && !in_pool && !in_wall) {
        if (d <= outer + spec.rv->thickness && angular_distance(ang, spec.rv->angle) <= spec.rv->half_angle)
          in_rv = true;
      }
      bool in_wedge = false;
      if (spec.dark_wedge && !in_pool && !in_wall && !in_rv) {
        if (d <= outer + spec.dark_wedge->thickness &&
            angular_distance(ang, spec.dark_wedge->angle) <= spec.dark_wedge->half_angle)
          in_wedge = true;
      }

      double v;
      if (in_pool && !in_papillary) {
        // smooth sinusoid mixture: wide pool span with a gentle-tailed
        // histogram (no hard intensity edge for the slope fits to latch onto)
        const double g = (std::sin(2.0 * std::numbers::pi * x / 19.0 + 0.5) +
                          std::sin(2.0 * std::numbers::pi * y / 31.0 + 1.5) +
                          std::sin(2.0 * std::numbers::pi * (x - y) / 41.0 + 2.5)) / 3.0;
        v = spec.pool_mean + spec.pool_spread * g;
        out.truth.pool.set(x, y, true);
      } else if (in_pool || in_wall || in_papillary) {
        v = spec.wall_mean;
        if (in_wall && !in_papillary) out.truth.wall.set(x, y, true);
      } else if (in_rv) {
        v = spec.pool_mean;
      } else if (in_wedge) {
        // radial ramp: near black at the wall, `top` at the outer rim
        v = spec.dark_wedge->top * (d - outer) / spec.dark_wedge->thickness;
      } else {
        // smooth sinusoid mixture: broad, bell-shaped intensity histogram
        // whose shape survives arbitrary crops and the heart's occlusion
        const double g = (std::sin(2.0 * std::numbers::pi * x / 23.0 + 1.0) +
                          std::sin(2.0 * std::numbers::pi * y / 29.0 + 2.0) +
                          std::sin(2.0 * std::numbers::pi * (x + y) / 37.0 + 3.0)) / 3.0;
        v = spec.background_mean + spec.background_spread * g;
      }
      if (spec.noise_sigma > 0) v += spec.noise_sigma * noise.next();
      out.image.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 255.0));
    }
  }
  out.truth.pool_with_papillary_hull = convex_hull_mask(out.truth.pool);
  return out;
}

std::vector<PhantomSlice> generate_suite(int n, const PhantomSpec& base, const SuiteRanges& ranges,
                                         uint32_t master_seed) {
  if (n < 1) throw std::invalid_argument("generate_suite: n < 1");
  std::mt19937 rng(master_seed);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * ((rng() + 0.5) * (1.0 / 4294967296.0));
  };

  std::vector<PhantomSlice> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    PhantomSpec s = base;
    s.pool_radius = uni(ranges.pool_radius_min, ranges.pool_radius_max);
    s.wall_thickness = uni(ranges.wall_thickness_min, ranges.wall_thickness_max);
    s.noise_sigma = uni(ranges.noise_sigma_min, ranges.noise_sigma_max);
    s.background_spread = uni(ranges.background_spread_min, ranges.background_spread_max);
    s.pool_spread = uni(ranges.pool_spread_min, ranges.pool_spread_max);
    s.cx = base.cx + uni(-ranges.center_jitter, ranges.center_jitter);
    s.cy = base.cy + uni(-ranges.center_jitter, ranges.center_jitter);
    const int n_pap = ranges.papillary_min +
                      static_cast<int>(rng() % static_cast<uint32_t>(
                                           ranges.papillary_max - ranges.papillary_min + 1));
    s.papillary.clear();
    for (int p = 0; p < n_pap; ++p) {
      PapillaryBlob blob;
      blob.angle = uni(0.0, 2.0 * 3.14159265358979323846);
      blob.blob_radius = uni(2.0, std::min(4.0, s.pool_radius / 4.0));
      // attached to the inner wall edge, protruding into the pool
      blob.radius_offset = -blob.blob_radius - uni(0.0, 1.0);
      s.papillary.push_back(blob);
    }
    DarkWedge wedge;
    wedge.angle = uni(0.0, 2.0 * 3.14159265358979323846);
    wedge.half_angle = uni(ranges.wedge_half_angle_min, ranges.wedge_half_angle_max);
    s.dark_wedge = wedge;
    s.seed = master_seed ^ (0x9e3779b9u * static_cast<uint32_t>(i + 1));
    out.push_back(generate_phantom(s));
  }
  return out;
}

}  // namespace lvseg
