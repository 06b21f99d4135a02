#include "lvseg/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lvseg {

double Histogram::total() const {
  double s = 0.0;
  for (double c : counts) s += c;
  return s;
}

double Histogram::bin_center(int i) const {
  const double w = (intensity_max - intensity_min) / bin_count();
  return intensity_min + (i + 0.5) * w;
}

int Histogram::bin_of(double v) const {
  if (intensity_max <= intensity_min) return 0;
  const int n = bin_count();
  int i = static_cast<int>((v - intensity_min) / (intensity_max - intensity_min) * n);
  return std::clamp(i, 0, n - 1);
}

Histogram build_histogram(std::span<const float> roi_pixels, int bin_count) {
  if (roi_pixels.empty()) throw std::invalid_argument("build_histogram: empty ROI");
  if (bin_count < 8) throw std::invalid_argument("build_histogram: bin_count < 8");

  const auto [mn, mx] = std::minmax_element(roi_pixels.begin(), roi_pixels.end());
  Histogram h;
  h.counts.assign(bin_count, 0.0);
  h.intensity_min = *mn;
  h.intensity_max = *mx;
  if (h.intensity_max <= h.intensity_min) {
    // degenerate constant input: widen the range so bin_of stays well defined
    h.intensity_max = h.intensity_min + 1.0;
    h.counts[0] = static_cast<double>(roi_pixels.size());
    return h;
  }
  const double scale = bin_count / (h.intensity_max - h.intensity_min);
  for (float v : roi_pixels) {
    int i = static_cast<int>((v - h.intensity_min) * scale);
    i = std::clamp(i, 0, bin_count - 1);
    h.counts[static_cast<size_t>(i)] += 1.0;
  }
  return h;
}

Histogram smooth_histogram(const Histogram& h, int bandwidth) {
  const int n = h.bin_count();
  if (bandwidth < 1 || bandwidth >= (n + 1) / 2)
    throw std::invalid_argument("smooth_histogram: bandwidth out of range");

  // Direct DFT; n is at most a few hundred here.
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  // mean term
  double mean = h.total() / n;
  for (double& v : out) v = mean;
  // full band (bandwidth == n/2 - 1 on even n) additionally keeps Nyquist so
  // the filter is the identity
  const bool keep_nyquist = (n % 2 == 0) && (bandwidth == n / 2 - 1);
  const int kmax = keep_nyquist ? n / 2 : bandwidth;
  for (int k = 1; k <= kmax; ++k) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ang = two_pi * k * j / n;
      a += h.counts[static_cast<size_t>(j)] * std::cos(ang);
      b += h.counts[static_cast<size_t>(j)] * std::sin(ang);
    }
    const double norm = (2 * k == n) ? 1.0 / n : 2.0 / n;
    for (int j = 0; j < n; ++j) {
      const double ang = two_pi * k * j / n;
      out[static_cast<size_t>(j)] += norm * (a * std::cos(ang) + b * std::sin(ang));
    }
  }
  Histogram s;
  s.intensity_min = h.intensity_min;
  s.intensity_max = h.intensity_max;
  s.counts.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) s.counts[static_cast<size_t>(j)] = std::max(0.0, out[static_cast<size_t>(j)]);
  return s;
}

namespace {

// Least-squares slope of y over consecutive integer abscissae [i0, i0+n).
double window_slope(const std::vector<double>& y, int i0, int n) {
  const double xbar = (n - 1) / 2.0;
  double ybar = 0.0;
  for (int j = 0; j < n; ++j) ybar += y[static_cast<size_t>(i0 + j)];
  ybar /= n;
  double num = 0.0;
  for (int j = 0; j < n; ++j) num += (j - xbar) * (y[static_cast<size_t>(i0 + j)] - ybar);
  const double den = n * (static_cast<double>(n) * n - 1) / 12.0;
  return num / den;
}

}  // namespace

SddCurve compute_sdd(const Histogram& h, int window_n) {
  const int n = h.bin_count();
  if (window_n < 3) throw std::invalid_argument("compute_sdd: window_n < 3");
  if (n <= 2 * window_n) throw std::invalid_argument("compute_sdd: bin_count <= 2*window_n");

  SddCurve c;
  c.window_n = window_n;
  c.first = window_n;
  c.last = n - window_n;
  c.values.assign(static_cast<size_t>(n), 0.0);
  for (int i = c.first; i < c.last; ++i) {
    const double a_left = window_slope(h.counts, i - window_n + 1, window_n);
    const double a_right = window_slope(h.counts, i, window_n);
    c.values[static_cast<size_t>(i)] = a_left - a_right;
  }
  return c;
}

namespace {

// Plateau-aware strict local minima of v over [first, last); each plateau
// contributes its leftmost index. Boundary runs do not count.
std::vector<int> local_minima(const std::vector<double>& v, int first, int last) {
  std::vector<int> mins;
  int i = first;
  while (i < last) {
    int j = i;
    while (j + 1 < last && v[static_cast<size_t>(j + 1)] == v[static_cast<size_t>(i)]) ++j;
    const bool left_ok = i > first && v[static_cast<size_t>(i - 1)] > v[static_cast<size_t>(i)];
    const bool right_ok = j < last - 1 && v[static_cast<size_t>(j + 1)] > v[static_cast<size_t>(j)];
    if (left_ok && right_ok) mins.push_back(i);
    i = j + 1;
  }
  return mins;
}

}  // namespace

ThresholdPair select_double_threshold(const SddCurve& sdd, const Histogram& h) {
  const auto& v = sdd.values;
  int peak = sdd.first;
  for (int i = sdd.first; i < sdd.last; ++i)
    if (v[static_cast<size_t>(i)] > v[static_cast<size_t>(peak)]) peak = i;
  if (v[static_cast<size_t>(peak)] <= 0.0)
    throw std::runtime_error("select_double_threshold: no SDD peak");

  const std::vector<int> mins = local_minima(v, sdd.first, sdd.last);

  ThresholdPair t;
  t.peak_bin = peak;
  int lo = -1, hi = -1;
  for (int m : mins) {
    if (m < peak) lo = m;  // mins are ascending: keep the nearest below
    if (m > peak) {
      hi = m;
      break;
    }
  }
  if (lo < 0) {
    lo = sdd.first;
    t.low_boundary_fallback = true;
  }
  if (hi < 0) {
    hi = sdd.last - 1;
    t.high_boundary_fallback = true;
  }
  t.bin_low = lo;
  t.bin_high = hi;
  t.t_low = h.bin_center(lo);
  t.t_high = h.bin_center(hi);
  return t;
}

}  // namespace lvseg
