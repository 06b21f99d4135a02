#ifndef LVSEG_HISTOGRAM_HPP
#define LVSEG_HISTOGRAM_HPP

#include <span>
#include <vector>

namespace lvseg {

/// Intensity histogram with a uniform bin layout over [intensity_min, intensity_max].
struct Histogram {
  std::vector<double> counts;
  double intensity_min = 0.0;
  double intensity_max = 0.0;

  int bin_count() const { return static_cast<int>(counts.size()); }
  double total() const;

  /// Intensity at the center of bin i.
  double bin_center(int i) const;
  /// Bin index containing intensity v (clamped to the valid range).
  int bin_of(double v) const;
};

/// Slope difference curve over histogram bins. values[i] is meaningful only
/// for i in [first, last); entries outside that range are zero.
struct SddCurve {
  std::vector<double> values;
  int window_n = 0;
  int first = 0;  // inclusive
  int last = 0;   // exclusive
};

struct ThresholdPair {
  double t_low = 0.0;
  double t_high = 0.0;
  int bin_low = 0;
  int bin_high = 0;
  int peak_bin = 0;
  bool low_boundary_fallback = false;
  bool high_boundary_fallback = false;

  bool any_fallback() const { return low_boundary_fallback || high_boundary_fallback; }
};

/// Histogram of raw samples with bins spanning [min, max] of the input.
/// All-equal input puts everything into the single containing bin.
/// Throws on an empty sample set ("empty ROI") or bin_count < 8.
Histogram build_histogram(std::span<const float> roi_pixels, int bin_count);

/// Ideal low-pass in the discrete-frequency domain: keeps the mean term plus
/// the `bandwidth` lowest frequency pairs, clamps the result at zero.
/// Requires 1 <= bandwidth < bin_count/2.
Histogram smooth_histogram(const Histogram& h, int bandwidth);

/// Slope difference at each interior bin: least-squares line slope over the
/// window_n points ending at i minus the slope over the window_n points
/// starting at i. Histogram peaks map to maxima, valleys to minima.
/// Requires bin_count > 2*window_n and window_n >= 3.
SddCurve compute_sdd(const Histogram& h, int window_n);

/// Double threshold around the largest SDD peak: nearest local minima on
/// either side become T1/T2 (as bin-center intensities of h). Missing minima
/// fall back to the defined-range boundary with a flag. Throws "no SDD peak"
/// when the curve has no positive value.
ThresholdPair select_double_threshold(const SddCurve& sdd, const Histogram& h);

}  // namespace lvseg

#endif
