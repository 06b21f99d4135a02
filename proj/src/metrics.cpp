#include "lvseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lvseg {

namespace {

std::pair<long long, long long> overlap_counts(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_size(b)) throw std::invalid_argument("metrics: dimension mismatch");
  long long inter = 0, uni = 0;
  for (size_t i = 0; i < a.bits.size(); ++i) {
    inter += a.bits[i] & b.bits[i];
    uni += a.bits[i] | b.bits[i];
  }
  return {inter, uni};
}

}  // namespace

double dice(const BinaryMask& a, const BinaryMask& b) {
  const auto [inter, uni] = overlap_counts(a, b);
  const long long sum = inter + uni;  // |a| + |b|
  if (sum == 0) return 1.0;
  return 2.0 * inter / sum;
}

double jaccard(const BinaryMask& a, const BinaryMask& b) {
  const auto [inter, uni] = overlap_counts(a, b);
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / uni;
}

ContourPointList extract_contour(const BinaryMask& m) {
  ContourPointList pts;
  static const int dx[] = {0, 0, -1, 1};
  static const int dy[] = {-1, 1, 0, 0};
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!m.get(x, y)) continue;
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (!m.in_bounds(nx, ny) || !m.get(nx, ny)) {
          pts.push_back({x, y});
          break;
        }
      }
    }
  }
  return pts;
}

namespace {

// For each point of `from`, the distance to the nearest point of `to` (mm).
std::vector<double> nearest_distances(const ContourPointList& from, const ContourPointList& to,
                                      PixelSpacing sp) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const ContourPoint& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const ContourPoint& q : to)
      best = std::min(best, std::hypot((p.x - q.x) * sp.sx, (p.y - q.y) * sp.sy));
    out.push_back(best);
  }
  return out;
}

double max_of(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end());
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double d : v) s += d;
  return s / v.size();
}

}  // namespace

double hausdorff(const BinaryMask& a, const BinaryMask& b, PixelSpacing spacing) {
  const ContourPointList ca = extract_contour(a), cb = extract_contour(b);
  if (ca.empty() || cb.empty())
    throw std::invalid_argument("hausdorff: undefined for empty mask");
  return std::max(max_of(nearest_distances(ca, cb, spacing)),
                  max_of(nearest_distances(cb, ca, spacing)));
}

double apd(const BinaryMask& a, const BinaryMask& b, PixelSpacing spacing, ApdMode mode) {
  const ContourPointList ca = extract_contour(a), cb = extract_contour(b);
  if (ca.empty() || cb.empty())
    throw std::invalid_argument("apd: undefined for empty mask");
  const double fwd = mean_of(nearest_distances(ca, cb, spacing));
  if (mode == ApdMode::directed) return fwd;
  return (fwd + mean_of(nearest_distances(cb, ca, spacing))) / 2.0;
}

MetricsReport evaluate_pair(const BinaryMask& a, const BinaryMask& b, PixelSpacing spacing,
                            ApdMode mode) {
  MetricsReport r;
  r.dice = dice(a, b);
  r.jaccard = jaccard(a, b);
  r.n_pairs = 1;
  const bool ae = a.empty(), be = b.empty();
  r.both_empty = ae && be;
  if (ae || be) {
    r.has_distances = false;
    return r;
  }
  r.hausdorff = hausdorff(a, b, spacing);
  r.apd = apd(a, b, spacing, mode);
  return r;
}

MetricsReport aggregate(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: empty report list");
  MetricsReport agg;
  agg.n_pairs = 0;
  int n_dist = 0;
  for (const MetricsReport& r : reports) {
    agg.dice += r.dice * r.n_pairs;
    agg.jaccard += r.jaccard * r.n_pairs;
    agg.n_pairs += r.n_pairs;
    if (r.has_distances) {
      agg.apd += r.apd * r.n_pairs;
      agg.hausdorff += r.hausdorff * r.n_pairs;
      n_dist += r.n_pairs;
    }
  }
  agg.dice /= agg.n_pairs;
  agg.jaccard /= agg.n_pairs;
  if (n_dist > 0) {
    agg.apd /= n_dist;
    agg.hausdorff /= n_dist;
  } else {
    agg.has_distances = false;
  }
  return agg;
}

}  // namespace lvseg
