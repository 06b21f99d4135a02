#include "lvseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "lvseg/morphology.hpp"

namespace lvseg {

namespace {

// Otsu threshold on a 256-bin histogram of values in [lo, hi].
double otsu_threshold(const std::vector<double>& values, double lo, double hi) {
  constexpr int kBins = 256;
  std::vector<double> hist(kBins, 0.0);
  const double scale = (hi > lo) ? kBins / (hi - lo) : 0.0;
  for (double v : values) {
    int i = static_cast<int>((v - lo) * scale);
    hist[static_cast<size_t>(std::clamp(i, 0, kBins - 1))] += 1.0;
  }
  double total = 0.0, sum = 0.0;
  for (int i = 0; i < kBins; ++i) {
    total += hist[static_cast<size_t>(i)];
    sum += i * hist[static_cast<size_t>(i)];
  }
  double w0 = 0.0, sum0 = 0.0, best_var = -1.0;
  int best_bin = 0;
  for (int i = 0; i < kBins - 1; ++i) {
    w0 += hist[static_cast<size_t>(i)];
    sum0 += i * hist[static_cast<size_t>(i)];
    const double w1 = total - w0;
    if (w0 <= 0.0 || w1 <= 0.0) continue;
    const double mu0 = sum0 / w0, mu1 = (sum - sum0) / w1;
    const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_bin = i;
    }
  }
  return lo + (best_bin + 1) * (hi - lo) / kBins;
}

RoiBox centered_box(int width, int height, double fraction, double cx, double cy) {
  int side = std::max(1, static_cast<int>(std::lround(fraction * std::min(width, height))));
  side = std::min(side, std::min(width, height));
  int x = static_cast<int>(std::lround(cx - side / 2.0));
  int y = static_cast<int>(std::lround(cy - side / 2.0));
  x = std::clamp(x, 0, width - side);
  y = std::clamp(y, 0, height - side);
  return RoiBox{x, y, side, side};
}

}  // namespace

RoiBox generate_roi(const std::vector<GrayImage>& frames, double fallback_fraction) {
  if (frames.empty()) throw std::invalid_argument("generate_roi: no frames");
  const int w = frames[0].width, h = frames[0].height;
  for (const GrayImage& f : frames)
    if (f.width != w || f.height != h)
      throw std::invalid_argument("generate_roi: frame dimensions differ");

  if (frames.size() < 2) return centered_box(w, h, fallback_fraction, w / 2.0, h / 2.0);

  // per-pixel temporal standard deviation
  std::vector<double> sd(static_cast<size_t>(w) * h, 0.0);
  const double nf = static_cast<double>(frames.size());
  for (size_t i = 0; i < sd.size(); ++i) {
    double mean = 0.0;
    for (const GrayImage& f : frames) mean += f.pixels[i];
    mean /= nf;
    double var = 0.0;
    for (const GrayImage& f : frames) {
      const double d = f.pixels[i] - mean;
      var += d * d;
    }
    sd[i] = std::sqrt(var / nf);
  }
  const auto [mn, mx] = std::minmax_element(sd.begin(), sd.end());
  if (*mx <= *mn) return centered_box(w, h, fallback_fraction, w / 2.0, h / 2.0);

  const double thr = otsu_threshold(sd, *mn, *mx);
  BinaryMask moving(w, h);
  for (size_t i = 0; i < sd.size(); ++i) moving.bits[i] = sd[i] > thr ? 1 : 0;
  const BinaryMask blob = largest_component(moving);
  if (blob.empty()) return centered_box(w, h, fallback_fraction, w / 2.0, h / 2.0);

  double sx = 0.0, sy = 0.0, n = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (blob.get(x, y)) {
        sx += x;
        sy += y;
        n += 1.0;
      }
  return centered_box(w, h, fallback_fraction, sx / n, sy / n);
}

BinaryMask segment_myocardium(const GrayImage& roi_image, const ThresholdPair& t) {
  BinaryMask out(roi_image.width, roi_image.height);
  for (size_t i = 0; i < roi_image.pixels.size(); ++i) {
    const float v = roi_image.pixels[i];
    out.bits[i] = (v > t.t_low && v < t.t_high) ? 1 : 0;
  }
  return out;
}

BinaryMask segment_lv_raw(const GrayImage& roi_image, const ThresholdPair& t) {
  BinaryMask out(roi_image.width, roi_image.height);
  for (size_t i = 0; i < roi_image.pixels.size(); ++i) {
    const float v = roi_image.pixels[i];
    out.bits[i] = (v < t.t_low || v > t.t_high) ? 1 : 0;
  }
  return out;
}

BinaryMask localize_lv(const BinaryMask& lv_raw, const Circle& circle) {
  const BinaryMask disk = rasterize_disk(circle, lv_raw.width, lv_raw.height);
  const BinaryMask dilated = dilate(disk, StructuringElement::cross(), 3);
  return intersect(lv_raw, dilated);
}

BinaryMask postprocess(const BinaryMask& v_l, long long min_area) {
  return convex_hull_mask(largest_component(remove_small_blobs(v_l, min_area)));
}

namespace {

GrayImage crop(const GrayImage& image, const RoiBox& roi) {
  GrayImage out(roi.w, roi.h);
  for (int y = 0; y < roi.h; ++y)
    for (int x = 0; x < roi.w; ++x) out.at(x, y) = image.at(roi.x + x, roi.y + y);
  return out;
}

BinaryMask embed(const BinaryMask& m, const RoiBox& roi, int width, int height) {
  BinaryMask out(width, height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.get(x, y)) out.set(roi.x + x, roi.y + y, true);
  return out;
}

}  // namespace

SliceResult segment_slice(const GrayImage& image, const RoiBox& roi, const PipelineConfig& config) {
  if (roi.w <= 0 || roi.h <= 0 || roi.x < 0 || roi.y < 0 || roi.x + roi.w > image.width ||
      roi.y + roi.h > image.height)
    throw std::invalid_argument("segment_slice: ROI out of bounds");

  SliceResult res;
  res.roi = roi;
  res.myocardium_mask = BinaryMask(image.width, image.height);
  res.lv_raw_mask = BinaryMask(image.width, image.height);
  res.localized_mask = BinaryMask(image.width, image.height);
  res.final_mask = BinaryMask(image.width, image.height);

  GrayImage r = crop(image, roi);
  const auto [mn, mx] = std::minmax_element(r.pixels.begin(), r.pixels.end());
  if (*mx <= *mn) {
    res.flags |= flag_empty_result;  // flat slice: nothing to segment
    return res;
  }
  const float lo = *mn, span = *mx - *mn;
  for (float& v : r.pixels) v = (v - lo) / span * 255.0f;

  ThresholdPair t;
  try {
    const Histogram raw = build_histogram(r.pixels, config.bins);
    const Histogram smooth = smooth_histogram(raw, config.bandwidth);
    const SddCurve sdd = compute_sdd(smooth, config.window_n);
    t = select_double_threshold(sdd, smooth);
  } catch (const std::exception&) {
    res.flags |= flag_empty_result;
    return res;
  }
  res.thresholds = t;
  if (t.any_fallback()) res.flags |= flag_boundary_fallback;

  const BinaryMask s_m = segment_myocardium(r, t);
  const BinaryMask s_lv = segment_lv_raw(r, t);

  const int side = std::min(roi.w, roi.h);
  const int r_min = std::max(1, static_cast<int>(std::lround(config.r_min_frac * side)));
  const int r_max =
      std::min(side / 2, std::max(r_min + 1, static_cast<int>(std::lround(config.r_max_frac * side))));

  std::vector<Circle> circles;
  if (r_min < r_max) circles = detect_circles(s_m, r_min, r_max, config.min_score_fraction);

  BinaryMask v_l(roi.w, roi.h);
  if (!circles.empty()) {
    const Circle c = select_largest(circles);
    v_l = localize_lv(s_lv, c);
    res.circle = Circle{c.cx + roi.x, c.cy + roi.y, c.r, c.score};
  } else {
    // no CHT support: keep the largest S_LV component inside the ROI's
    // central half as the localization stand-in
    res.flags |= flag_no_circle_fallback;
    BinaryMask center(roi.w, roi.h);
    for (int y = roi.h / 4; y < roi.h - roi.h / 4; ++y)
      for (int x = roi.w / 4; x < roi.w - roi.w / 4; ++x)
        center.set(x, y, s_lv.get(x, y));
    v_l = largest_component(center);
  }

  const long long min_area =
      static_cast<long long>(std::lround(config.min_area_frac * roi.w * roi.h));
  const BinaryMask final_roi = postprocess(v_l, min_area);
  if (final_roi.empty()) res.flags |= flag_empty_result;

  res.myocardium_mask = embed(s_m, roi, image.width, image.height);
  res.lv_raw_mask = embed(s_lv, roi, image.width, image.height);
  res.localized_mask = embed(v_l, roi, image.width, image.height);
  res.final_mask = embed(final_roi, roi, image.width, image.height);
  return res;
}

CaseResult segment_case(const CaseInput& input, const PipelineConfig& config) {
  if (input.slices.empty()) throw std::invalid_argument("segment_case: no slices");
  CaseResult out;
  out.case_id = input.case_id;
  out.frame_id = input.frame_id;
  out.slices.resize(input.slices.size());

  auto run_one = [&](size_t i) {
    const SlicePosition& sp = input.slices[i];
    RoiBox roi;
    if (sp.roi_override) {
      roi = *sp.roi_override;
    } else if (!sp.cycle_frames.empty()) {
      roi = generate_roi(sp.cycle_frames, config.fallback_fraction);
    } else {
      roi = generate_roi({sp.target}, config.fallback_fraction);
    }
    try {
      out.slices[i] = segment_slice(sp.target, roi, config);
    } catch (const std::exception&) {
      // one bad slice never aborts the case
      SliceResult bad;
      bad.roi = roi;
      bad.final_mask = BinaryMask(sp.target.width, sp.target.height);
      bad.myocardium_mask = bad.final_mask;
      bad.lv_raw_mask = bad.final_mask;
      bad.localized_mask = bad.final_mask;
      bad.flags = flag_empty_result;
      out.slices[i] = std::move(bad);
    }
  };

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1 || input.slices.size() < 2) {
    for (size_t i = 0; i < input.slices.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    const int nthreads =
        static_cast<int>(std::min<size_t>(static_cast<size_t>(jobs), input.slices.size()));
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < input.slices.size(); i = next.fetch_add(1))
          run_one(i);
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return out;
}

}  // namespace lvseg
