// lvseg: SDD + circular-Hough left-ventricle segmentation toolkit.
// Subcommands: segment, evaluate, phantom generate|suite, debug-sdd.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "lvseg/histogram.hpp"
#include "lvseg/hough.hpp"
#include "lvseg/io_formats.hpp"
#include "lvseg/metrics.hpp"
#include "lvseg/morphology.hpp"
#include "lvseg/phantom.hpp"
#include "lvseg/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Mirrors warnings/errors to stderr and a machine-readable JSON-lines log.
class RunLog {
 public:
  void open(const fs::path& dir) {
    fs::create_directories(dir);
    out_.open(dir / "run_log.jsonl");
  }
  void event(const std::string& level, const std::string& message) {
    if (level == "error") had_error_ = true;
    json j{{"level", level}, {"message", message}};
    if (out_.is_open()) out_ << j.dump() << "\n";
    if (level != "info") std::cerr << level << ": " << message << "\n";
  }
  bool had_error() const { return had_error_; }

 private:
  std::ofstream out_;
  bool had_error_ = false;
};

std::string stem_of(const fs::path& p) {
  std::string s = p.filename().string();
  // strip .nii.gz / .nii / image extensions
  for (const char* ext : {".gz", ".nii", ".png", ".pgm"}) {
    if (s.size() > std::strlen(ext) &&
        s.compare(s.size() - std::strlen(ext), std::string::npos, ext) == 0)
      s.resize(s.size() - std::strlen(ext));
  }
  return s;
}

bool is_nifti(const fs::path& p) {
  const std::string s = p.string();
  return s.ends_with(".nii") || s.ends_with(".nii.gz");
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = e.path().extension().string();
    if (ext == ".pgm" || ext == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

json circle_json(const lvseg::Circle& c) {
  return json{{"cx", c.cx}, {"cy", c.cy}, {"r", c.r}, {"score", c.score}};
}

json slice_provenance(const lvseg::SliceResult& r) {
  json j;
  j["roi"] = {{"x", r.roi.x}, {"y", r.roi.y}, {"w", r.roi.w}, {"h", r.roi.h}};
  j["t_low"] = r.thresholds.t_low;
  j["t_high"] = r.thresholds.t_high;
  j["peak_bin"] = r.thresholds.peak_bin;
  j["circle"] = r.circle ? circle_json(*r.circle) : json(nullptr);
  json flags = json::array();
  if (r.has_flag(lvseg::flag_boundary_fallback)) flags.push_back("boundary_fallback");
  if (r.has_flag(lvseg::flag_no_circle_fallback)) flags.push_back("no_circle_fallback");
  if (r.has_flag(lvseg::flag_empty_result)) flags.push_back("empty_result");
  j["flags"] = flags;
  return j;
}

void dump_intermediates(const lvseg::SliceResult& r, const fs::path& dir,
                        const std::string& stem) {
  lvseg::write_mask(r.myocardium_mask, (dir / (stem + "_SM.pgm")).string());
  lvseg::write_mask(r.lv_raw_mask, (dir / (stem + "_SLV.pgm")).string());
  lvseg::write_mask(r.localized_mask, (dir / (stem + "_VL.pgm")).string());
  lvseg::BinaryMask cd(r.final_mask.width, r.final_mask.height);
  if (r.circle) {
    cd = lvseg::dilate(lvseg::rasterize_disk(*r.circle, cd.width, cd.height),
                       lvseg::StructuringElement::cross(), 3);
  }
  lvseg::write_mask(cd, (dir / (stem + "_CD.pgm")).string());
  std::ofstream js(dir / (stem + ".json"));
  js << slice_provenance(r).dump(2) << "\n";
}

std::optional<lvseg::RoiBox> parse_roi(const std::string& s) {
  if (s.empty()) return std::nullopt;
  lvseg::RoiBox box;
  if (std::sscanf(s.c_str(), "%d,%d,%d,%d", &box.x, &box.y, &box.w, &box.h) != 4)
    throw CLI::ValidationError("--roi expects x,y,w,h");
  return box;
}

// ---------------- segment ----------------

int cmd_segment(const std::string& input, const std::string& output,
                const std::string& config_path, int frame, int jobs, bool dump,
                const std::string& roi_str) {
  RunLog log;
  log.open(output);
  try {
    lvseg::RunConfig cfg;
    if (!config_path.empty()) cfg = lvseg::load_config(config_path);
    cfg.pipeline.jobs = jobs;
    const std::optional<lvseg::RoiBox> roi_override = parse_roi(roi_str);

    lvseg::CaseInput in;
    in.case_id = stem_of(input);
    in.frame_id = std::to_string(frame);

    if (is_nifti(input)) {
      const lvseg::Volume vol = lvseg::load_volume(input);
      if (!vol.spacing_from_header)
        log.event("warning", "no pixel spacing in header, defaulting to 1.0 mm/px");
      if (frame < 0 || frame >= vol.nt) {
        log.event("error", "frame " + std::to_string(frame) + " out of range (nt=" +
                               std::to_string(vol.nt) + ")");
        return 1;
      }
      for (int z = 0; z < vol.nz; ++z) {
        lvseg::SlicePosition sp;
        sp.target = vol.slice(z, frame);
        for (int t = 0; t < vol.nt; ++t) sp.cycle_frames.push_back(vol.slice(z, t));
        sp.roi_override = roi_override;
        in.slices.push_back(std::move(sp));
      }
    } else if (fs::is_directory(input)) {
      for (const fs::path& p : list_images(input)) {
        lvseg::SlicePosition sp;
        sp.target = lvseg::load_grayscale(p.string());
        sp.roi_override = roi_override;
        in.slices.push_back(std::move(sp));
      }
      if (in.slices.empty()) {
        log.event("error", "no .pgm/.png images in " + input);
        return 1;
      }
    } else {
      log.event("error", "input not found or unsupported: " + input);
      return 1;
    }

    const lvseg::CaseResult res = lvseg::segment_case(in, cfg.pipeline);
    const fs::path out_dir(output);
    for (size_t i = 0; i < res.slices.size(); ++i) {
      char stem[64];
      std::snprintf(stem, sizeof(stem), "%s_slice%03zu", in.case_id.c_str(), i);
      const lvseg::SliceResult& r = res.slices[i];
      lvseg::write_mask(r.final_mask, (out_dir / (std::string(stem) + "_mask.png")).string());
      lvseg::write_overlay(in.slices[i].target, r.final_mask,
                           (out_dir / (std::string(stem) + "_overlay.png")).string());
      if (dump) dump_intermediates(r, out_dir, stem);
      if (r.has_flag(lvseg::flag_empty_result))
        log.event("warning", std::string(stem) + ": empty result");
      if (r.has_flag(lvseg::flag_no_circle_fallback))
        log.event("warning", std::string(stem) + ": no CHT circle, used fallback");
    }
    log.event("info", "segmented " + std::to_string(res.slices.size()) + " slices");
  } catch (const std::exception& e) {
    log.event("error", e.what());
    return 1;
  }
  return log.had_error() ? 1 : 0;
}

// ---------------- evaluate ----------------

int cmd_evaluate(const std::string& pred, const std::string& gt, const std::string& output,
                 const std::string& config_path, const std::string& cls, double sx, double sy,
                 const std::string& manifest) {
  RunLog log;
  log.open(output);
  try {
    lvseg::RunConfig cfg;
    if (!config_path.empty()) cfg = lvseg::load_config(config_path);
    lvseg::PixelSpacing spacing{sx, sy};

    std::vector<std::pair<lvseg::BinaryMask, lvseg::BinaryMask>> pairs;
    std::vector<std::string> names;

    if (is_nifti(gt)) {
      const lvseg::Volume gtv = lvseg::load_volume(gt);
      if (gtv.spacing_from_header && sx == 0) spacing = gtv.spacing;
      if (!is_nifti(pred)) {
        log.event("error", "NIfTI ground truth requires NIfTI predictions");
        return 1;
      }
      const lvseg::Volume pv = lvseg::load_volume(pred);
      if (pv.nz != gtv.nz || pv.nx != gtv.nx || pv.ny != gtv.ny) {
        log.event("error", "prediction/ground-truth volume shapes differ");
        return 1;
      }
      for (int z = 0; z < gtv.nz; ++z) {
        bool unmapped = false;
        lvseg::BinaryMask g =
            lvseg::extract_class_mask(gtv.slice(z), cfg.label_map, cls, &unmapped);
        if (unmapped)
          log.event("warning", "slice " + std::to_string(z) + ": unmapped label values");
        lvseg::BinaryMask p(pv.nx, pv.ny);
        const lvseg::GrayImage& ps = pv.slice(z);
        for (size_t i = 0; i < p.bits.size(); ++i) p.bits[i] = ps.pixels[i] > 0.5f ? 1 : 0;
        pairs.emplace_back(std::move(p), std::move(g));
        names.push_back(stem_of(pred) + "_slice" + std::to_string(z));
      }
    } else {
      // directory pairing by filename stem (or explicit manifest)
      std::vector<std::pair<fs::path, fs::path>> file_pairs;
      if (!manifest.empty()) {
        std::ifstream mf(manifest);
        if (!mf) {
          log.event("error", "cannot open manifest " + manifest);
          return 1;
        }
        std::string line;
        while (std::getline(mf, line)) {
          if (line.empty()) continue;
          const auto comma = line.find(',');
          if (comma == std::string::npos) {
            log.event("error", "manifest line without comma: " + line);
            return 1;
          }
          file_pairs.emplace_back(line.substr(0, comma), line.substr(comma + 1));
        }
      } else {
        std::map<std::string, fs::path> pred_by_stem, gt_by_stem;
        for (const fs::path& p : list_images(pred)) pred_by_stem[stem_of(p)] = p;
        for (const fs::path& p : list_images(gt)) gt_by_stem[stem_of(p)] = p;
        std::vector<std::string> orphans;
        for (const auto& [s, p] : pred_by_stem)
          if (!gt_by_stem.count(s)) orphans.push_back("pred:" + s);
        for (const auto& [s, p] : gt_by_stem)
          if (!pred_by_stem.count(s)) orphans.push_back("gt:" + s);
        if (!orphans.empty()) {
          std::string msg = "unpaired files:";
          for (const std::string& o : orphans) msg += " " + o;
          log.event("error", msg);
          return 1;
        }
        for (const auto& [s, p] : pred_by_stem) file_pairs.emplace_back(p, gt_by_stem.at(s));
      }
      for (const auto& [pp, gp] : file_pairs) {
        pairs.emplace_back(lvseg::load_mask(pp.string()), lvseg::load_mask(gp.string()));
        names.push_back(stem_of(pp));
      }
    }

    if (pairs.empty()) {
      log.event("error", "nothing to evaluate");
      return 1;
    }
    if (spacing.sx <= 0) spacing = {1.0, 1.0};

    std::vector<lvseg::NamedReport> reports;
    for (size_t i = 0; i < pairs.size(); ++i) {
      lvseg::MetricsReport r =
          lvseg::evaluate_pair(pairs[i].first, pairs[i].second, spacing, cfg.apd_mode);
      if (r.both_empty) log.event("warning", names[i] + ": both masks empty, overlap scored 1");
      reports.push_back({names[i], r});
    }
    const fs::path out_dir(output);
    lvseg::write_report(reports, (out_dir / "per_slice.csv").string(),
                        (out_dir / "aggregate.json").string());
    log.event("info", "evaluated " + std::to_string(reports.size()) + " pairs");
  } catch (const std::exception& e) {
    log.event("error", e.what());
    return 1;
  }
  return log.had_error() ? 1 : 0;
}

// ---------------- phantom ----------------

json spec_json(const lvseg::PhantomSpec& s) {
  json j;
  j["image_size"] = s.image_size;
  j["cx"] = s.cx;
  j["cy"] = s.cy;
  j["pool_radius"] = s.pool_radius;
  j["wall_thickness"] = s.wall_thickness;
  j["background_mean"] = s.background_mean;
  j["wall_mean"] = s.wall_mean;
  j["pool_mean"] = s.pool_mean;
  j["background_spread"] = s.background_spread;
  j["pool_spread"] = s.pool_spread;
  j["noise_sigma"] = s.noise_sigma;
  j["seed"] = s.seed;
  j["papillary_count"] = s.papillary.size();
  j["has_rv"] = s.rv.has_value();
  return j;
}

void write_phantom_files(const lvseg::PhantomSlice& ph, const fs::path& dir,
                         const std::string& stem) {
  lvseg::write_grayscale(ph.image, (dir / (stem + "_image.pgm")).string());
  lvseg::write_mask(ph.truth.pool, (dir / (stem + "_truth_pool.pgm")).string());
  lvseg::write_mask(ph.truth.wall, (dir / (stem + "_truth_wall.pgm")).string());
  lvseg::write_mask(ph.truth.pool_with_papillary_hull,
                    (dir / (stem + "_truth_hull.pgm")).string());
}

int cmd_phantom_generate(const std::string& output, const lvseg::PhantomSpec& spec) {
  RunLog log;
  log.open(output);
  try {
    const lvseg::PhantomSlice ph = lvseg::generate_phantom(spec);
    write_phantom_files(ph, output, "phantom");
    std::ofstream js(fs::path(output) / "manifest.json");
    js << spec_json(spec).dump(2) << "\n";
    log.event("info", "wrote phantom to " + output);
  } catch (const std::exception& e) {
    log.event("error", e.what());
    return 1;
  }
  return 0;
}

int cmd_phantom_suite(const std::string& output, int n, uint32_t seed) {
  RunLog log;
  log.open(output);
  try {
    const std::vector<lvseg::PhantomSlice> suite =
        lvseg::generate_suite(n, lvseg::PhantomSpec{}, lvseg::SuiteRanges{}, seed);
    json manifest = json::array();
    for (size_t i = 0; i < suite.size(); ++i) {
      char stem[32];
      std::snprintf(stem, sizeof(stem), "phantom_%03zu", i);
      write_phantom_files(suite[i], output, stem);
      json j = spec_json(suite[i].spec);
      j["stem"] = stem;
      manifest.push_back(j);
    }
    std::ofstream js(fs::path(output) / "manifest.json");
    js << manifest.dump(2) << "\n";
    log.event("info", "wrote " + std::to_string(n) + " phantoms to " + output);
  } catch (const std::exception& e) {
    log.event("error", e.what());
    return 1;
  }
  return 0;
}

// ---------------- debug-sdd ----------------

int cmd_debug_sdd(const std::string& input, const std::string& output,
                  const std::string& config_path, const std::string& roi_str) {
  RunLog log;
  log.open(output);
  try {
    lvseg::RunConfig cfg;
    if (!config_path.empty()) cfg = lvseg::load_config(config_path);
    lvseg::GrayImage img = lvseg::load_grayscale(input);
    if (const auto roi = parse_roi(roi_str)) {
      lvseg::GrayImage crop(roi->w, roi->h);
      for (int y = 0; y < roi->h; ++y)
        for (int x = 0; x < roi->w; ++x) crop.at(x, y) = img.at(roi->x + x, roi->y + y);
      img = std::move(crop);
    }
    const auto [mn, mx] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    if (*mx > *mn)
      for (float& v : img.pixels) v = (v - *mn) / (*mx - *mn) * 255.0f;

    const lvseg::Histogram raw = lvseg::build_histogram(img.pixels, cfg.pipeline.bins);
    const lvseg::Histogram smooth = lvseg::smooth_histogram(raw, cfg.pipeline.bandwidth);
    const lvseg::SddCurve sdd = lvseg::compute_sdd(smooth, cfg.pipeline.window_n);

    std::ofstream csv(fs::path(output) / "sdd.csv");
    csv << "bin_index,intensity,raw_count,smoothed_count,sdd_value\n";
    char line[160];
    for (int i = 0; i < raw.bin_count(); ++i) {
      std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.9f\n", i, raw.bin_center(i),
                    raw.counts[static_cast<size_t>(i)], smooth.counts[static_cast<size_t>(i)],
                    sdd.values[static_cast<size_t>(i)]);
      csv << line;
    }

    json j;
    try {
      const lvseg::ThresholdPair t = lvseg::select_double_threshold(sdd, smooth);
      j["t_low"] = t.t_low;
      j["t_high"] = t.t_high;
      j["peak_bin"] = t.peak_bin;
      json flags = json::array();
      if (t.low_boundary_fallback) flags.push_back("low_boundary_fallback");
      if (t.high_boundary_fallback) flags.push_back("high_boundary_fallback");
      j["fallback_flags"] = flags;
    } catch (const std::exception& e) {
      j["error"] = e.what();
      log.event("warning", e.what());
    }
    std::ofstream js(fs::path(output) / "thresholds.json");
    js << j.dump() << "\n";
    log.event("info", "wrote SDD dump to " + output);
  } catch (const std::exception& e) {
    log.event("error", e.what());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDD + circular-Hough left-ventricle segmentation toolkit"};
  app.require_subcommand(1);

  std::string input, output, config_path, roi_str, cls = "lv", manifest;
  std::string pred, gt;
  int frame = 0, jobs = 1, n = 50;
  uint32_t seed = 1;
  double sx = 0.0, sy = 0.0;
  bool dump = false;

  auto* seg = app.add_subcommand("segment", "segment a case (NIfTI volume or image directory)");
  seg->add_option("--input", input, "input volume (.nii/.nii.gz) or image directory")->required();
  seg->add_option("--output", output, "output directory")->required();
  seg->add_option("--config", config_path, "JSON config file");
  seg->add_option("--frame", frame, "frame index for 4-D volumes (default 0)");
  seg->add_option("--jobs", jobs, "slice-level parallelism");
  seg->add_option("--roi", roi_str, "override ROI as x,y,w,h");
  seg->add_flag("--dump-intermediates", dump, "write S_M/S_LV/C_D/V_L and provenance JSON");

  auto* ev = app.add_subcommand("evaluate", "compare predictions with ground truth");
  ev->add_option("--pred", pred, "prediction masks: directory or .nii")->required();
  ev->add_option("--gt", gt, "ground truth: directory or label .nii")->required();
  ev->add_option("--output", output, "output directory")->required();
  ev->add_option("--config", config_path, "JSON config file");
  ev->add_option("--class", cls, "ground-truth class name (default lv)");
  ev->add_option("--spacing-x", sx, "pixel spacing mm/px (default: header or 1.0)");
  ev->add_option("--spacing-y", sy, "pixel spacing mm/px");
  ev->add_option("--manifest", manifest, "explicit pred,gt pairing CSV");

  auto* ph = app.add_subcommand("phantom", "synthetic phantom generation");
  lvseg::PhantomSpec spec;
  int papillary_count = 0;
  bool with_rv = false;
  auto* gen = ph->add_subcommand("generate", "write one phantom");
  gen->add_option("--output", output, "output directory")->required();
  gen->add_option("--size", spec.image_size, "image side, px");
  gen->add_option("--pool-radius", spec.pool_radius, "LV cavity radius, px");
  gen->add_option("--wall-thickness", spec.wall_thickness, "myocardium thickness, px");
  gen->add_option("--noise-sigma", spec.noise_sigma, "Gaussian noise sigma");
  gen->add_option("--background-spread", spec.background_spread, "background intensity span");
  gen->add_option("--pool-spread", spec.pool_spread, "pool intensity span");
  gen->add_option("--papillary", papillary_count, "number of papillary blobs");
  gen->add_flag("--rv", with_rv, "attach an RV crescent");
  gen->add_option("--seed", seed, "noise seed");

  auto* suite = ph->add_subcommand("suite", "write a randomized phantom suite");
  suite->add_option("--output", output, "output directory")->required();
  suite->add_option("--n", n, "number of phantoms (default 50)");
  suite->add_option("--seed", seed, "master seed");

  auto* dbg = app.add_subcommand("debug-sdd", "dump histogram/SDD curve and thresholds");
  dbg->add_option("--input", input, "grayscale image (.pgm/.png)")->required();
  dbg->add_option("--output", output, "output directory")->required();
  dbg->add_option("--config", config_path, "JSON config file");
  dbg->add_option("--roi", roi_str, "restrict to ROI x,y,w,h");

  CLI11_PARSE(app, argc, argv);

  if (seg->parsed()) return cmd_segment(input, output, config_path, frame, jobs, dump, roi_str);
  if (ev->parsed()) return cmd_evaluate(pred, gt, output, config_path, cls, sx, sy, manifest);
  if (ph->parsed()) {
    if (gen->parsed()) {
      spec.seed = seed;
      for (int i = 0; i < papillary_count; ++i)
        spec.papillary.push_back({i * 2.1, -3.5, 3.0});
      if (with_rv) spec.rv = lvseg::RvCrescent{};
      return cmd_phantom_generate(output, spec);
    }
    if (suite->parsed()) return cmd_phantom_suite(output, n, seed);
    std::cerr << "phantom requires a generate or suite subcommand\n";
    return 1;
  }
  if (dbg->parsed()) return cmd_debug_sdd(input, output, config_path, roi_str);
  return 1;
}
