#include "lvseg/io_formats.hpp"

#include <png.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace lvseg {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

[[noreturn]] void fail(const std::string& path, const std::string& what, long offset = -1) {
  std::ostringstream os;
  os << path << ": " << what;
  if (offset >= 0) os << " (byte offset " << offset << ")";
  throw std::runtime_error(os.str());
}

// ---------- PGM ----------

struct PgmReader {
  std::ifstream in;
  std::string path;

  explicit PgmReader(const std::string& p) : in(p, std::ios::binary), path(p) {
    if (!in) fail(p, "cannot open file");
  }
  long offset() { return static_cast<long>(in.tellg()); }

  // next token, skipping whitespace and '#' comments
  std::string token() {
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {
        }
      } else if (!std::isspace(c)) {
        break;
      }
    }
    if (c == EOF) fail(path, "unexpected end of header", offset());
    std::string t;
    t.push_back(static_cast<char>(c));
    while ((c = in.get()) != EOF && !std::isspace(c)) t.push_back(static_cast<char>(c));
    return t;
  }

  int int_token(const char* what) {
    const long off = offset();
    const std::string t = token();
    try {
      size_t pos = 0;
      const int v = std::stoi(t, &pos);
      if (pos != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail(path, std::string("malformed ") + what + " '" + t + "'", off);
    }
  }
};

GrayImage load_pgm(const std::string& path) {
  PgmReader r(path);
  const std::string magic = r.token();
  if (magic != "P2" && magic != "P5") fail(path, "not a PGM file (magic '" + magic + "')", 0);
  const int w = r.int_token("width");
  const int h = r.int_token("height");
  const int maxval = r.int_token("maxval");
  if (w <= 0 || h <= 0) fail(path, "non-positive dimensions", r.offset());
  if (maxval <= 0 || maxval > 65535) fail(path, "maxval out of range", r.offset());

  GrayImage img(w, h);
  if (magic == "P2") {
    for (size_t i = 0; i < img.pixels.size(); ++i)
      img.pixels[i] = static_cast<float>(r.int_token("sample"));
  } else {
    // token() already consumed the single whitespace after maxval
    const int bpp = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(img.pixels.size() * bpp);
    r.in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    const auto got = r.in.gcount();
    if (got != static_cast<std::streamsize>(buf.size()))
      fail(path, "truncated pixel data, missing " +
                     std::to_string(static_cast<long long>(buf.size()) - got) + " bytes");
    for (size_t i = 0; i < img.pixels.size(); ++i) {
      img.pixels[i] = bpp == 2 ? static_cast<float>(buf[2 * i] * 256 + buf[2 * i + 1])
                               : static_cast<float>(buf[i]);
    }
  }
  return img;
}

void write_pgm8(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> buf(img.pixels.size());
  for (size_t i = 0; i < buf.size(); ++i)
    buf[i] = static_cast<unsigned char>(std::clamp(std::lround(img.pixels[i]), 0L, 255L));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(path, "write failed");
}

// ---------- PNG ----------

GrayImage load_png(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) fail(path, "cannot open file");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    std::fclose(fp);
    fail(path, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    fail(path, "malformed PNG");
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color & PNG_COLOR_MASK_PALETTE) png_set_palette_to_rgb(png);
  if (color & PNG_COLOR_MASK_COLOR || color & PNG_COLOR_MASK_PALETTE) png_set_rgb_to_gray(png, 1, -1, -1);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    depth = 8;
  }
  if (depth == 16) png_set_swap(png);  // little-endian 16-bit samples
  png_read_update_info(png, info);

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  const int bpp = depth == 16 ? 2 : 1;
  std::vector<unsigned char> row(static_cast<size_t>(w) * bpp);
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (png_uint_32 x = 0; x < w; ++x) {
      img.at(static_cast<int>(x), static_cast<int>(y)) =
          bpp == 2 ? static_cast<float>(row[2 * x] | (row[2 * x + 1] << 8))
                   : static_cast<float>(row[x]);
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return img;
}

void write_png(const std::string& path, int w, int h, int channels,
               const std::vector<unsigned char>& data) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) fail(path, "cannot open for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    std::fclose(fp);
    fail(path, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    fail(path, "PNG write failed");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y)
    png_write_row(png, const_cast<unsigned char*>(data.data()) +
                           static_cast<size_t>(y) * w * channels);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

void write_png_gray8(const GrayImage& img, const std::string& path) {
  std::vector<unsigned char> buf(img.pixels.size());
  for (size_t i = 0; i < buf.size(); ++i)
    buf[i] = static_cast<unsigned char>(std::clamp(std::lround(img.pixels[i]), 0L, 255L));
  write_png(path, img.width, img.height, 1, buf);
}

}  // namespace

GrayImage load_grayscale(const std::string& path) {
  if (ends_with(path, ".pgm") || ends_with(path, ".PGM")) return load_pgm(path);
  if (ends_with(path, ".png") || ends_with(path, ".PNG")) return load_png(path);
  fail(path, "unsupported image extension (expected .pgm or .png)");
}

void write_mask(const BinaryMask& mask, const std::string& path) {
  GrayImage img(mask.width, mask.height);
  for (size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255.f : 0.f;
  write_grayscale(img, path);
}

BinaryMask load_mask(const std::string& path) {
  const GrayImage img = load_grayscale(path);
  BinaryMask m(img.width, img.height);
  for (size_t i = 0; i < m.bits.size(); ++i) m.bits[i] = img.pixels[i] > 127.f ? 1 : 0;
  return m;
}

void write_grayscale(const GrayImage& image, const std::string& path) {
  if (ends_with(path, ".pgm") || ends_with(path, ".PGM")) return write_pgm8(image, path);
  if (ends_with(path, ".png") || ends_with(path, ".PNG")) return write_png_gray8(image, path);
  fail(path, "unsupported image extension (expected .pgm or .png)");
}

void write_overlay(const GrayImage& image, const BinaryMask& contour_of, const std::string& path) {
  if (image.width != contour_of.width || image.height != contour_of.height)
    throw std::invalid_argument("write_overlay: dimension mismatch");
  const ContourPointList contour = extract_contour(contour_of);
  std::vector<unsigned char> rgb(static_cast<size_t>(image.width) * image.height * 3);
  for (size_t i = 0; i < image.pixels.size(); ++i) {
    const auto g = static_cast<unsigned char>(std::clamp(std::lround(image.pixels[i]), 0L, 255L));
    rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = g;
  }
  for (const ContourPoint& p : contour) {
    const size_t i = (static_cast<size_t>(p.y) * image.width + p.x) * 3;
    rgb[i] = 255;
    rgb[i + 1] = 0;
    rgb[i + 2] = 0;
  }
  write_png(path, image.width, image.height, 3, rgb);
}

// ---------- NIfTI-1 ----------

namespace {

#pragma pack(push, 1)
struct NiftiHeader {
  int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  int32_t extents;
  int16_t session_error;
  char regular;
  char dim_info;
  int16_t dim[8];
  float intent_p1, intent_p2, intent_p3;
  int16_t intent_code;
  int16_t datatype;
  int16_t bitpix;
  int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max, cal_min;
  float slice_duration;
  float toffset;
  int32_t glmax, glmin;
  char descrip[80];
  char aux_file[24];
  int16_t qform_code, sform_code;
  float quatern_b, quatern_c, quatern_d;
  float qoffset_x, qoffset_y, qoffset_z;
  float srow_x[4], srow_y[4], srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(NiftiHeader) == 348, "NIfTI-1 header must be 348 bytes");

int bytes_per_sample(int datatype) {
  switch (datatype) {
    case 2:
      return 1;  // uint8
    case 4:
    case 512:
      return 2;  // int16 / uint16
    case 16:
      return 4;  // float32
    default:
      return 0;
  }
}

}  // namespace

Volume load_volume(const std::string& path) {
  gzFile gz = gzopen(path.c_str(), "rb");
  if (!gz) fail(path, "cannot open file");
  NiftiHeader hdr{};
  if (gzread(gz, &hdr, sizeof(hdr)) != static_cast<int>(sizeof(hdr))) {
    gzclose(gz);
    fail(path, "truncated NIfTI header");
  }
  if (hdr.sizeof_hdr != 348 || std::strncmp(hdr.magic, "n+1", 3) != 0) {
    gzclose(gz);
    fail(path, "wrong NIfTI magic (expected single-file 'n+1')");
  }
  const int ndim = hdr.dim[0];
  if (ndim < 2 || ndim > 4) {
    gzclose(gz);
    fail(path, "unsupported dim[0]=" + std::to_string(ndim));
  }
  const int bps = bytes_per_sample(hdr.datatype);
  if (bps == 0) {
    gzclose(gz);
    fail(path, "unsupported datatype " + std::to_string(hdr.datatype));
  }

  Volume v;
  v.nx = hdr.dim[1];
  v.ny = hdr.dim[2];
  v.nz = ndim >= 3 ? std::max<int>(1, hdr.dim[3]) : 1;
  v.nt = ndim >= 4 ? std::max<int>(1, hdr.dim[4]) : 1;
  if (v.nx <= 0 || v.ny <= 0) {
    gzclose(gz);
    fail(path, "non-positive dimensions");
  }
  if (hdr.pixdim[1] > 0 && hdr.pixdim[2] > 0) {
    v.spacing = {hdr.pixdim[1], hdr.pixdim[2]};
  } else {
    v.spacing = {1.0, 1.0};
    v.spacing_from_header = false;
  }
  const double slope = hdr.scl_slope == 0.f ? 1.0 : hdr.scl_slope;
  const double inter = hdr.scl_inter;

  // skip any header extension up to vox_offset
  const long skip = static_cast<long>(hdr.vox_offset) - static_cast<long>(sizeof(hdr));
  if (skip > 0) gzseek(gz, skip, SEEK_CUR);

  const size_t nsamples =
      static_cast<size_t>(v.nx) * v.ny * static_cast<size_t>(v.nz) * v.nt;
  std::vector<unsigned char> raw(nsamples * bps);
  if (gzread(gz, raw.data(), static_cast<unsigned>(raw.size())) !=
      static_cast<int>(raw.size())) {
    gzclose(gz);
    fail(path, "truncated NIfTI voxel data");
  }
  gzclose(gz);

  v.slices.assign(static_cast<size_t>(v.nz) * v.nt, GrayImage(v.nx, v.ny));
  size_t s = 0;
  for (int t = 0; t < v.nt; ++t) {
    for (int z = 0; z < v.nz; ++z) {
      GrayImage& img = v.slice(z, t);
      for (int y = 0; y < v.ny; ++y) {
        for (int x = 0; x < v.nx; ++x, ++s) {
          double raw_v = 0.0;
          const unsigned char* p = raw.data() + s * bps;
          switch (hdr.datatype) {
            case 2:
              raw_v = *p;
              break;
            case 4: {
              int16_t iv;
              std::memcpy(&iv, p, 2);
              raw_v = iv;
              break;
            }
            case 512: {
              uint16_t uv;
              std::memcpy(&uv, p, 2);
              raw_v = uv;
              break;
            }
            case 16: {
              float fv;
              std::memcpy(&fv, p, 4);
              raw_v = fv;
              break;
            }
          }
          img.at(x, y) = static_cast<float>(slope * raw_v + inter);
        }
      }
    }
  }
  return v;
}

void save_volume(const std::string& path, const Volume& v, int datatype, double scl_slope,
                 double scl_inter) {
  const int bps = bytes_per_sample(datatype);
  if (bps == 0) throw std::invalid_argument("save_volume: unsupported datatype");
  if (scl_slope == 0.0) throw std::invalid_argument("save_volume: zero scl_slope");
  if (v.slices.size() != static_cast<size_t>(v.nz) * v.nt)
    throw std::invalid_argument("save_volume: slice count mismatch");

  NiftiHeader hdr{};
  hdr.sizeof_hdr = 348;
  hdr.dim[0] = static_cast<int16_t>(v.nt > 1 ? 4 : 3);
  hdr.dim[1] = static_cast<int16_t>(v.nx);
  hdr.dim[2] = static_cast<int16_t>(v.ny);
  hdr.dim[3] = static_cast<int16_t>(v.nz);
  hdr.dim[4] = static_cast<int16_t>(v.nt);
  for (int i = 5; i < 8; ++i) hdr.dim[i] = 1;
  hdr.datatype = static_cast<int16_t>(datatype);
  hdr.bitpix = static_cast<int16_t>(bps * 8);
  hdr.pixdim[0] = 1.f;
  hdr.pixdim[1] = static_cast<float>(v.spacing.sx);
  hdr.pixdim[2] = static_cast<float>(v.spacing.sy);
  hdr.pixdim[3] = 1.f;
  hdr.pixdim[4] = 1.f;
  hdr.vox_offset = 352.f;
  hdr.scl_slope = static_cast<float>(scl_slope);
  hdr.scl_inter = static_cast<float>(scl_inter);
  std::memcpy(hdr.magic, "n+1", 4);

  const bool gzip = ends_with(path, ".gz");
  auto write_all = [&](const void* data, size_t n, gzFile gz, std::ofstream* out) {
    if (gz) {
      if (gzwrite(gz, data, static_cast<unsigned>(n)) != static_cast<int>(n))
        fail(path, "write failed");
    } else {
      out->write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }
  };

  gzFile gz = nullptr;
  std::ofstream out;
  if (gzip) {
    gz = gzopen(path.c_str(), "wb");
    if (!gz) fail(path, "cannot open for writing");
  } else {
    out.open(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
  }

  write_all(&hdr, sizeof(hdr), gz, &out);
  const char pad[4] = {0, 0, 0, 0};
  write_all(pad, 4, gz, &out);

  std::vector<unsigned char> buf;
  for (int t = 0; t < v.nt; ++t) {
    for (int z = 0; z < v.nz; ++z) {
      const GrayImage& img = v.slice(z, t);
      if (img.width != v.nx || img.height != v.ny)
        throw std::invalid_argument("save_volume: slice dimension mismatch");
      buf.assign(img.pixels.size() * bps, 0);
      for (size_t i = 0; i < img.pixels.size(); ++i) {
        const double stored = (img.pixels[i] - scl_inter) / scl_slope;
        unsigned char* p = buf.data() + i * bps;
        switch (datatype) {
          case 2:
            *p = static_cast<unsigned char>(std::clamp(std::lround(stored), 0L, 255L));
            break;
          case 4: {
            const auto iv = static_cast<int16_t>(std::clamp(std::lround(stored), -32768L, 32767L));
            std::memcpy(p, &iv, 2);
            break;
          }
          case 512: {
            const auto uv = static_cast<uint16_t>(std::clamp(std::lround(stored), 0L, 65535L));
            std::memcpy(p, &uv, 2);
            break;
          }
          case 16: {
            const auto fv = static_cast<float>(stored);
            std::memcpy(p, &fv, 4);
            break;
          }
        }
      }
      write_all(buf.data(), buf.size(), gz, &out);
    }
  }
  if (gz) {
    gzclose(gz);
  } else if (!out) {
    fail(path, "write failed");
  }
}

// ---------- label maps ----------

LabelMap LabelMap::acdc_default() {
  LabelMap m;
  m.classes = {{0, "background"}, {1, "rv"}, {2, "myocardium"}, {3, "lv"}};
  return m;
}

int LabelMap::label_for(const std::string& cls) const {
  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  const std::string want = lower(cls);
  for (const auto& [label, name] : classes)
    if (lower(name) == want) return label;
  throw std::invalid_argument("LabelMap: class '" + cls + "' absent from map");
}

BinaryMask extract_class_mask(const GrayImage& labels, const LabelMap& map,
                              const std::string& cls, bool* unmapped_seen) {
  const int target = map.label_for(cls);
  BinaryMask out(labels.width, labels.height);
  bool unmapped = false;
  for (size_t i = 0; i < labels.pixels.size(); ++i) {
    const int l = static_cast<int>(std::lround(labels.pixels[i]));
    if (!map.classes.count(l)) unmapped = true;
    out.bits[i] = l == target ? 1 : 0;
  }
  if (unmapped_seen) *unmapped_seen = unmapped;
  return out;
}

// ---------- config ----------

RunConfig parse_config_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
  RunConfig cfg;
  try {
  for (const auto& [key, val] : j.items()) {
    if (key == "bins") {
      cfg.pipeline.bins = val.get<int>();
    } else if (key == "bandwidth") {
      cfg.pipeline.bandwidth = val.get<int>();
    } else if (key == "window_n") {
      cfg.pipeline.window_n = val.get<int>();
    } else if (key == "r_min_frac") {
      cfg.pipeline.r_min_frac = val.get<double>();
    } else if (key == "r_max_frac") {
      cfg.pipeline.r_max_frac = val.get<double>();
    } else if (key == "min_score_fraction") {
      cfg.pipeline.min_score_fraction = val.get<double>();
    } else if (key == "min_area_frac") {
      cfg.pipeline.min_area_frac = val.get<double>();
    } else if (key == "fallback_fraction") {
      cfg.pipeline.fallback_fraction = val.get<double>();
    } else if (key == "apd_mode") {
      const std::string m = val.get<std::string>();
      if (m == "symmetric")
        cfg.apd_mode = ApdMode::symmetric;
      else if (m == "directed")
        cfg.apd_mode = ApdMode::directed;
      else
        throw std::invalid_argument("config: apd_mode must be 'symmetric' or 'directed'");
    } else if (key == "label_map") {
      cfg.label_map.classes.clear();
      for (const auto& [lv, name] : val.items())
        cfg.label_map.classes[std::stoi(lv)] = name.get<std::string>();
      if (cfg.label_map.classes.empty())
        throw std::invalid_argument("config: label_map must be non-empty");
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (cfg.pipeline.bins < 8 || cfg.pipeline.window_n < 3 ||
      cfg.pipeline.bins <= 2 * cfg.pipeline.window_n ||
      cfg.pipeline.bandwidth < 1 || cfg.pipeline.bandwidth >= (cfg.pipeline.bins + 1) / 2)
    throw std::invalid_argument("config: bins/bandwidth/window_n out of range");
  if (cfg.pipeline.r_min_frac <= 0 || cfg.pipeline.r_min_frac >= cfg.pipeline.r_max_frac ||
      cfg.pipeline.r_max_frac > 0.5)
    throw std::invalid_argument("config: radius fractions out of range");
  if (cfg.pipeline.fallback_fraction <= 0 || cfg.pipeline.fallback_fraction > 1.0)
    throw std::invalid_argument("config: fallback_fraction out of range");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

// ---------- reports ----------

void write_report(const std::vector<NamedReport>& per_slice, const std::string& csv_path,
                  const std::string& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) fail(csv_path, "cannot open for writing");
  csv << "name,dice,jaccard,apd_mm,hausdorff_mm,both_empty,has_distances\n";
  std::vector<MetricsReport> all;
  char line[256];
  for (const NamedReport& r : per_slice) {
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f,%.6f,%d,%d\n", r.name.c_str(),
                  r.report.dice, r.report.jaccard, r.report.apd, r.report.hausdorff,
                  r.report.both_empty ? 1 : 0, r.report.has_distances ? 1 : 0);
    csv << line;
    all.push_back(r.report);
  }
  csv.close();

  const MetricsReport agg = aggregate(all);
  nlohmann::json j;
  j["dice"] = agg.dice;
  j["jaccard"] = agg.jaccard;
  j["apd_mm"] = agg.apd;
  j["hausdorff_mm"] = agg.hausdorff;
  j["n_pairs"] = agg.n_pairs;
  std::ofstream js(json_path);
  if (!js) fail(json_path, "cannot open for writing");
  js << j.dump(2) << "\n";
}

}  // namespace lvseg
