#include "xsda/raster/geotiff.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

namespace xsda::raster {

namespace {

// TIFF tag ids used by this subset.
enum : uint16_t {
  kTagWidth = 256,
  kTagLength = 257,
  kTagBitsPerSample = 258,
  kTagCompression = 259,
  kTagPhotometric = 262,
  kTagStripOffsets = 273,
  kTagSamplesPerPixel = 277,
  kTagRowsPerStrip = 278,
  kTagStripByteCounts = 279,
  kTagPlanarConfig = 284,
  kTagSampleFormat = 339,
  kTagModelPixelScale = 33550,
  kTagModelTiepoint = 33922,
  kTagGdalNodata = 42113,
};

enum : uint16_t { kTypeAscii = 2, kTypeShort = 3, kTypeLong = 4, kTypeDouble = 12 };

size_t type_size(uint16_t t) {
  switch (t) {
    case kTypeAscii: return 1;
    case kTypeShort: return 2;
    case kTypeLong: return 4;
    case kTypeDouble: return 8;
    default: return 0;
  }
}

struct Writer {
  std::vector<uint8_t> buf;

  void u16(uint16_t v) {
    buf.push_back(v & 0xff);
    buf.push_back(v >> 8);
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back((v >> (8 * i)) & 0xff);
  }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) buf.push_back((bits >> (8 * i)) & 0xff);
  }
  void bytes(const void* p, size_t n) {
    const auto* c = static_cast<const uint8_t*>(p);
    buf.insert(buf.end(), c, c + n);
  }
  uint32_t pos() const { return static_cast<uint32_t>(buf.size()); }
  void patch_u32(uint32_t at, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf[at + i] = (v >> (8 * i)) & 0xff;
  }
};

struct IfdEntry {
  uint16_t tag;
  uint16_t type;
  uint32_t count;
  std::vector<uint8_t> payload;  // raw little-endian values
};

void write_tiff(const std::string& path, int h, int w, int spp, int bits, int sample_format,
                const std::vector<const void*>& band_ptrs, std::optional<double> nodata,
                const std::optional<GeoTransform>& geo) {
  const size_t bytes_per = bits / 8;
  Writer wr;
  wr.bytes("II", 2);
  wr.u16(42);
  const uint32_t ifd_ptr_at = wr.pos();
  wr.u32(0);  // patched later

  // Interleave samples per pixel (chunky) into strips of ~1 MiB.
  const size_t row_bytes = static_cast<size_t>(w) * spp * bytes_per;
  const int rows_per_strip = std::max<int>(1, static_cast<int>((1u << 20) / std::max<size_t>(1, row_bytes)));
  std::vector<uint32_t> strip_offsets, strip_counts;
  std::vector<uint8_t> row(row_bytes);
  for (int r0 = 0; r0 < h; r0 += rows_per_strip) {
    strip_offsets.push_back(wr.pos());
    const int rlim = std::min(h, r0 + rows_per_strip);
    for (int r = r0; r < rlim; ++r) {
      uint8_t* out = row.data();
      for (int c = 0; c < w; ++c) {
        for (int b = 0; b < spp; ++b) {
          const auto* src = static_cast<const uint8_t*>(band_ptrs[b]) +
                            (static_cast<size_t>(r) * w + c) * bytes_per;
          std::memcpy(out, src, bytes_per);
          out += bytes_per;
        }
      }
      wr.bytes(row.data(), row_bytes);
    }
    strip_counts.push_back(wr.pos() - strip_offsets.back());
  }

  std::vector<IfdEntry> entries;
  auto add_longs = [&](uint16_t tag, const std::vector<uint32_t>& v) {
    IfdEntry e{tag, kTypeLong, static_cast<uint32_t>(v.size()), {}};
    for (uint32_t x : v)
      for (int i = 0; i < 4; ++i) e.payload.push_back((x >> (8 * i)) & 0xff);
    entries.push_back(std::move(e));
  };
  auto add_shorts = [&](uint16_t tag, const std::vector<uint16_t>& v) {
    IfdEntry e{tag, kTypeShort, static_cast<uint32_t>(v.size()), {}};
    for (uint16_t x : v) {
      e.payload.push_back(x & 0xff);
      e.payload.push_back(x >> 8);
    }
    entries.push_back(std::move(e));
  };
  auto add_doubles = [&](uint16_t tag, const std::vector<double>& v) {
    IfdEntry e{tag, kTypeDouble, static_cast<uint32_t>(v.size()), {}};
    for (double x : v) {
      uint64_t bits;
      std::memcpy(&bits, &x, 8);
      for (int i = 0; i < 8; ++i) e.payload.push_back((bits >> (8 * i)) & 0xff);
    }
    entries.push_back(std::move(e));
  };

  add_longs(kTagWidth, {static_cast<uint32_t>(w)});
  add_longs(kTagLength, {static_cast<uint32_t>(h)});
  add_shorts(kTagBitsPerSample, std::vector<uint16_t>(spp, static_cast<uint16_t>(bits)));
  add_shorts(kTagCompression, {1});
  add_shorts(kTagPhotometric, {1});
  add_longs(kTagStripOffsets, strip_offsets);
  add_shorts(kTagSamplesPerPixel, {static_cast<uint16_t>(spp)});
  add_longs(kTagRowsPerStrip, {static_cast<uint32_t>(rows_per_strip)});
  add_longs(kTagStripByteCounts, strip_counts);
  add_shorts(kTagPlanarConfig, {1});
  add_shorts(kTagSampleFormat, std::vector<uint16_t>(spp, static_cast<uint16_t>(sample_format)));
  if (geo) {
    add_doubles(kTagModelPixelScale, {geo->px, -geo->py, 0.0});
    add_doubles(kTagModelTiepoint, {0, 0, 0, geo->x0, geo->y0, 0});
  }
  if (nodata) {
    char txt[64];
    std::snprintf(txt, sizeof(txt), "%g", *nodata);
    IfdEntry e{kTagGdalNodata, kTypeAscii, static_cast<uint32_t>(std::strlen(txt) + 1), {}};
    e.payload.assign(txt, txt + std::strlen(txt) + 1);
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(), [](const IfdEntry& a, const IfdEntry& b) { return a.tag < b.tag; });

  // Out-of-line payloads first, then the IFD itself.
  std::vector<uint32_t> payload_at(entries.size(), 0);
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].payload.size() > 4) {
      if (wr.pos() & 1) wr.buf.push_back(0);
      payload_at[i] = wr.pos();
      wr.bytes(entries[i].payload.data(), entries[i].payload.size());
    }
  }
  if (wr.pos() & 1) wr.buf.push_back(0);
  wr.patch_u32(ifd_ptr_at, wr.pos());
  wr.u16(static_cast<uint16_t>(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    wr.u16(e.tag);
    wr.u16(e.type);
    wr.u32(e.count);
    if (e.payload.size() <= 4) {
      uint8_t inl[4] = {0, 0, 0, 0};
      std::memcpy(inl, e.payload.data(), e.payload.size());
      wr.bytes(inl, 4);
    } else {
      wr.u32(payload_at[i]);
    }
  }
  wr.u32(0);  // no next IFD

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(wr.buf.data()), static_cast<std::streamsize>(wr.buf.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

struct Reader {
  std::vector<uint8_t> buf;

  uint16_t u16(size_t at) const { return static_cast<uint16_t>(buf[at] | (buf[at + 1] << 8)); }
  uint32_t u32(size_t at) const {
    return buf[at] | (buf[at + 1] << 8) | (buf[at + 2] << 16) | (uint32_t(buf[at + 3]) << 24);
  }
  double f64(size_t at) const {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= uint64_t(buf[at + i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

struct RawEntry {
  uint16_t type = 0;
  uint32_t count = 0;
  size_t at = 0;  // offset of the value data within the file
};

}  // namespace

TiffInfo read_geotiff(const std::string& path, std::vector<Grid>& bands) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("missing file: " + path);
  Reader rd;
  {
    std::ifstream f(path, std::ios::binary);
    rd.buf.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  }
  if (rd.buf.size() < 8) throw std::runtime_error("not a TIFF: " + path);
  if (rd.buf[0] == 'M' && rd.buf[1] == 'M') throw std::runtime_error("big-endian TIFF unsupported: " + path);
  if (rd.buf[0] != 'I' || rd.buf[1] != 'I' || rd.u16(2) != 42)
    throw std::runtime_error("not a TIFF: " + path);

  const uint32_t ifd = rd.u32(4);
  if (ifd + 2 > rd.buf.size()) throw std::runtime_error("truncated TIFF: " + path);
  const uint16_t n = rd.u16(ifd);
  std::map<uint16_t, RawEntry> tags;
  for (uint16_t i = 0; i < n; ++i) {
    const size_t at = ifd + 2 + i * 12u;
    RawEntry e;
    const uint16_t tag = rd.u16(at);
    e.type = rd.u16(at + 2);
    e.count = rd.u32(at + 4);
    const size_t nbytes = type_size(e.type) * e.count;
    e.at = nbytes <= 4 ? at + 8 : rd.u32(at + 8);
    tags[tag] = e;
  }

  auto get_int = [&](uint16_t tag, std::optional<uint32_t> def = {}) -> uint32_t {
    auto it = tags.find(tag);
    if (it == tags.end()) {
      if (def) return *def;
      throw std::runtime_error("TIFF tag " + std::to_string(tag) + " missing: " + path);
    }
    const auto& e = it->second;
    return e.type == kTypeShort ? rd.u16(e.at) : rd.u32(e.at);
  };
  auto get_ints = [&](uint16_t tag) {
    std::vector<uint32_t> v;
    auto it = tags.find(tag);
    if (it == tags.end()) return v;
    const auto& e = it->second;
    v.reserve(e.count);
    for (uint32_t i = 0; i < e.count; ++i)
      v.push_back(e.type == kTypeShort ? rd.u16(e.at + 2 * i) : rd.u32(e.at + 4 * i));
    return v;
  };

  TiffInfo info;
  info.w = static_cast<int>(get_int(kTagWidth));
  info.h = static_cast<int>(get_int(kTagLength));
  info.n_bands = static_cast<int>(get_int(kTagSamplesPerPixel, 1u));
  if (get_int(kTagCompression, 1u) != 1) throw std::runtime_error("compressed TIFF unsupported: " + path);
  if (get_int(kTagPlanarConfig, 1u) != 1) throw std::runtime_error("planar TIFF unsupported: " + path);

  const auto bits_v = get_ints(kTagBitsPerSample);
  const int bits = bits_v.empty() ? 8 : static_cast<int>(bits_v[0]);
  const auto fmt_v = get_ints(kTagSampleFormat);
  const int fmt = fmt_v.empty() ? 1 : static_cast<int>(fmt_v[0]);
  if (!(bits == 8 || bits == 16 || bits == 32))
    throw std::runtime_error("unsupported bits per sample: " + std::to_string(bits));
  if (bits == 32 && fmt != 3) throw std::runtime_error("32-bit integer TIFF unsupported: " + path);

  const auto offsets = get_ints(kTagStripOffsets);
  const auto counts = get_ints(kTagStripByteCounts);
  const uint32_t rows_per_strip = get_int(kTagRowsPerStrip, static_cast<uint32_t>(info.h));
  if (offsets.empty() || offsets.size() != counts.size())
    throw std::runtime_error("TIFF strip table malformed: " + path);

  if (tags.count(kTagGdalNodata)) {
    const auto& e = tags[kTagGdalNodata];
    std::string s(reinterpret_cast<const char*>(rd.buf.data() + e.at), e.count);
    info.nodata = std::strtod(s.c_str(), nullptr);
  }
  if (tags.count(kTagModelPixelScale) || tags.count(kTagModelTiepoint)) {
    if (!tags.count(kTagModelPixelScale))
      throw std::runtime_error("unreadable georeferencing: ModelPixelScaleTag missing: " + path);
    if (!tags.count(kTagModelTiepoint))
      throw std::runtime_error("unreadable georeferencing: ModelTiepointTag missing: " + path);
    const auto& sc = tags[kTagModelPixelScale];
    const auto& tp = tags[kTagModelTiepoint];
    if (sc.count < 2 || tp.count < 6)
      throw std::runtime_error("unreadable georeferencing: tag too short: " + path);
    GeoTransform g;
    g.px = rd.f64(sc.at);
    g.py = -rd.f64(sc.at + 8);
    g.x0 = rd.f64(tp.at + 24);
    g.y0 = rd.f64(tp.at + 32);
    info.geo = g;
  }

  bands.assign(info.n_bands, Grid(info.h, info.w));
  const size_t bytes_per = bits / 8;
  const size_t px_bytes = bytes_per * info.n_bands;
  size_t row = 0;
  for (size_t s = 0; s < offsets.size(); ++s) {
    if (offsets[s] + counts[s] > rd.buf.size()) throw std::runtime_error("truncated TIFF data: " + path);
    const size_t rows_here = std::min<size_t>(rows_per_strip, info.h - row);
    if (counts[s] < rows_here * info.w * px_bytes) throw std::runtime_error("short TIFF strip: " + path);
    for (size_t r = 0; r < rows_here; ++r, ++row) {
      const uint8_t* p = rd.buf.data() + offsets[s] + r * info.w * px_bytes;
      for (int c = 0; c < info.w; ++c) {
        for (int b = 0; b < info.n_bands; ++b) {
          float val;
          if (bits == 8) {
            val = static_cast<float>(p[0]);
          } else if (bits == 16) {
            val = static_cast<float>(uint16_t(p[0] | (p[1] << 8)));
          } else {
            uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) | (uint32_t(p[3]) << 24);
            std::memcpy(&val, &u, 4);
          }
          bands[b].at(static_cast<int>(row), c) = val;
          p += bytes_per;
        }
      }
    }
  }
  return info;
}

void write_geotiff_f32(const std::string& path, const std::vector<const Grid*>& bands,
                       std::optional<double> nodata, const std::optional<GeoTransform>& geo) {
  std::vector<const void*> ptrs;
  for (const auto* b : bands) ptrs.push_back(b->v.data());
  write_tiff(path, bands[0]->h, bands[0]->w, static_cast<int>(bands.size()), 32, 3, ptrs, nodata, geo);
}

void write_geotiff_u8(const std::string& path, const std::vector<const ByteGrid*>& bands,
                      const std::optional<GeoTransform>& geo) {
  std::vector<const void*> ptrs;
  for (const auto* b : bands) ptrs.push_back(b->v.data());
  write_tiff(path, bands[0]->h, bands[0]->w, static_cast<int>(bands.size()), 8, 1, ptrs, {}, geo);
}

MultispectralImage load_image(const std::string& path, const std::vector<std::string>& band_order,
                              DomainTag tag) {
  std::vector<Grid> file_bands;
  const TiffInfo info = read_geotiff(path, file_bands);
  if (info.n_bands < kNumBands)
    throw std::runtime_error("band count mismatch: " + path + " has " + std::to_string(info.n_bands) +
                             " bands, need at least 4");
  if (band_order.size() > file_bands.size())
    throw std::runtime_error("band count mismatch: band_order names " + std::to_string(band_order.size()) +
                             " bands, file has " + std::to_string(info.n_bands));

  MultispectralImage img(info.h, info.w, tag);
  img.geo = info.geo;
  std::array<int, kNumBands> src = {-1, -1, -1, -1};
  for (size_t i = 0; i < band_order.size(); ++i) {
    const auto& name = band_order[i];
    if (name == "-") continue;
    bool known = false;
    for (int b = 0; b < kNumBands; ++b) {
      if (name == kBandNames[b]) {
        if (src[b] >= 0) throw std::runtime_error("band count mismatch: duplicate role " + name);
        src[b] = static_cast<int>(i);
        known = true;
      }
    }
    if (!known) throw std::runtime_error("unknown band role: " + name);
  }
  for (int b = 0; b < kNumBands; ++b)
    if (src[b] < 0)
      throw std::runtime_error("band count mismatch: role " + std::string(kBandNames[b]) + " unassigned");

  for (int b = 0; b < kNumBands; ++b) img.bands[b] = std::move(file_bands[src[b]]);
  if (info.nodata) {
    const float nd = static_cast<float>(*info.nodata);
    for (int r = 0; r < info.h; ++r)
      for (int c = 0; c < info.w; ++c) {
        bool bad = false;
        for (auto& bnd : img.bands) bad = bad || bnd.at(r, c) == nd;
        if (bad) {
          img.validity.at(r, c) = 0;
          for (auto& bnd : img.bands) bnd.at(r, c) = 0.f;
        }
      }
  }
  img.check();
  return img;
}

void save_image(const MultispectralImage& image, const std::string& path) {
  image.check();
  bool any_invalid = false;
  for (uint8_t v : image.validity.v) any_invalid = any_invalid || v == 0;
  std::array<Grid, kNumBands> out = image.bands;
  if (any_invalid) {
    for (auto& b : out)
      for (size_t i = 0; i < b.v.size(); ++i)
        if (!image.validity.v[i]) b.v[i] = static_cast<float>(kDefaultNodata);
  }
  write_geotiff_f32(path, {&out[0], &out[1], &out[2], &out[3]},
                    any_invalid ? std::optional<double>(kDefaultNodata) : std::nullopt, image.geo);
}

CloudMask load_cloud_mask(const std::string& path) {
  std::vector<Grid> bands;
  const TiffInfo info = read_geotiff(path, bands);
  CloudMask m(info.h, info.w, 333.0);
  for (size_t i = 0; i < bands[0].v.size(); ++i) {
    const float v = bands[0].v[i];
    if (v != 0.f && v != 1.f && v != 255.f)
      throw std::runtime_error("cloud mask has a label outside {0,1,255}: " + path);
    m.labels.v[i] = static_cast<uint8_t>(v);
  }
  return m;
}

void save_cloud_mask(const CloudMask& mask, const std::string& path) {
  write_geotiff_u8(path, {&mask.labels}, {});
}

QualityMask load_quality_mask(const std::string& path) {
  std::vector<Grid> bands;
  const TiffInfo info = read_geotiff(path, bands);
  if (info.n_bands != kNumBands)
    throw std::runtime_error("quality mask must have 4 bands: " + path);
  QualityMask q(info.h, info.w);
  for (int b = 0; b < kNumBands; ++b)
    for (size_t i = 0; i < bands[b].v.size(); ++i) q.planes[b].v[i] = bands[b].v[i] != 0.f;
  return q;
}

void save_quality_mask(const QualityMask& mask, const std::string& path) {
  write_geotiff_u8(path, {&mask.planes[0], &mask.planes[1], &mask.planes[2], &mask.planes[3]}, {});
}

}  // namespace xsda::raster
