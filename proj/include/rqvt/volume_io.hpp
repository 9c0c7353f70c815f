#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rqvt/error.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

enum class ElementType { UChar, Short, Float };

inline std::size_t element_size(ElementType t) { return t == ElementType::UChar ? 1 : t == ElementType::Short ? 2 : 4; }

inline const char* element_tag(ElementType t) {
  return t == ElementType::UChar ? "MET_UCHAR" : t == ElementType::Short ? "MET_SHORT" : "MET_FLOAT";
}

inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(s) + "'");
  return v;
}

namespace detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::map<std::string, std::string> read_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    fields[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return fields;
}

inline const std::string& require_field(const std::map<std::string, std::string>& f,
                                        const std::string& key) {
  auto it = f.find(key);
  if (it == f.end()) throw Error(ErrorCode::MissingHeaderField, key);
  return it->second;
}

inline Vec3 parse_vec3(const std::string& s, const std::string& key) {
  auto toks = split_ws(s);
  if (toks.size() != 3) throw Error(ErrorCode::MissingHeaderField, key + " needs 3 values");
  return {parse_real(toks[0]), parse_real(toks[1]), parse_real(toks[2])};
}

template <typename U>
U load_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(p[b]) << (8 * b);
  return v;
}

template <typename U>
void store_le(U v, std::string& out) {
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

}  // namespace detail

/// Reads a MetaImage header (.mhd) and its raw little-endian payload.
inline ScalarVolume read_volume(const std::filesystem::path& path) {
  const auto fields = detail::read_header(path);
  const auto& ndims = detail::require_field(fields, "NDims");
  if (detail::trim(ndims) != "3") throw Error(ErrorCode::MissingHeaderField, "NDims must be 3");

  Geometry g;
  {
    auto toks = detail::split_ws(detail::require_field(fields, "DimSize"));
    if (toks.size() != 3) throw Error(ErrorCode::MissingHeaderField, "DimSize needs 3 values");
    for (int a = 0; a < 3; ++a) {
      const double d = parse_real(toks[a]);
      if (d < 1 || d != std::floor(d)) throw Error(ErrorCode::DimsMismatch, "bad DimSize");
      g.dims[a] = static_cast<int>(d);
    }
  }
  g.spacing = detail::parse_vec3(detail::require_field(fields, "ElementSpacing"), "ElementSpacing");
  if (auto it = fields.find("Offset"); it != fields.end()) g.origin = detail::parse_vec3(it->second, "Offset");
  if (!g.valid()) throw Error(ErrorCode::DimsMismatch, "invalid geometry in " + path.string());

  const auto& type_str = detail::require_field(fields, "ElementType");
  ElementType type;
  if (type_str == "MET_UCHAR") type = ElementType::UChar;
  else if (type_str == "MET_SHORT") type = ElementType::Short;
  else if (type_str == "MET_FLOAT") type = ElementType::Float;
  else throw Error(ErrorCode::UnsupportedElementType, type_str);

  bool msb = false;
  if (auto it = fields.find("ElementByteOrderMSB"); it != fields.end())
    msb = it->second == "True" || it->second == "true";
  if (auto it = fields.find("BinaryDataByteOrderMSB"); it != fields.end())
    msb = msb || it->second == "True" || it->second == "true";
  if (msb) throw Error(ErrorCode::UnsupportedElementType, "big-endian payloads are not supported");

  const auto data_name = detail::require_field(fields, "ElementDataFile");
  std::filesystem::path data_path = data_name;
  if (data_path.is_relative()) data_path = path.parent_path() / data_path;

  std::ifstream raw(data_path, std::ios::binary);
  if (!raw) throw Error(ErrorCode::IoFailure, "cannot open " + data_path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(raw)), std::istreambuf_iterator<char>());

  const std::size_t elem = element_size(type);
  const std::size_t n = g.voxel_count();
  if (bytes.size() != n * elem)
    throw Error(ErrorCode::DimsMismatch, "payload has " + std::to_string(bytes.size()) + " bytes, expected " +
                                             std::to_string(n * elem));

  ScalarVolume v(g);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* p = bytes.data() + i * elem;
    if (type == ElementType::UChar) {
      v.data[i] = static_cast<double>(*p);
    } else if (type == ElementType::Short) {
      v.data[i] = static_cast<double>(std::bit_cast<std::int16_t>(detail::load_le<std::uint16_t>(p)));
    } else {
      const float f = std::bit_cast<float>(detail::load_le<std::uint32_t>(p));
      if (!std::isfinite(f)) throw Error(ErrorCode::DimsMismatch, "non-finite intensity in payload");
      v.data[i] = static_cast<double>(f);
    }
  }
  return v;
}

/// Writes `<path>` (header) and `<path stem>.raw` (payload). Values must be
/// representable in the element type; MET_SHORT requires integers in range.
inline void write_volume(const ScalarVolume& v, const std::filesystem::path& path,
                         ElementType type = ElementType::Float) {
  if (!v.geometry.valid() || v.data.size() != v.geometry.voxel_count())
    throw Error(ErrorCode::DimsMismatch, "volume geometry and data disagree");
  std::string payload;
  payload.reserve(v.size() * element_size(type));
  for (double x : v.data) {
    if (type == ElementType::UChar) {
      if (x != std::round(x) || x < 0.0 || x > 255.0)
        throw Error(ErrorCode::UnsupportedElementType, "value not representable as MET_UCHAR");
      payload += static_cast<char>(static_cast<unsigned char>(x));
    } else if (type == ElementType::Short) {
      if (x != std::round(x) || x < -32768.0 || x > 32767.0)
        throw Error(ErrorCode::UnsupportedElementType, "value not representable as MET_SHORT");
      detail::store_le(std::bit_cast<std::uint16_t>(static_cast<std::int16_t>(x)), payload);
    } else {
      detail::store_le(std::bit_cast<std::uint32_t>(static_cast<float>(x)), payload);
    }
  }

  auto raw_path = path;
  raw_path.replace_extension(".raw");
  const auto& g = v.geometry;
  std::ostringstream header;
  header << "ObjectType = Image\n"
         << "NDims = 3\n"
         << "BinaryData = True\n"
         << "ElementByteOrderMSB = False\n"
         << "DimSize = " << g.dims[0] << ' ' << g.dims[1] << ' ' << g.dims[2] << '\n'
         << "ElementSpacing = " << format_real(g.spacing[0]) << ' ' << format_real(g.spacing[1]) << ' '
         << format_real(g.spacing[2]) << '\n'
         << "Offset = " << format_real(g.origin[0]) << ' ' << format_real(g.origin[1]) << ' '
         << format_real(g.origin[2]) << '\n'
         << "ElementType = " << element_tag(type) << '\n'
         << "ElementDataFile = " << raw_path.filename().string() << '\n';

  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    const auto text = header.str();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
  }
  std::ofstream out(raw_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + raw_path.string());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + raw_path.string());
}

/// Voxel is foreground iff intensity > threshold.
inline BinaryMask binarize_mask(const ScalarVolume& v, double threshold) {
  BinaryMask m(v.geometry);
  for (std::size_t i = 0; i < v.size(); ++i) m.data[i] = v.data[i] > threshold ? 1 : 0;
  return m;
}

inline ScalarVolume mask_to_volume(const BinaryMask& m) {
  ScalarVolume v(m.geometry);
  for (std::size_t i = 0; i < m.size(); ++i) v.data[i] = m.data[i] ? 1.0 : 0.0;
  return v;
}

inline BinaryMask read_mask(const std::filesystem::path& path) { return binarize_mask(read_volume(path), 0.5); }

inline void write_mask(const BinaryMask& m, const std::filesystem::path& path) {
  write_volume(mask_to_volume(m), path, ElementType::UChar);
}

/// Output lattice shared by both resamplers: spacing `target` on every axis,
/// dims = ceil(extent / target), same origin.
inline Geometry isotropic_geometry(const Geometry& in, double target) {
  if (!(target > 0.0) || !std::isfinite(target)) throw Error(ErrorCode::NonPositiveTarget, format_real(target));
  Geometry out;
  out.spacing = {target, target, target};
  out.origin = in.origin;
  for (int a = 0; a < 3; ++a) {
    // Tolerance absorbs representation error in ratios such as 1.5 / 0.75.
    const double ratio = in.dims[a] * in.spacing[a] / target;
    out.dims[a] = std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
  }
  return out;
}

/// Trilinear resampling to an isotropic grid; samples outside the input's
/// voxel-center extent clamp to the nearest edge voxel.
inline ScalarVolume resample_isotropic(const ScalarVolume& v, double target) {
  const Geometry out_g = isotropic_geometry(v.geometry, target);
  const auto& in = v.geometry;
  ScalarVolume out(out_g);

  struct AxisSample {
    int i0, i1;
    double w;
  };
  std::array<std::vector<AxisSample>, 3> axis;
  for (int a = 0; a < 3; ++a) {
    axis[a].resize(static_cast<std::size_t>(out_g.dims[a]));
    for (int i = 0; i < out_g.dims[a]; ++i) {
      double c = i * target / in.spacing[a];
      c = std::clamp(c, 0.0, static_cast<double>(in.dims[a] - 1));
      const int i0 = static_cast<int>(std::floor(c));
      const int i1 = std::min(i0 + 1, in.dims[a] - 1);
      axis[a][static_cast<std::size_t>(i)] = {i0, i1, c - i0};
    }
  }

  for (int z = 0; z < out_g.dims[2]; ++z) {
    const auto sz = axis[2][static_cast<std::size_t>(z)];
    for (int y = 0; y < out_g.dims[1]; ++y) {
      const auto sy = axis[1][static_cast<std::size_t>(y)];
      for (int x = 0; x < out_g.dims[0]; ++x) {
        const auto sx = axis[0][static_cast<std::size_t>(x)];
        // Clamped so rounding never leaves the [a, b] hull.
        auto lerp = [](double a, double b, double w) {
          if (w == 0.0) return a;
          return std::clamp(a + (b - a) * w, std::min(a, b), std::max(a, b));
        };
        const double c00 = lerp(v(sx.i0, sy.i0, sz.i0), v(sx.i1, sy.i0, sz.i0), sx.w);
        const double c10 = lerp(v(sx.i0, sy.i1, sz.i0), v(sx.i1, sy.i1, sz.i0), sx.w);
        const double c01 = lerp(v(sx.i0, sy.i0, sz.i1), v(sx.i1, sy.i0, sz.i1), sx.w);
        const double c11 = lerp(v(sx.i0, sy.i1, sz.i1), v(sx.i1, sy.i1, sz.i1), sx.w);
        const double c0 = lerp(c00, c10, sy.w);
        const double c1 = lerp(c01, c11, sy.w);
        out(x, y, z) = lerp(c0, c1, sz.w);
      }
    }
  }
  return out;
}

/// Nearest-center resampling onto the same lattice as resample_isotropic.
/// Ties (sample exactly between two centers) resolve to the higher index.
inline BinaryMask resample_mask_nearest(const BinaryMask& m, double target) {
  const Geometry out_g = isotropic_geometry(m.geometry, target);
  const auto& in = m.geometry;
  std::array<std::vector<int>, 3> nearest;
  for (int a = 0; a < 3; ++a) {
    nearest[a].resize(static_cast<std::size_t>(out_g.dims[a]));
    for (int i = 0; i < out_g.dims[a]; ++i) {
      const double c = i * target / in.spacing[a];
      const int j = static_cast<int>(std::floor(c + 0.5));
      nearest[a][static_cast<std::size_t>(i)] = std::clamp(j, 0, in.dims[a] - 1);
    }
  }
  BinaryMask out(out_g);
  for (int z = 0; z < out_g.dims[2]; ++z)
    for (int y = 0; y < out_g.dims[1]; ++y)
      for (int x = 0; x < out_g.dims[0]; ++x)
        out(x, y, z) = m(nearest[0][static_cast<std::size_t>(x)], nearest[1][static_cast<std::size_t>(y)],
                         nearest[2][static_cast<std::size_t>(z)]);
  return out;
}

}  // namespace rqvt
