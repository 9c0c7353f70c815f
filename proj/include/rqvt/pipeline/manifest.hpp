#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rqvt/error.hpp"
#include "rqvt/pipeline/csv.hpp"
#include "rqvt/volume_io.hpp"

namespace rqvt {

struct ScanRecord {
  int timepoint = 0;
  std::filesystem::path volume_path;
  std::filesystem::path lesion_mask_path;
  std::optional<std::filesystem::path> lung_mask_path;
  std::optional<double> diameter_mm;
};

struct LesionRecord {
  std::string lesion_id;
  std::string patient_id;
  std::vector<ScanRecord> scans;  // ascending timepoint

  const ScanRecord* scan(int timepoint) const {
    for (const auto& s : scans)
      if (s.timepoint == timepoint) return &s;
    return nullptr;
  }
};

/// Manifest CSV, one row per scan: lesion_id, patient_id, timepoint,
/// volume_path, lesion_mask_path, and optionally lung_mask_path and
/// diameter_mm (empty cells allowed). Relative paths resolve against the
/// manifest's directory. Records come back ordered by lesion_id.
inline std::vector<LesionRecord> read_manifest(const std::filesystem::path& path) {
  const auto table = read_csv(path, ErrorCode::ManifestParse);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table.header.size(); ++i) col[detail::trim(table.header[i])] = i;
  for (const char* required : {"lesion_id", "patient_id", "timepoint", "volume_path", "lesion_mask_path"})
    if (!col.count(required)) throw Error(ErrorCode::ManifestParse, path.string() + ": missing column " + required);
  constexpr auto kAbsent = static_cast<std::size_t>(-1);
  const std::size_t lung_col = col.count("lung_mask_path") ? col["lung_mask_path"] : kAbsent;
  const std::size_t diam_col = col.count("diameter_mm") ? col["diameter_mm"] : kAbsent;

  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  std::map<std::string, LesionRecord> by_id;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = path.string() + " row " + std::to_string(r + 2);
    auto cell = [&](std::size_t c) { return detail::trim(row[c]); };
    const auto lesion = cell(col["lesion_id"]);
    const auto patient = cell(col["patient_id"]);
    if (lesion.empty() || patient.empty()) throw Error(ErrorCode::ManifestParse, where + ": empty lesion_id or patient_id");
    ScanRecord s;
    const auto tp = cell(col["timepoint"]);
    auto res = std::from_chars(tp.data(), tp.data() + tp.size(), s.timepoint);
    if (res.ec != std::errc{} || res.ptr != tp.data() + tp.size() || s.timepoint < 0)
      throw Error(ErrorCode::ManifestParse, where + ": bad timepoint '" + tp + "'");
    s.volume_path = resolve(cell(col["volume_path"]));
    s.lesion_mask_path = resolve(cell(col["lesion_mask_path"]));
    if (lung_col != kAbsent && !cell(lung_col).empty()) s.lung_mask_path = resolve(cell(lung_col));
    if (diam_col != kAbsent && !cell(diam_col).empty()) {
      try {
        s.diameter_mm = parse_real(cell(diam_col));
      } catch (const Error&) {
        throw Error(ErrorCode::ManifestParse, where + ": bad diameter_mm");
      }
    }

    auto& rec = by_id[lesion];
    if (rec.lesion_id.empty()) {
      rec.lesion_id = lesion;
      rec.patient_id = patient;
    } else if (rec.patient_id != patient) {
      throw Error(ErrorCode::ManifestParse, where + ": lesion " + lesion + " listed under two patients");
    }
    if (rec.scan(s.timepoint))
      throw Error(ErrorCode::ManifestParse, where + ": duplicate timepoint " + tp + " for lesion " + lesion);
    rec.scans.push_back(std::move(s));
  }

  std::vector<LesionRecord> out;
  for (auto& [_, rec] : by_id) {
    std::sort(rec.scans.begin(), rec.scans.end(), [](const ScanRecord& a, const ScanRecord& b) { return a.timepoint < b.timepoint; });
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace rqvt
