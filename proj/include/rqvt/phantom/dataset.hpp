#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rqvt/error.hpp"
#include "rqvt/features/roi_block.hpp"
#include "rqvt/ml/dataset.hpp"
#include "rqvt/phantom/shapes.hpp"
#include "rqvt/pipeline/csv.hpp"
#include "rqvt/roi.hpp"
#include "rqvt/volume_io.hpp"

namespace rqvt {

struct PlantedParams {
  std::size_t n_lesions = 200;
  std::string signal_feature_id = "glszm_ZoneEntropy";
  double noise_sd = 3.0;  // HU, every voxel
  double label_noise = 0.05;
  std::uint64_t seed = 7;
  double spacing_mm = 0.75;
};

struct PlantedScan {
  ScalarVolume volume;
  BinaryMask lesion;
  double diameter_mm = 0.0;
  bool speckled = false;
};

struct PlantedLesion {
  std::string lesion_id;
  std::string patient_id;
  bool responder = false;  // drawn class; the label comes from the diameters
  BinaryMask lung;         // shared by every scan
  std::array<PlantedScan, 3> scans;
};

namespace planted {

inline constexpr double kLungHu = -850.0;
inline constexpr double kWallHu = 0.0;
inline constexpr double kVesselHu = 40.0;
inline constexpr double kZoneContrastHu = 104.0;
inline constexpr int kMaxZone = 12;

inline double uniform(ml::Rng& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

inline Vec3 unit_vector(ml::Rng& r) {
  for (;;) {
    Vec3 v{r.normal(), r.normal(), r.normal()};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n > 1e-6) return {v[0] / n, v[1] / n, v[2] / n};
  }
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Paints high-level zones of exactly `size` voxels (or 1..kMaxZone each when
/// `mixed`) into the lesion, every zone 26-separated from the others, until
/// `fraction` of the lesion is covered or placement keeps failing.
inline void plant_zones(ScalarVolume& v, const BinaryMask& lesion, bool mixed, int size, double fraction, double level,
                        ml::Rng& rng) {
  const auto& g = lesion.geometry;
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < lesion.size(); ++i)
    if (lesion.data[i]) cells.push_back(i);
  if (cells.empty()) return;
  std::vector<std::uint8_t> halo(lesion.size(), 0);
  const auto target = static_cast<std::size_t>(fraction * static_cast<double>(cells.size()));
  static constexpr std::array<Index3, 6> steps{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

  std::size_t placed = 0, failures = 0;
  std::vector<std::size_t> zone;
  while (placed < target && failures < 200) {
    const int k = mixed ? 1 + static_cast<int>(rng.below(kMaxZone)) : size;
    zone.assign(1, cells[rng.below(cells.size())]);
    if (halo[zone[0]]) {
      ++failures;
      continue;
    }
    for (int attempt = 0; attempt < 40 * k && static_cast<int>(zone.size()) < k; ++attempt) {
      const Index3 p = g.unravel(zone[rng.below(zone.size())]);
      const Index3& d = steps[rng.below(6)];
      const Index3 q{p[0] + d[0], p[1] + d[1], p[2] + d[2]};
      if (!g.contains(q)) continue;
      const auto qi = g.linear(q);
      if (!lesion.data[qi] || halo[qi] || std::find(zone.begin(), zone.end(), qi) != zone.end()) continue;
      zone.push_back(qi);
    }
    if (static_cast<int>(zone.size()) < k) {
      ++failures;
      continue;
    }
    failures = 0;
    for (auto i : zone) {
      v.data[i] += level;
      const Index3 p = g.unravel(i);
      halo[i] = 1;
      for (const auto& d : neighbors26()) {
        const Index3 q{p[0] + d[0], p[1] + d[1], p[2] + d[2]};
        if (g.contains(q)) halo[g.linear(q)] = 1;
      }
    }
    placed += zone.size();
  }
}

inline std::string numbered(char prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%04zu", prefix, n);
  return buf;
}

}  // namespace planted

/// Patient id of every lesion: lesions are numbered in order and a patient
/// holds one or two consecutive lesions.
inline std::vector<std::string> planted_patients(const PlantedParams& p) {
  ml::Rng r(ml::derive_seed(p.seed, 0x70617469656e74ULL));
  std::vector<std::string> ids;
  std::size_t patient = 0;
  bool can_share = false;
  for (std::size_t i = 0; i < p.n_lesions; ++i) {
    if (can_share && r.uniform() < 0.3) {
      can_share = false;
    } else {
      ++patient;
      can_share = true;
    }
    ids.push_back(planted::numbered('P', patient));
  }
  return ids;
}

/// Lesion `index` of the dataset; a pure function of (params, index).
/// Three scans: baseline, first follow-up, second follow-up. The first
/// follow-up stays within 85-110% of baseline size for every lesion; at the
/// second, responders have shrunk to 40-58% and the rest stay within 85-110%.
/// The first follow-up interior carries zones of mixed sizes ("speckled")
/// when the lesion is a responder, flipped with probability label_noise, and
/// zones of a single size otherwise. Baseline interiors draw their texture
/// independently of the class.
inline PlantedLesion planted_lesion(const PlantedParams& p, std::size_t index, const std::string& patient_id) {
  using planted::uniform;
  ml::Rng r(ml::derive_seed(p.seed, index));
  PlantedLesion out;
  out.lesion_id = planted::numbered('L', index + 1);
  out.patient_id = patient_id;
  out.responder = r.uniform() < 0.5;
  const bool flip = r.uniform() < p.label_noise;
  const bool speckled_tp2 = out.responder != flip;
  const bool speckled_tp1 = r.uniform() < 0.5;

  const double r0 = uniform(r, 6.0, 10.0);
  const Vec3 ratios{uniform(r, 0.85, 1.15), uniform(r, 0.85, 1.15), uniform(r, 0.85, 1.15)};
  const std::array<double, 3> scale{1.0, uniform(r, 0.85, 1.10),
                                    out.responder ? uniform(r, 0.40, 0.58) : uniform(r, 0.85, 1.10)};
  const double base_hu = uniform(r, 10.0, 50.0);

  // Vessels: 1-3 bent tubes from the lesion center out into the lung.
  const int n_vessels = 1 + static_cast<int>(r.below(3));
  const double reach0 = r0 * std::max({ratios[0], ratios[1], ratios[2]}) * std::max({scale[0], scale[1], scale[2]});
  std::vector<std::vector<Vec3>> vessels;
  std::vector<double> vessel_radius;
  Vec3 lo{-reach0, -reach0, -reach0}, hi{reach0, reach0, reach0};
  for (int k = 0; k < n_vessels; ++k) {
    const Vec3 dir = planted::unit_vector(r);
    Vec3 perp = planted::cross(dir, planted::unit_vector(r));
    const double pn = std::sqrt(perp[0] * perp[0] + perp[1] * perp[1] + perp[2] * perp[2]);
    for (auto& c : perp) c /= pn;
    const double length = reach0 + uniform(r, 4.0, 8.0);
    const double bend = uniform(r, 0.0, 0.25) * length;
    std::vector<Vec3> pts;
    for (int s = 0; s <= 32; ++s) {
      const double t = s / 32.0;
      Vec3 q;
      for (std::size_t a = 0; a < 3; ++a) q[a] = dir[a] * length * t + perp[a] * bend * t * t;
      for (std::size_t a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], q[a]);
        hi[a] = std::max(hi[a], q[a]);
      }
      pts.push_back(q);
    }
    vessels.push_back(std::move(pts));
    vessel_radius.push_back(uniform(r, 1.2, 1.8));
  }

  const double wall = 2.0 * p.spacing_mm;
  const Geometry g = detail::covering_geometry(lo, hi, 2.0 + 1.8 + wall, p.spacing_mm);
  out.lung = BinaryMask(g);
  for (int z = 2; z < g.dims[2] - 2; ++z)
    for (int y = 2; y < g.dims[1] - 2; ++y)
      for (int x = 2; x < g.dims[0] - 2; ++x) out.lung(x, y, z) = 1;
  BinaryMask vessel_mask(g);
  for (std::size_t k = 0; k < vessels.size(); ++k) paint_tube(vessel_mask, vessels[k], vessel_radius[k]);

  for (std::size_t tp = 0; tp < 3; ++tp) {
    auto& scan = out.scans[tp];
    scan.speckled = tp == 0 ? speckled_tp1 : speckled_tp2;
    const double rt = r0 * scale[tp];
    const Vec3 semi{rt * ratios[0], rt * ratios[1], rt * ratios[2]};
    scan.lesion = BinaryMask(g);
    scan.volume = ScalarVolume(g, planted::kWallHu);
    for (int z = 0; z < g.dims[2]; ++z)
      for (int y = 0; y < g.dims[1]; ++y)
        for (int x = 0; x < g.dims[0]; ++x) {
          const auto i = g.linear(x, y, z);
          const Vec3 q = g.physical({x, y, z});
          const double e = (q[0] / semi[0]) * (q[0] / semi[0]) + (q[1] / semi[1]) * (q[1] / semi[1]) +
                           (q[2] / semi[2]) * (q[2] / semi[2]);
          if (!out.lung.data[i]) continue;
          if (e <= 1.0) {
            scan.lesion.data[i] = 1;
            scan.volume.data[i] = base_hu;
          } else {
            scan.volume.data[i] = vessel_mask.data[i] ? planted::kVesselHu : planted::kLungHu;
          }
        }
    const int zone_size = 1 + static_cast<int>(r.below(planted::kMaxZone));
    const double fraction = uniform(r, 0.10, 0.30);
    planted::plant_zones(scan.volume, scan.lesion, scan.speckled, zone_size, fraction, planted::kZoneContrastHu, r);
    for (auto& x : scan.volume.data) x = std::round(x + p.noise_sd * r.normal());
    scan.diameter_mm = recist_diameter(scan.lesion);
  }
  return out;
}

struct PlantedSummary {
  std::filesystem::path manifest;
  std::size_t lesions = 0;
  std::size_t positives = 0;
};

/// Writes the dataset under `dir`: manifest.csv (the pipeline's input),
/// diameters.csv, truth.csv, dataset.json, and MetaImage volumes and masks.
inline PlantedSummary planted_dataset(const PlantedParams& p, const std::filesystem::path& dir) {
  if (p.n_lesions < 40) throw Error(ErrorCode::InvalidArgument, "planted_dataset: at least 40 lesions required");
  const auto ids = roi_feature_ids();
  if (!p.signal_feature_id.starts_with("glszm_") || std::find(ids.begin(), ids.end(), p.signal_feature_id) == ids.end())
    throw Error(ErrorCode::InvalidArgument, "planted_dataset: signal feature must be a GLSZM feature id");
  if (!(p.noise_sd >= 0.0) || !(p.label_noise >= 0.0 && p.label_noise <= 1.0) || !(p.spacing_mm > 0.0))
    throw Error(ErrorCode::InvalidArgument, "planted_dataset: bad noise or spacing");

  std::filesystem::create_directories(dir / "images");
  const auto patients = planted_patients(p);
  std::ofstream manifest(dir / "manifest.csv", std::ios::binary);
  std::ofstream diam(dir / "diameters.csv", std::ios::binary);
  std::ofstream truth(dir / "truth.csv", std::ios::binary);
  if (!manifest || !diam || !truth) throw Error(ErrorCode::IoFailure, "cannot write into " + dir.string());
  manifest << "lesion_id,patient_id,timepoint,volume_path,lesion_mask_path,lung_mask_path,diameter_mm\n";
  diam << "lesion_id,timepoint,diameter_mm\n";
  truth << "lesion_id,patient_id,label,responder,speckled_tp1,speckled_tp2\n";

  PlantedSummary summary{dir / "manifest.csv", p.n_lesions, 0};
  for (std::size_t i = 0; i < p.n_lesions; ++i) {
    const auto les = planted_lesion(p, i, patients[i]);
    const std::string lung_rel = "images/" + les.lesion_id + "_lung.mhd";
    write_mask(les.lung, dir / lung_rel);
    std::vector<DiameterRecord> ds;
    for (int tp = 0; tp < 3; ++tp) {
      const auto& s = les.scans[static_cast<std::size_t>(tp)];
      const std::string stem = "images/" + les.lesion_id + "_tp" + std::to_string(tp);
      write_volume(s.volume, dir / (stem + ".mhd"), ElementType::Short);
      write_mask(s.lesion, dir / (stem + "_lesion.mhd"));
      const auto d = format_sig17(s.diameter_mm);
      manifest << les.lesion_id << ',' << les.patient_id << ',' << tp << ',' << stem << ".mhd," << stem << "_lesion.mhd,"
               << lung_rel << ',' << d << '\n';
      diam << les.lesion_id << ',' << tp << ',' << d << '\n';
      ds.push_back({les.lesion_id, tp, s.diameter_mm});
    }
    const int label = shrinkage_label(ds[0], {ds[1], ds[2]});
    summary.positives += static_cast<std::size_t>(label);
    truth << les.lesion_id << ',' << les.patient_id << ',' << label << ',' << int(les.responder) << ','
          << int(les.scans[0].speckled) << ',' << int(les.scans[1].speckled) << '\n';
  }

  const nlohmann::ordered_json meta = {{"n_lesions", p.n_lesions},     {"signal_feature_id", p.signal_feature_id},
                                       {"noise_sd", p.noise_sd},       {"label_noise", p.label_noise},
                                       {"seed", p.seed},               {"spacing_mm", p.spacing_mm},
                                       {"positives", summary.positives}};
  std::ofstream(dir / "dataset.json", std::ios::binary) << meta.dump(2) << '\n';
  if (!manifest || !diam || !truth) throw Error(ErrorCode::IoFailure, "write failed under " + dir.string());
  return summary;
}

}  // namespace rqvt
