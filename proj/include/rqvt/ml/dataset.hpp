#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "rqvt/error.hpp"

namespace rqvt::ml {

/// Row-major feature matrix with per-row labels and identifiers.
struct Dataset {
  std::vector<std::string> feature_ids;
  std::vector<double> values;  // rows() x cols()
  std::vector<int> labels;
  std::vector<std::string> patient_ids;
  std::vector<std::string> lesion_ids;

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return feature_ids.size(); }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  const double* row(std::size_t r) const { return values.data() + r * cols(); }

  void add_row(const std::vector<double>& x, int label, std::string patient = {}, std::string lesion = {}) {
    if (x.size() != cols()) throw Error(ErrorCode::WidthMismatch, "Dataset::add_row: row width differs from feature count");
    values.insert(values.end(), x.begin(), x.end());
    labels.push_back(label);
    patient_ids.push_back(std::move(patient));
    lesion_ids.push_back(std::move(lesion));
  }

  Dataset subset(const std::vector<std::size_t>& rows_idx) const {
    Dataset d;
    d.feature_ids = feature_ids;
    d.values.reserve(rows_idx.size() * cols());
    for (auto r : rows_idx) {
      d.values.insert(d.values.end(), row(r), row(r) + cols());
      d.labels.push_back(labels[r]);
      d.patient_ids.push_back(patient_ids[r]);
      d.lesion_ids.push_back(lesion_ids[r]);
    }
    return d;
  }

  Dataset select_columns(const std::vector<std::size_t>& cols_idx) const {
    Dataset d;
    for (auto c : cols_idx) d.feature_ids.push_back(feature_ids[c]);
    d.values.reserve(rows() * cols_idx.size());
    for (std::size_t r = 0; r < rows(); ++r)
      for (auto c : cols_idx) d.values.push_back((*this)(r, c));
    d.labels = labels;
    d.patient_ids = patient_ids;
    d.lesion_ids = lesion_ids;
    return d;
  }

  void validate() const {
    if (values.size() != rows() * cols()) throw Error(ErrorCode::WidthMismatch, "Dataset: value count is not rows x cols");
    if (patient_ids.size() != rows() || lesion_ids.size() != rows())
      throw Error(ErrorCode::InvalidArgument, "Dataset: identifier columns differ in length from labels");
    std::unordered_set<std::string> seen;
    for (const auto& id : feature_ids)
      if (!seen.insert(id).second) throw Error(ErrorCode::InvalidArgument, "Dataset: duplicate feature id " + id);
    for (double v : values)
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "Dataset: non-finite feature value");
    for (int y : labels)
      if (y != 0 && y != 1) throw Error(ErrorCode::InvalidArgument, "Dataset: labels must be 0 or 1");
  }

  bool has_both_classes() const {
    bool zero = false, one = false;
    for (int y : labels) (y ? one : zero) = true;
    return zero && one;
  }
};

/// splitmix64: seeds and the per-tree streams. Kept in-house so that model
/// bytes do not depend on the standard library's distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform integer in [0, n), rejection-sampled.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return x % n;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double normal() {
    // Box-Muller; one draw per call keeps the stream position predictable.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

/// Seed of stream `index` derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  Rng r(master ^ (0xd1b54a32d192ed03ULL * (index + 1)));
  return r.next();
}

}  // namespace rqvt::ml
