#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rqvt/error.hpp"

namespace rqvt {

/// Ordered (id, value) pairs. Order is part of the contract: catalogs and
/// CSV columns follow it.
class FeatureVector {
 public:
  void push(std::string id, double value) {
    ids_.push_back(std::move(id));
    values_.push_back(value);
  }

  void append(const FeatureVector& other, std::string_view suffix = {}) {
    for (std::size_t i = 0; i < other.size(); ++i) push(other.ids_[i] + std::string(suffix), other.values_[i]);
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& values() const { return values_; }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  double value(std::size_t i) const { return values_[i]; }

  double at(std::string_view id) const {
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (ids_[i] == id) return values_[i];
    throw Error(ErrorCode::InvalidArgument, "no feature " + std::string(id));
  }

  bool contains(std::string_view id) const {
    for (const auto& s : ids_)
      if (s == id) return true;
    return false;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
};

}  // namespace rqvt
