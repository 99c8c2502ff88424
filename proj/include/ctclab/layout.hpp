// Copyright 2026 The ctclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "ctclab/errors.hpp"

namespace ctclab {

/// Ordered list of named subsystems with their dimensions.
///
/// Basis indices are big-endian: subsystem 0 is the most significant digit,
/// so the composite index is sum_i b_i * prod_{j>i} dims[j]. An empty layout
/// is the one-dimensional scalar space (used as the codomain of bras).
class SubsystemLayout {
 public:
  SubsystemLayout() = default;

  SubsystemLayout(std::vector<std::string> labels, std::vector<std::size_t> dims)
      : labels_(std::move(labels)), dims_(std::move(dims)) {
    if (labels_.size() != dims_.size()) {
      throw DimensionError("layout has " + std::to_string(labels_.size()) + " labels but " +
                           std::to_string(dims_.size()) + " dims");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i].empty()) throw LabelError("empty subsystem label");
      if (!seen.insert(labels_[i]).second) {
        throw LabelError("duplicate subsystem label '" + labels_[i] + "'");
      }
      if (dims_[i] < 2) {
        throw DimensionError("subsystem '" + labels_[i] + "' has dimension " +
                             std::to_string(dims_[i]) + " (must be >= 2)");
      }
    }
  }

  static SubsystemLayout qubits(std::vector<std::string> labels) {
    std::vector<std::size_t> dims(labels.size(), 2);
    return SubsystemLayout(std::move(labels), std::move(dims));
  }
  static SubsystemLayout qubits(std::initializer_list<std::string> labels) {
    return qubits(std::vector<std::string>(labels));
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  std::size_t total_dim() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  }

  bool contains(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw LabelError("unknown subsystem label '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::size_t dim_of(const std::string& label) const { return dims_[index_of(label)]; }

  /// Concatenation, this layout's subsystems first.
  SubsystemLayout concat(const SubsystemLayout& other) const {
    for (const auto& l : other.labels_) {
      if (contains(l)) throw LabelError("label collision on '" + l + "'");
    }
    auto labels = labels_;
    auto dims = dims_;
    labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
    dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
    return SubsystemLayout(std::move(labels), std::move(dims));
  }

  /// Sub-layout in the order given by `labels`.
  SubsystemLayout select(const std::vector<std::string>& labels) const {
    std::vector<std::size_t> dims;
    dims.reserve(labels.size());
    for (const auto& l : labels) dims.push_back(dim_of(l));
    return SubsystemLayout(labels, std::move(dims));
  }

  SubsystemLayout relabeled(const std::string& from, const std::string& to) const {
    auto labels = labels_;
    labels[index_of(from)] = to;
    return SubsystemLayout(std::move(labels), dims_);
  }

  /// Row-major strides for the big-endian index convention.
  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(dims_.size(), 1);
    for (std::size_t i = dims_.size(); i-- > 1;) s[i - 1] = s[i] * dims_[i];
    return s;
  }

  friend bool operator==(const SubsystemLayout&, const SubsystemLayout&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> dims_;
};

inline std::string describe(const SubsystemLayout& layout) {
  std::string out = "(";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i) out += ",";
    out += layout.labels()[i] + ":" + std::to_string(layout.dims()[i]);
  }
  return out + ")";
}

}  // namespace ctclab
