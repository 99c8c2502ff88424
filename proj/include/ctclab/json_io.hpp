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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctclab/types.hpp"

// JSON layout shared by every matrix-valued type:
//   {"labels": [...], "dims": [...], "data": [[re, im], ...]}
// with matrices stored row-major. A LinearMap whose input layout differs from
// its output layout adds "in_labels"/"in_dims"; "labels"/"dims" always describe
// the output side. Doubles are written in shortest round-trip form, so values
// survive a write/read cycle bit for bit.

namespace ctclab::io {

using nlohmann::json;

namespace detail {

template <typename T>
T require(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) {
    throw FormatError(std::string("missing field \"") + field + "\"");
  }
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("field \"") + field + "\" has the wrong type: " + e.what());
  }
}

inline SubsystemLayout read_layout(const json& j, const char* labels_field, const char* dims_field) {
  auto labels = require<std::vector<std::string>>(j, labels_field);
  auto dims = require<std::vector<std::size_t>>(j, dims_field);
  try {
    return SubsystemLayout(std::move(labels), std::move(dims));
  } catch (const Error& e) {
    throw FormatError(std::string("field \"") + labels_field + "\": " + e.what());
  }
}

inline json write_data(const cplx* data, std::size_t n) {
  json arr = json::array();
  for (std::size_t i = 0; i < n; ++i) arr.push_back(json::array({data[i].real(), data[i].imag()}));
  return arr;
}

inline std::vector<cplx> read_data(const json& j, std::size_t expected) {
  if (!j.is_object() || !j.contains("data") || !j.at("data").is_array()) {
    throw FormatError("field \"data\" must be an array of [re, im] pairs");
  }
  const auto& arr = j.at("data");
  if (arr.size() != expected) {
    throw FormatError("field \"data\" has " + std::to_string(arr.size()) + " entries, expected " +
                      std::to_string(expected));
  }
  std::vector<cplx> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw FormatError("field \"data\" entry " + std::to_string(i) + " is not a [re, im] pair");
    }
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

inline json write_matrix(const CMatrix& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      arr.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  return arr;
}

inline CMatrix read_matrix(const json& j, Eigen::Index rows, Eigen::Index cols) {
  const auto flat = read_data(j, static_cast<std::size_t>(rows * cols));
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

}  // namespace detail

inline json to_json(const SubsystemLayout& layout) {
  return json{{"labels", layout.labels()}, {"dims", layout.dims()}};
}

inline json to_json(const StateVector& psi) {
  json j = to_json(psi.layout());
  j["data"] = detail::write_data(psi.amplitudes().data(), static_cast<std::size_t>(psi.amplitudes().size()));
  return j;
}

/// Hermitian operator over a layout (density matrices, fixed-point directions).
inline json to_json(const SubsystemLayout& layout, const CMatrix& m) {
  json j = to_json(layout);
  j["data"] = detail::write_matrix(m);
  return j;
}

inline json to_json(const DensityMatrix& rho) { return to_json(rho.layout(), rho.entries()); }

inline json to_json(const LinearMap& m) {
  json j = to_json(m.out_layout());
  if (!m.is_square()) {
    j["in_labels"] = m.in_layout().labels();
    j["in_dims"] = m.in_layout().dims();
  }
  j["data"] = detail::write_matrix(m.entries());
  return j;
}

inline StateVector state_from_json(const json& j) {
  auto layout = detail::read_layout(j, "labels", "dims");
  const auto flat = detail::read_data(j, layout.total_dim());
  CVector v(static_cast<Eigen::Index>(flat.size()));
  for (std::size_t i = 0; i < flat.size(); ++i) v(static_cast<Eigen::Index>(i)) = flat[i];
  return StateVector(std::move(layout), std::move(v));
}

inline DensityMatrix density_from_json(const json& j) {
  auto layout = detail::read_layout(j, "labels", "dims");
  const auto d = static_cast<Eigen::Index>(layout.total_dim());
  CMatrix m = detail::read_matrix(j, d, d);
  try {
    return DensityMatrix(std::move(layout), std::move(m));
  } catch (const InvariantError& e) {
    throw FormatError(std::string("field \"data\": ") + e.what());
  }
}

inline LinearMap map_from_json(const json& j) {
  auto out = detail::read_layout(j, "labels", "dims");
  auto in = j.contains("in_labels") ? detail::read_layout(j, "in_labels", "in_dims") : out;
  CMatrix m = detail::read_matrix(j, static_cast<Eigen::Index>(out.total_dim()),
                                  static_cast<Eigen::Index>(in.total_dim()));
  return LinearMap(std::move(in), std::move(out), std::move(m));
}

}  // namespace ctclab::io
