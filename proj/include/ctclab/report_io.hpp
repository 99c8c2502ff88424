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

#include <iomanip>
#include <ios>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ctclab/deutsch.hpp"
#include "ctclab/experiments.hpp"
#include "ctclab/json_io.hpp"

namespace ctclab::io {

namespace detail {

// Full-precision decimal for CSV cells.
inline std::string exact(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace detail

inline json to_json(const experiments::SignalReport& r) {
  json bits = json::array();
  for (const auto& b : r.per_bit) {
    bits.push_back({{"sent", b.sent},
                    {"decoded", b.decoded},
                    {"p_zero", b.p_zero},
                    {"acceptance_prob", b.acceptance_prob ? json(*b.acceptance_prob) : json(nullptr)}});
  }
  return json{{"model", std::string(experiments::to_string(r.model))},
              {"seed", r.seed},
              {"sent", r.sent.to_string()},
              {"decoded", r.decoded.to_string()},
              {"error_count", r.error_count},
              {"per_bit", bits}};
}

inline json to_json(const experiments::ParadoxReport& r) {
  json trials = json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"index", t.index},
                      {"alice_bit", t.alice_bit},
                      {"mask", t.mask},
                      {"oscar_bit", t.oscar_bit},
                      {"bell_outcome", std::string(to_string(t.bell_outcome))},
                      {"accepted", t.accepted},
                      {"acceptance_prob", t.acceptance_prob}});
  }
  return json{{"seed", r.seed},
              {"theorem", r.theorem.to_string()},
              {"alice_bits", r.alice_bits.to_string()},
              {"message_mask", r.message_mask.to_string()},
              {"oscar_book", r.oscar_book.to_string()},
              {"accepted", r.accepted},
              {"post_selected_book", r.post_selected_book.to_string()},
              {"message_count", r.message_count},
              {"nonmessage_count", r.nonmessage_count},
              {"acceptance_rate_message", r.acceptance_rate_message},
              {"acceptance_rate_nonmessage", r.acceptance_rate_nonmessage},
              {"trials", trials}};
}

inline json to_json(const experiments::ModelComparison& c) {
  json pctc_rows = json::array();
  for (const auto& row : c.pctc) {
    pctc_rows.push_back({{"flip", row.flip},
                         {"state", to_json(row.state)},
                         {"acceptance_prob", row.acceptance_prob},
                         {"overlap_golden", row.overlap_golden},
                         {"alice_overlap_plus", row.alice_overlap_plus},
                         {"alice_overlap_minus", row.alice_overlap_minus}});
  }
  json deutsch_rows = json::array();
  for (const auto& row : c.deutsch) {
    deutsch_rows.push_back({{"flip", row.flip},
                            {"output", to_json(row.output)},
                            {"ctc_state", to_json(row.ctc_state)},
                            {"ctc_entropy", row.ctc_entropy},
                            {"ctc_residual", row.ctc_residual},
                            {"alice_distance_from_mixed", row.alice_distance_from_mixed}});
  }
  return json{{"seed", c.seed},
              {"pctc", pctc_rows},
              {"deutsch", deutsch_rows},
              {"pctc_alice_flip_distance", c.pctc_alice_flip_distance},
              {"deutsch_flip_distance", c.deutsch_flip_distance}};
}

inline std::string to_csv(const experiments::SignalReport& r) {
  std::ostringstream os;
  os << "index,sent,decoded,p_zero,acceptance_prob\n";
  for (std::size_t i = 0; i < r.per_bit.size(); ++i) {
    const auto& b = r.per_bit[i];
    os << i << ',' << b.sent << ',' << b.decoded << ',' << detail::exact(b.p_zero) << ','
       << (b.acceptance_prob ? detail::exact(*b.acceptance_prob) : std::string()) << '\n';
  }
  return os.str();
}

/// Per-trial rows: index, alice_bit, mask, oscar_bit, bell_outcome, accepted.
inline std::string to_csv(const experiments::ParadoxReport& r) {
  std::ostringstream os;
  os << "index,alice_bit,mask,oscar_bit,bell_outcome,accepted\n";
  for (const auto& t : r.trials) {
    os << t.index << ',' << t.alice_bit << ',' << t.mask << ',' << t.oscar_bit << ','
       << to_string(t.bell_outcome) << ',' << (t.accepted ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace ctclab::io
