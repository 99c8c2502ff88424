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

#include <algorithm>
#include <functional>
#include <string>

#include "gtest/gtest.h"

#include "ctclab/ctclab.hpp"

using namespace ctclab;
using nlohmann::json;

namespace {

// Serializes to text and back, as a file would.
json through_text(const json& j) { return json::parse(j.dump()); }

SubsystemLayout random_layout(Rng& rng, const std::string& prefix) {
  const std::size_t n = 1 + rng.next() % 3;
  std::vector<std::string> labels;
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(prefix + std::to_string(i));
    dims.push_back(2 + rng.next() % 2);
  }
  return SubsystemLayout(labels, dims);
}

bool has_message(const std::function<void()>& f, const std::string& needle) {
  try {
    f();
  } catch (const FormatError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST(JsonRoundTrip, states_are_bit_exact) {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto psi = random_state(random_layout(rng, "s"), rng);
    const auto back = io::state_from_json(through_text(io::to_json(psi)));
    EXPECT_EQ(back.layout(), psi.layout());
    EXPECT_TRUE(back.amplitudes() == psi.amplitudes());
  }
}

TEST(JsonRoundTrip, densities_are_bit_exact) {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rho = random_density(random_layout(rng, "r"), rng);
    const auto back = io::density_from_json(through_text(io::to_json(rho)));
    EXPECT_EQ(back.layout(), rho.layout());
    EXPECT_TRUE(back.entries() == rho.entries());
  }
}

TEST(JsonRoundTrip, maps_are_bit_exact) {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = random_layout(rng, "i");
    const auto out = trial % 2 ? in : random_layout(rng, "o");
    const LinearMap m(in, out,
                      random_ginibre(static_cast<Eigen::Index>(out.total_dim()),
                                     static_cast<Eigen::Index>(in.total_dim()), rng));
    const auto back = io::map_from_json(through_text(io::to_json(m)));
    EXPECT_EQ(back.in_layout(), m.in_layout());
    EXPECT_EQ(back.out_layout(), m.out_layout());
    EXPECT_TRUE(back.entries() == m.entries());
  }
}

TEST(JsonRoundTrip, scenarios_and_superoperators) {
  Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    pctc::WormholeScenario s{random_unitary(SubsystemLayout::qubits({"B", "C1"}), rng), rng.bit() == 1,
                             kAllBellKinds[rng.next() % 4]};
    const auto back = pctc::scenario_from_json(through_text(pctc::to_json(s)));
    EXPECT_TRUE(back.interaction.entries() == s.interaction.entries());
    EXPECT_EQ(back.flip, s.flip);
    EXPECT_EQ(back.bell, s.bell);
    EXPECT_EQ(back.entering, s.entering);
    EXPECT_EQ(back.emerged, s.emerged);

    const auto n = deutsch::build_ctc_map(s.interaction, random_density(SubsystemLayout::qubits({"e"}), rng),
                                          deutsch::FeedbackSlot::entering);
    const auto n2 = deutsch::superoperator_from_json(through_text(deutsch::to_json(n)));
    EXPECT_EQ(n2.dim(), n.dim());
    EXPECT_TRUE(n2.matrix() == n.matrix());
  }
}

TEST(JsonRoundTrip, layout_order_is_kept) {
  const auto j = io::to_json(StateVector::basis(SubsystemLayout({"z", "a"}, {3, 2}), 4));
  EXPECT_EQ(j.at("labels"), json({"z", "a"}));
  EXPECT_EQ(j.at("dims"), json({3, 2}));
  EXPECT_EQ(j.at("data").size(), 6u);
  EXPECT_EQ(j.at("data")[4], json({1.0, 0.0}));
}

TEST(JsonErrors, name_the_offending_field) {
  const json good = io::to_json(StateVector::basis(SubsystemLayout::qubits({"q"}), 0));
  auto without = [&](const char* field) {
    json j = good;
    j.erase(field);
    return j;
  };
  EXPECT_TRUE(has_message([&] { io::state_from_json(without("labels")); }, "labels"));
  EXPECT_TRUE(has_message([&] { io::state_from_json(without("dims")); }, "dims"));
  EXPECT_TRUE(has_message([&] { io::state_from_json(without("data")); }, "data"));

  json wrong_type = good;
  wrong_type["dims"] = "two";
  EXPECT_TRUE(has_message([&] { io::state_from_json(wrong_type); }, "dims"));

  json short_data = good;
  short_data["data"].erase(1);
  EXPECT_TRUE(has_message([&] { io::state_from_json(short_data); }, "data"));

  json bad_pair = good;
  bad_pair["data"][0] = json::array({1.0});
  EXPECT_TRUE(has_message([&] { io::state_from_json(bad_pair); }, "data"));

  json duplicate = io::to_json(StateVector::basis(SubsystemLayout::qubits({"a", "b"}), 0));
  duplicate["labels"] = json({"a", "a"});
  EXPECT_TRUE(has_message([&] { io::state_from_json(duplicate); }, "labels"));

  EXPECT_THROW(io::state_from_json(json::array()), FormatError);
}

TEST(JsonErrors, invalid_density_is_rejected) {
  json j = io::to_json(DensityMatrix::maximally_mixed(SubsystemLayout::qubits({"q"})));
  j["data"][0] = json::array({2.0, 0.0});
  EXPECT_TRUE(has_message([&] { io::density_from_json(j); }, "data"));
}

TEST(JsonErrors, scenario_fields) {
  json j = pctc::to_json(pctc::paper_scenario());
  json no_interaction = j;
  no_interaction.erase("interaction");
  EXPECT_TRUE(has_message([&] { pctc::scenario_from_json(no_interaction); }, "interaction"));
  json bad_flip = j;
  bad_flip["flip"] = 1;
  EXPECT_TRUE(has_message([&] { pctc::scenario_from_json(bad_flip); }, "flip"));
  json bad_bell = j;
  bad_bell["bell"] = "chi";
  EXPECT_THROW(pctc::scenario_from_json(bad_bell), FormatError);
  json bad_roles = j;
  bad_roles["roles"].erase("emerged");
  EXPECT_TRUE(has_message([&] { pctc::scenario_from_json(bad_roles); }, "emerged"));
  json non_unitary = j;
  non_unitary["interaction"]["data"][0] = json::array({2.0, 0.0});
  EXPECT_TRUE(has_message([&] { pctc::scenario_from_json(non_unitary); }, "interaction"));
}

TEST(Reports, signal_json_and_csv) {
  const auto r = experiments::run_signalling(experiments::Bitstring::parse("01"), experiments::Model::pctc, 9);
  const auto j = io::to_json(r);
  EXPECT_EQ(j.at("model"), "PCTC");
  EXPECT_EQ(j.at("sent"), "01");
  EXPECT_EQ(j.at("decoded"), "01");
  EXPECT_EQ(j.at("error_count"), 0);
  const auto csv = io::to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,sent,decoded,p_zero,acceptance_prob");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Reports, paradox_csv_has_one_row_per_trial) {
  const auto r = experiments::run_paradox(50, experiments::Bitstring::parse("10"), 3);
  const auto csv = io::to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,alice_bit,mask,oscar_bit,bell_outcome,accepted");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 51);
  const auto j = io::to_json(r);
  EXPECT_EQ(j.at("theorem"), "10");
  EXPECT_EQ(j.at("acceptance_rate_nonmessage"), 0.0);
}

TEST(Reports, identical_runs_serialize_identically) {
  const auto a = io::to_json(experiments::run_paradox(300, experiments::Bitstring::parse("1101"), 77, 1)).dump();
  const auto b = io::to_json(experiments::run_paradox(300, experiments::Bitstring::parse("1101"), 77, 2)).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(io::to_json(experiments::compare_models(5)).dump(), io::to_json(experiments::compare_models(5)).dump());
}
