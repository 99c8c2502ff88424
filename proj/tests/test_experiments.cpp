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

#include <cmath>
#include <set>

#include "gtest/gtest.h"

#include "ctclab/experiments.hpp"
#include "oracles.hpp"

using namespace ctclab;
using namespace ctclab::experiments;

namespace {

// Born probability of the resource outcome for a trial in which Alice read
// `alice_bit` and Bob flips iff `book_bit` is 1, from the 16-amplitude oracle.
double oracle_acceptance(int alice_bit, int book_bit) {
  const double s = alice_bit ? -1.0 : 1.0;
  CVector a(2);
  a << oracle::kInvSqrt2, s * oracle::kInvSqrt2;
  CVector pair = CVector::Zero(4);
  pair(1) = pair(2) = oracle::kInvSqrt2;
  CVector b = CVector::Zero(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) b(j) += std::conj(a(i)) * pair(i * 2 + j);
  b.normalize();
  CVector input(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) input(i * 2 + j) = a(i) * b(j);
  return oracle::teleport_circuit(input, gates::cnot(0).entries(), book_bit == 1, 0).probs[0];
}

}  // namespace

TEST(Bitstring, parse_and_print) {
  const auto b = Bitstring::parse("0110");
  EXPECT_EQ(b.size(), 4u);
  EXPECT_EQ(b.to_string(), "0110");
  EXPECT_THROW(Bitstring::parse("01a"), FormatError);
  EXPECT_EQ(hamming_distance(b, Bitstring::parse("1111")), 2u);
  EXPECT_TRUE(is_subsequence(Bitstring::parse("11"), b));
  EXPECT_FALSE(is_subsequence(Bitstring::parse("000"), b));
}

TEST(Models, names) {
  EXPECT_EQ(model_from_string("pctc"), Model::pctc);
  EXPECT_EQ(model_from_string("DEUTSCH"), Model::deutsch);
  EXPECT_THROW(model_from_string("novikov"), FormatError);
}

// ---------------------------------------------------------------------------
// Signalling
// ---------------------------------------------------------------------------

TEST(Signalling, pctc_delivers_every_bit) {
  const auto r = run_signalling(Bitstring::parse("0110"), Model::pctc, 1);
  EXPECT_EQ(r.decoded.to_string(), "0110");
  EXPECT_EQ(r.error_count, 0u);
  for (const auto& b : r.per_bit) {
    EXPECT_NEAR(b.p_zero, b.sent ? 0.0 : 1.0, 1e-12);
    ASSERT_TRUE(b.acceptance_prob.has_value());
    EXPECT_NEAR(*b.acceptance_prob, 0.25, 1e-12);
  }
}

TEST(Signalling, pctc_random_messages) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto msg = Bitstring::random(1 + rng.next() % 200, rng);
    EXPECT_EQ(run_signalling(msg, Model::pctc, rng.next()).decoded, msg);
  }
}

TEST(Signalling, single_bit_overlap_with_golden) {
  for (bool flip : {false, true}) {
    const auto out = pctc::wormhole_evolve_circuit(shared_pair(), pctc::paper_scenario(flip));
    EXPECT_GE(phase_invariant_overlap(out.state, golden_output(flip)), 1.0 - 1e-12);
  }
}

TEST(Signalling, deutsch_is_a_fair_coin) {
  Rng rng(12);
  const auto msg = Bitstring::random(10000, rng);
  const auto r = run_signalling(msg, Model::deutsch, 99);
  for (const auto& b : r.per_bit) EXPECT_NEAR(b.p_zero, 0.5, 1e-10);
  const double rate = static_cast<double>(r.error_count) / 10000.0;
  EXPECT_LE(std::abs(rate - 0.5), oracle::three_sigma(0.5, 10000));
  EXPECT_FALSE(r.per_bit[0].acceptance_prob.has_value());
}

TEST(Signalling, deterministic_and_job_invariant) {
  Rng rng(13);
  const auto msg = Bitstring::random(500, rng);
  for (auto model : {Model::pctc, Model::deutsch}) {
    const auto a = run_signalling(msg, model, 5, 1);
    const auto b = run_signalling(msg, model, 5, 1);
    const auto c = run_signalling(msg, model, 5, 4);
    EXPECT_EQ(a.decoded, b.decoded);
    EXPECT_EQ(a.decoded, c.decoded);
  }
  EXPECT_NE(run_signalling(msg, Model::deutsch, 5).decoded, run_signalling(msg, Model::deutsch, 6).decoded);
}

TEST(Signalling, empty_message_rejected) {
  EXPECT_THROW(run_signalling(Bitstring{}, Model::pctc, 1), InvariantError);
}

// ---------------------------------------------------------------------------
// Paradox
// ---------------------------------------------------------------------------

TEST(Paradox, per_trial_probabilities_match_oracle) {
  // Message trials: the book bit equals Alice's bit.
  EXPECT_NEAR(oracle_acceptance(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(oracle_acceptance(1, 1), 0.5, 1e-12);
  // Edited trials never survive.
  EXPECT_NEAR(oracle_acceptance(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(oracle_acceptance(1, 0), 0.0, 1e-12);

  const auto r = run_paradox(300, Bitstring::parse("1011"), 21);
  for (const auto& t : r.trials) {
    EXPECT_NEAR(t.acceptance_prob, oracle_acceptance(t.alice_bit, t.oscar_bit), 1e-12);
  }
}

TEST(Paradox, embedding) {
  const auto [mask, placed] = embed_theorem(Bitstring::parse("0011010"), Bitstring::parse("101"));
  EXPECT_EQ(mask.to_string(), "0010110");
  EXPECT_EQ(placed, 3u);
  // After a full copy the editor starts the theorem again.
  const auto cyclic = embed_theorem(Bitstring::parse("1001101"), Bitstring::parse("10"));
  EXPECT_EQ(cyclic.first.to_string(), "1101011");
  EXPECT_EQ(cyclic.second, 5u);
  const auto partial = embed_theorem(Bitstring::parse("000"), Bitstring::parse("1"));
  EXPECT_EQ(partial.second, 0u);
}

TEST(Paradox, post_selection_keeps_only_the_theorem) {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto theorem = Bitstring::random(16, rng);
    const auto r = run_paradox(1000, theorem, rng.next());
    EXPECT_EQ(r.acceptance_rate_nonmessage, 0.0);
    EXPECT_TRUE(is_subsequence(theorem, r.post_selected_book));
    EXPECT_GE(r.message_count, theorem.size());
    for (std::size_t i = 0; i < r.trials.size(); ++i) {
      const auto& t = r.trials[i];
      EXPECT_EQ(t.oscar_bit, t.alice_bit ^ (1 - t.mask));
      if (t.accepted) {
        EXPECT_EQ(t.mask, 1);
        EXPECT_EQ(t.oscar_bit, t.alice_bit);
      }
    }
    // The message bits of the book spell the theorem over and over.
    std::size_t k = 0;
    for (const auto& t : r.trials) {
      if (t.mask) {
        EXPECT_EQ(t.oscar_bit, theorem[k++ % theorem.size()]);
      }
    }
    EXPECT_EQ(k, r.message_count);
  }
}

TEST(Paradox, message_acceptance_rate) {
  Rng rng(23);
  const auto theorem = Bitstring::random(64, rng);
  const auto r = run_paradox(10000, theorem, 24, 4);
  ASSERT_GE(r.message_count, 2000u);
  const double p = oracle_acceptance(0, 0);
  EXPECT_LE(std::abs(r.acceptance_rate_message - p), oracle::three_sigma(p, r.message_count));
  EXPECT_EQ(r.acceptance_rate_nonmessage, 0.0);
  std::set<std::size_t> accepted(r.accepted.begin(), r.accepted.end());
  for (const auto& t : r.trials) EXPECT_EQ(accepted.count(t.index) == 1, t.accepted);
}

TEST(Paradox, deterministic_and_job_invariant) {
  const auto theorem = Bitstring::parse("110100111");
  const auto a = run_paradox(200, theorem, 31, 1);
  const auto b = run_paradox(200, theorem, 31, 3);
  EXPECT_EQ(a.alice_bits, b.alice_bits);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.post_selected_book, b.post_selected_book);
}

TEST(Paradox, setup_errors) {
  EXPECT_THROW(run_paradox(10, Bitstring{}, 1), ParadoxSetupError);
  EXPECT_THROW(run_paradox(3, Bitstring::parse("0101"), 1), ParadoxSetupError);
  // Four random bits essentially never hold a 4-bit theorem plus anything;
  // look for a seed where embedding fails and check the placed count.
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 50 && !seen; ++seed) {
    try {
      run_paradox(4, Bitstring::parse("1111"), seed);
    } catch (const ParadoxSetupError& e) {
      EXPECT_LT(e.placed(), 4u);
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

TEST(Compare, models_disagree_on_signalling) {
  const auto c = compare_models(3);
  ASSERT_EQ(c.pctc.size(), 2u);
  ASSERT_EQ(c.deutsch.size(), 2u);
  EXPECT_NEAR(c.pctc[0].alice_overlap_plus, 1.0, 1e-12);
  EXPECT_NEAR(c.pctc[1].alice_overlap_minus, 1.0, 1e-12);
  for (const auto& row : c.pctc) {
    EXPECT_NEAR(row.overlap_golden, 1.0, 1e-12);
    EXPECT_NEAR(row.acceptance_prob, 0.25, 1e-12);
  }
  EXPECT_NEAR(c.pctc_alice_flip_distance, 1.0, 1e-12);
  for (const auto& row : c.deutsch) {
    EXPECT_NEAR(row.ctc_entropy, 1.0, 1e-9);
    EXPECT_LE(row.ctc_residual, 1e-10);
    EXPECT_LE(row.alice_distance_from_mixed, 1e-10);
  }
  EXPECT_LE(c.deutsch_flip_distance, 1e-10);
}
