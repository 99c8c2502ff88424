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
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ctclab/deutsch.hpp"
#include "ctclab/pctc.hpp"
#include "ctclab/qcore.hpp"

namespace ctclab::experiments {

enum class Model { pctc, deutsch };

inline std::string_view to_string(Model m) { return m == Model::pctc ? "PCTC" : "DEUTSCH"; }

inline Model model_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "pctc" || lower == "p-ctc") return Model::pctc;
  if (lower == "deutsch") return Model::deutsch;
  throw FormatError("unknown model '" + std::string(s) + "' (expected pctc or deutsch)");
}

class Bitstring {
 public:
  Bitstring() = default;
  explicit Bitstring(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
      if (b > 1) throw InvariantError("bit values must be 0 or 1");
    }
  }

  static Bitstring parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
      if (c != '0' && c != '1') {
        throw FormatError("bitstring may only contain '0' and '1', got '" + std::string(1, c) + "'");
      }
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return Bitstring(std::move(bits));
  }

  static Bitstring random(std::size_t n, Rng& rng) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    return Bitstring(std::move(bits));
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i]; }
  void push_back(int b) {
    if (b != 0 && b != 1) throw InvariantError("bit values must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  std::string to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
    return s;
  }

  friend bool operator==(const Bitstring&, const Bitstring&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

inline std::size_t hamming_distance(const Bitstring& a, const Bitstring& b) {
  if (a.size() != b.size()) throw DimensionError("Hamming distance of bitstrings of different length");
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

/// True when `needle` occurs in `hay` as an ordered (not necessarily
/// contiguous) subsequence.
inline bool is_subsequence(const Bitstring& needle, const Bitstring& hay) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < hay.size() && j < needle.size(); ++i) {
    if (hay[i] == needle[j]) ++j;
  }
  return j == needle.size();
}

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index writes only
/// its own output slot, so results do not depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  const std::size_t chunk = (n + jobs - 1) / jobs;
  for (unsigned t = 0; t < jobs; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline int decode_diagonal(int outcome) { return outcome; }  // |+> -> 0, |-> -> 1

/// Index drawn with probability proportional to `weights`; zero-weight
/// entries are never returned.
template <std::size_t N>
std::size_t sample_index(const std::array<double, N>& weights, double u01) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = u01 * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < N; ++k) {
    if (weights[k] <= 0.0) continue;
    last = k;
    acc += weights[k];
    if (target < acc) return k;
  }
  return last;
}

}  // namespace detail

/// (|0> + sign |1>)/sqrt2 (x) |0> over (A, B): the anti-correlated pair after
/// the CNOT wormhole, sign = - when Bob flips.
inline StateVector golden_output(bool flip) {
  const double s = 1.0 / std::numbers::sqrt2;
  return StateVector(SubsystemLayout::qubits({"A", "B"}),
                     Eigen::Vector4cd(s, 0, flip ? -s : s, 0));
}

inline StateVector shared_pair() { return bell_state(BellKind::phi_plus_paper, "A", "B"); }

// ---------------------------------------------------------------------------
// Signalling to the past
// ---------------------------------------------------------------------------

struct BitOutcome {
  int sent;
  int decoded;
  double p_zero;                          // probability Alice reads |+>
  std::optional<double> acceptance_prob;  // P-CTC only
};

struct SignalReport {
  Model model;
  std::uint64_t seed;
  Bitstring sent;
  Bitstring decoded;
  std::vector<BitOutcome> per_bit;
  std::size_t error_count;
};

/// For every message bit: a fresh anti-correlated pair, Bob flips iff the bit
/// is 1, the pair is evolved under `model`, and Alice reads her qubit in the
/// diagonal basis. Bit i uses the sub-seed derive_seed(seed, i).
inline SignalReport run_signalling(const Bitstring& message, Model model, std::uint64_t seed,
                                   unsigned jobs = 1) {
  if (message.empty()) throw InvariantError("message must contain at least one bit");
  const auto basis = QubitBasis::diagonal();

  // Evolution depends only on the bit value, so each branch is solved once.
  std::array<std::optional<StateVector>, 2> pure_out;
  std::array<std::optional<DensityMatrix>, 2> mixed_out;
  std::array<std::array<double, 2>, 2> p{};
  std::array<double, 2> acceptance{};
  for (int flip = 0; flip < 2; ++flip) {
    const auto s = pctc::paper_scenario(flip == 1);
    if (model == Model::pctc) {
      auto out = pctc::wormhole_evolve_circuit(shared_pair(), s);
      p[flip] = born_probabilities(out.state, "A", basis);
      acceptance[flip] = out.acceptance_prob;
      pure_out[flip] = std::move(out.state);
    } else {
      auto out = deutsch::deutsch_evolve(DensityMatrix::from_pure(shared_pair()), s);
      p[flip] = born_probabilities(out, "A", basis);
      mixed_out[flip] = std::move(out);
    }
  }

  std::vector<BitOutcome> per_bit(message.size());
  detail::parallel_for(message.size(), jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const int bit = message[i];
    int outcome = 0;
    if (model == Model::pctc) {
      outcome = measure_projective(*pure_out[bit], "A", basis, rng).outcome;
    } else {
      outcome = rng.uniform() < p[bit][0] ? 0 : 1;
    }
    per_bit[i] = BitOutcome{bit, detail::decode_diagonal(outcome), p[bit][0],
                            model == Model::pctc ? std::optional<double>(acceptance[bit]) : std::nullopt};
  });

  Bitstring decoded;
  for (const auto& b : per_bit) decoded.push_back(b.decoded);
  const auto errors = hamming_distance(message, decoded);
  return SignalReport{model, seed, message, std::move(decoded), std::move(per_bit), errors};
}

// ---------------------------------------------------------------------------
// Unproven-theorem paradox
// ---------------------------------------------------------------------------

struct ParadoxTrial {
  std::size_t index;
  int alice_bit;
  int mask;       // 1 = message bit (left alone), 0 = flipped by the editor
  int oscar_bit;
  BellKind bell_outcome;
  bool accepted;
  double acceptance_prob;  // Born probability of the resource Bell outcome
};

struct ParadoxReport {
  std::uint64_t seed;
  Bitstring theorem;
  Bitstring alice_bits;
  Bitstring message_mask;
  Bitstring oscar_book;
  std::vector<std::size_t> accepted;
  Bitstring post_selected_book;
  std::size_t message_count;
  std::size_t nonmessage_count;
  double acceptance_rate_message;
  double acceptance_rate_nonmessage;
  std::vector<ParadoxTrial> trials;
};

/// Greedy left-to-right embedding: position i is a message bit when it
/// matches the next still-needed theorem bit. Once the theorem is complete
/// the editor starts over, so the message bits spell the theorem repeatedly.
/// Returns the mask and the number of theorem bits placed over all copies.
inline std::pair<Bitstring, std::size_t> embed_theorem(const Bitstring& data, const Bitstring& theorem) {
  Bitstring mask;
  std::size_t placed = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool take = !theorem.empty() && data[i] == theorem[placed % theorem.size()];
    mask.push_back(take ? 1 : 0);
    if (take) ++placed;
  }
  return {std::move(mask), placed};
}

/// Simulates the editor's scheme with the teleportation circuit. Per trial:
/// Alice measures her half of a fresh pair in the diagonal basis (stream 0 of
/// the trial's sub-seed); once all data is known the editor chooses message
/// bits greedily and flips the rest; Bob flips his qubit iff the book bit is 1;
/// the teleporter's Bell measurement is sampled from its full four-outcome
/// distribution (stream 1) and the trial is accepted iff it returns the
/// resource state.
inline ParadoxReport run_paradox(std::size_t n_trials, const Bitstring& theorem, std::uint64_t seed,
                                 unsigned jobs = 1) {
  if (theorem.empty()) throw ParadoxSetupError("theorem must contain at least one bit", 0);
  if (n_trials < theorem.size()) {
    throw ParadoxSetupError("need at least " + std::to_string(theorem.size()) +
                                " trials to embed the theorem, got " + std::to_string(n_trials),
                            0);
  }
  const auto basis = QubitBasis::diagonal();
  const StateVector pair = shared_pair();

  std::vector<int> alice(n_trials);
  std::vector<std::optional<StateVector>> conditional(n_trials);
  detail::parallel_for(n_trials, jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i, 0));
    auto m = measure_projective(pair, "A", basis, rng);
    alice[i] = detail::decode_diagonal(m.outcome);
    conditional[i] = std::move(m.post_state);
  });

  Bitstring alice_bits;
  for (int b : alice) alice_bits.push_back(b);
  auto [mask, placed] = embed_theorem(alice_bits, theorem);
  if (placed < theorem.size()) {
    throw ParadoxSetupError("only " + std::to_string(placed) + " of " +
                                std::to_string(theorem.size()) +
                                " theorem bits could be placed in the random data",
                            placed);
  }
  Bitstring oscar_book;
  for (std::size_t i = 0; i < n_trials; ++i) oscar_book.push_back(alice_bits[i] ^ (1 - mask[i]));

  std::vector<ParadoxTrial> trials(n_trials);
  detail::parallel_for(n_trials, jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i, 1));
    const auto s = pctc::paper_scenario(oscar_book[i] == 1);
    auto dist = pctc::circuit_bell_distribution(*conditional[i], s);
    for (auto& q : dist) {
      if (q < tol::zero_norm * tol::zero_norm) q = 0.0;
    }
    const BellKind outcome = kAllBellKinds[detail::sample_index(dist, rng.uniform())];
    trials[i] = ParadoxTrial{i,         alice_bits[i], mask[i], oscar_book[i], outcome,
                             outcome == s.bell, dist[static_cast<std::size_t>(s.bell)]};
  });

  ParadoxReport r{seed, theorem, alice_bits, mask, oscar_book, {}, {}, 0, 0, 0.0, 0.0, std::move(trials)};
  std::size_t accepted_message = 0;
  std::size_t accepted_nonmessage = 0;
  for (const auto& t : r.trials) {
    (t.mask ? r.message_count : r.nonmessage_count)++;
    if (!t.accepted) continue;
    (t.mask ? accepted_message : accepted_nonmessage)++;
    r.accepted.push_back(t.index);
    r.post_selected_book.push_back(t.oscar_bit);
  }
  r.acceptance_rate_message =
      r.message_count ? static_cast<double>(accepted_message) / static_cast<double>(r.message_count) : 0.0;
  r.acceptance_rate_nonmessage = r.nonmessage_count ? static_cast<double>(accepted_nonmessage) /
                                                          static_cast<double>(r.nonmessage_count)
                                                    : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Model comparison
// ---------------------------------------------------------------------------

struct PctcRow {
  bool flip;
  StateVector state;
  double acceptance_prob;
  double overlap_golden;
  double alice_overlap_plus;   // sqrt(<+|rho_A|+>)
  double alice_overlap_minus;  // sqrt(<-|rho_A|->)
};

struct DeutschRow {
  bool flip;
  DensityMatrix output;
  DensityMatrix ctc_state;
  double ctc_entropy;
  double ctc_residual;
  double alice_distance_from_mixed;
};

struct ModelComparison {
  std::uint64_t seed;
  std::vector<PctcRow> pctc;
  std::vector<DeutschRow> deutsch;
  double pctc_alice_flip_distance;
  double deutsch_flip_distance;
};

/// Both models on the canonical scenario, for both flip values. The seed is
/// recorded but nothing here is stochastic.
inline ModelComparison compare_models(std::uint64_t seed) {
  ModelComparison c{seed, {}, {}, 0.0, 0.0};
  const auto basis = QubitBasis::diagonal();
  const auto mixed_qubit = DensityMatrix::maximally_mixed(SubsystemLayout::qubits({"A"}));
  std::vector<DensityMatrix> alice_pctc;
  for (bool flip : {false, true}) {
    const auto s = pctc::paper_scenario(flip);
    auto out = pctc::wormhole_evolve_circuit(shared_pair(), s);
    const auto p = born_probabilities(out.state, "A", basis);
    alice_pctc.push_back(partial_trace(DensityMatrix::from_pure(out.state), {"A"}));
    const double golden = phase_invariant_overlap(out.state, golden_output(flip));
    c.pctc.push_back(PctcRow{flip, out.state, out.acceptance_prob, golden, std::sqrt(p[0]), std::sqrt(p[1])});

    auto sol = deutsch::deutsch_solve(DensityMatrix::from_pure(shared_pair()), s);
    const double residual = deutsch::fixed_point_residual(sol.map, sol.ctc.state.entries());
    const double alice_dist = trace_distance(partial_trace(sol.output, {"A"}), mixed_qubit);
    c.deutsch.push_back(DeutschRow{flip, sol.output, sol.ctc.state, sol.ctc.entropy, residual, alice_dist});
  }
  c.pctc_alice_flip_distance = trace_distance(alice_pctc[0], alice_pctc[1]);
  c.deutsch_flip_distance = trace_distance(c.deutsch[0].output, c.deutsch[1].output);
  return c;
}

}  // namespace ctclab::experiments
