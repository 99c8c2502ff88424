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

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ctclab/deutsch.hpp"
#include "ctclab/experiments.hpp"
#include "ctclab/pctc.hpp"
#include "ctclab/report_io.hpp"

namespace ctclab::cli {

enum class Format { json, csv, table };

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitParadox = 3;

struct RunConfig {
  std::string command;
  std::string model = "pctc";
  std::string bits;
  std::size_t trials = 10000;
  std::size_t theorem_length = 64;
  std::optional<std::uint64_t> seed;
  std::string input_path;
  std::string out_path;
  std::string format = "table";
  std::string interaction = "cnot";
  std::string env = "maximally-mixed";
  std::string keep = "entering";
  unsigned jobs = 1;
};

/// Usage problem detected after flag parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline LinearMap named_interaction(const std::string& name) {
  if (name == "cnot") return gates::cnot(0);
  if (name == "cnot-reversed") return gates::cnot(1);
  if (name == "swap") return gates::swap();
  if (name == "identity") return gates::identity2();
  throw UsageError("unknown interaction '" + name + "' (cnot, cnot-reversed, swap, identity)");
}

inline DensityMatrix named_env(const std::string& name) {
  const auto layout = SubsystemLayout::qubits({"env"});
  const double s = 1.0 / std::numbers::sqrt2;
  if (name == "maximally-mixed") return DensityMatrix::maximally_mixed(layout);
  if (name == "zero") return DensityMatrix::from_pure(StateVector(layout, Eigen::Vector2cd(1, 0)));
  if (name == "one") return DensityMatrix::from_pure(StateVector(layout, Eigen::Vector2cd(0, 1)));
  if (name == "plus") return DensityMatrix::from_pure(StateVector(layout, Eigen::Vector2cd(s, s)));
  if (name == "minus") return DensityMatrix::from_pure(StateVector(layout, Eigen::Vector2cd(s, -s)));
  throw UsageError("unknown environment '" + name + "' (maximally-mixed, zero, one, plus, minus)");
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open input file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Scenario from --input (a scenario object or a bare interaction map) or from
/// the named interaction.
inline pctc::WormholeScenario scenario_from(const RunConfig& cfg) {
  if (cfg.input_path.empty()) {
    auto s = pctc::paper_scenario();
    s.interaction = named_interaction(cfg.interaction);
    return s;
  }
  const auto j = read_json_file(cfg.input_path);
  if (j.is_object() && j.contains("interaction")) return pctc::scenario_from_json(j);
  pctc::WormholeScenario s = pctc::paper_scenario();
  s.interaction = io::map_from_json(j);
  try {
    s.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("field \"data\": ") + e.what());
  }
  return s;
}

inline std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << (std::abs(v) < 5e-7 ? 0.0 : v);
  return os.str();
}

inline std::string fixed6(cplx z) {
  std::ostringstream os;
  const double im = std::abs(z.imag()) < 5e-7 ? 0.0 : z.imag();
  os << fixed6(z.real()) << (im < 0 ? "-" : "+") << fixed6(std::abs(im)) << "i";
  return os.str();
}

inline std::string amplitudes6(const CVector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fixed6(v(i));
  return s + "]";
}

inline std::string matrix6(const CMatrix& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    s += r ? "; " : "";
    for (Eigen::Index c = 0; c < m.cols(); ++c) s += (c ? ", " : "") + fixed6(m(r, c));
  }
  return s + "]";
}

inline std::string csv_cells(const CMatrix& m) {
  std::string s;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      s += "," + io::detail::exact(m(r, c).real()) + "," + io::detail::exact(m(r, c).imag());
    }
  }
  return s;
}

inline std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw UsageError("--seed (or CTCLAB_SEED) is required for '" + cfg.command + "'");
  return *cfg.seed;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline std::string cmd_demo_paper(const RunConfig& cfg, Format fmt) {
  const auto base = scenario_from(cfg);
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  std::ostringstream table;
  csv << "flip,acceptance_prob,overlap_golden";
  for (int i = 0; i < 4; ++i) csv << ",amp" << i << "_re,amp" << i << "_im";
  csv << '\n';
  table << "flip  acceptance  overlap_golden  state(A,B)\n";
  for (bool flip : {false, true}) {
    auto s = base;
    s.flip = flip;
    const auto out = pctc::wormhole_evolve_circuit(experiments::shared_pair(), s);
    const double overlap = phase_invariant_overlap(out.state, experiments::golden_output(flip));
    rows.push_back({{"flip", flip},
                    {"acceptance_prob", out.acceptance_prob},
                    {"overlap_golden", overlap},
                    {"state", io::to_json(out.state)}});
    csv << (flip ? 1 : 0) << ',' << io::detail::exact(out.acceptance_prob) << ','
        << io::detail::exact(overlap) << csv_cells(out.state.amplitudes().transpose()) << '\n';
    table << std::left << std::setw(6) << (flip ? "on" : "off") << std::setw(12)
          << fixed6(out.acceptance_prob) << std::setw(16) << fixed6(overlap)
          << amplitudes6(out.state.amplitudes()) << '\n';
  }
  if (fmt == Format::json) {
    return nlohmann::json{{"command", "demo-paper"}, {"scenario", pctc::to_json(base)}, {"rows", rows}}
               .dump(2) + "\n";
  }
  return fmt == Format::csv ? csv.str() : table.str();
}

inline std::string cmd_signal(const RunConfig& cfg, Format fmt) {
  const auto model = experiments::model_from_string(cfg.model);
  if (cfg.bits.empty()) throw UsageError("--bits is required for 'signal'");
  const auto message = experiments::Bitstring::parse(cfg.bits);
  const auto report = experiments::run_signalling(message, model, require_seed(cfg), cfg.jobs);
  if (fmt == Format::json) return io::to_json(report).dump(2) + "\n";
  if (fmt == Format::csv) return io::to_csv(report);
  std::ostringstream os;
  os << "model        " << experiments::to_string(report.model) << '\n'
     << "seed         " << report.seed << '\n'
     << "sent         " << report.sent.to_string() << '\n'
     << "decoded      " << report.decoded.to_string() << '\n'
     << "error_count  " << report.error_count << '\n'
     << "error_rate   " << fixed6(static_cast<double>(report.error_count) / static_cast<double>(report.sent.size()))
     << '\n';
  return os.str();
}

inline std::string cmd_paradox(const RunConfig& cfg, Format fmt) {
  const auto seed = require_seed(cfg);
  experiments::Bitstring theorem;
  if (!cfg.bits.empty()) {
    theorem = experiments::Bitstring::parse(cfg.bits);
  } else {
    Rng rng(derive_seed(seed, 0, 7));
    theorem = experiments::Bitstring::random(cfg.theorem_length, rng);
  }
  const auto report = experiments::run_paradox(cfg.trials, theorem, seed, cfg.jobs);
  if (fmt == Format::json) return io::to_json(report).dump(2) + "\n";
  if (fmt == Format::csv) return io::to_csv(report);
  std::ostringstream os;
  const bool found = experiments::is_subsequence(report.theorem, report.post_selected_book);
  os << "trials                      " << report.trials.size() << '\n'
     << "theorem bits                " << report.theorem.size() << '\n'
     << "message / non-message       " << report.message_count << " / " << report.nonmessage_count << '\n'
     << "accepted                    " << report.accepted.size() << '\n'
     << "acceptance rate (message)   " << fixed6(report.acceptance_rate_message) << '\n'
     << "acceptance rate (edited)    " << fixed6(report.acceptance_rate_nonmessage) << '\n'
     << "post-selected book          " << report.post_selected_book.to_string() << '\n'
     << "theorem found in book       " << (found ? "yes" : "no") << '\n';
  return os.str();
}

inline std::string cmd_fixed_point(const RunConfig& cfg, Format fmt) {
  const auto scenario = scenario_from(cfg);
  const auto env = named_env(cfg.env);
  deutsch::FeedbackSlot keep{};
  if (cfg.keep == "entering") {
    keep = deutsch::FeedbackSlot::entering;
  } else if (cfg.keep == "emerged") {
    keep = deutsch::FeedbackSlot::emerged;
  } else {
    throw UsageError("--keep must be 'entering' or 'emerged'");
  }
  const auto n = deutsch::build_ctc_map(scenario.interaction, env, keep);
  const auto set = deutsch::fixed_points(n);
  const auto best = deutsch::maximize_entropy(set);
  const double residual = deutsch::fixed_point_residual(n, best.state.entries());
  if (fmt == Format::json) {
    return nlohmann::json{{"command", "fixed-point"},
                          {"interaction", cfg.input_path.empty() ? cfg.interaction : cfg.input_path},
                          {"env", io::to_json(env)},
                          {"keep", cfg.keep},
                          {"superoperator", deutsch::to_json(n)},
                          {"fixed_set", deutsch::to_json(set)},
                          {"direction_count", set.directions.size()},
                          {"max_entropy_state", io::to_json(best.state)},
                          {"entropy", best.entropy},
                          {"residual", residual},
                          {"boundary", best.boundary}}
               .dump(2) + "\n";
  }
  if (fmt == Format::csv) {
    return "direction_count,entropy,residual,rho00_re,rho00_im,rho01_re,rho01_im,rho10_re,rho10_im,rho11_re,rho11_im\n" +
           std::to_string(set.directions.size()) + "," + io::detail::exact(best.entropy) + "," +
           io::detail::exact(residual) + csv_cells(best.state.entries()) + "\n";
  }
  std::ostringstream os;
  os << "fixed-point directions  " << set.directions.size() << '\n'
     << "base                    " << matrix6(set.base.entries()) << '\n'
     << "max-entropy state       " << matrix6(best.state.entries()) << '\n'
     << "entropy (bits)          " << fixed6(best.entropy) << '\n'
     << "residual                " << std::scientific << std::setprecision(3) << residual << '\n';
  return os.str();
}

inline std::string cmd_compare(const RunConfig& cfg, Format fmt) {
  const auto c = experiments::compare_models(cfg.seed.value_or(0));
  if (fmt == Format::json) return io::to_json(c).dump(2) + "\n";
  std::ostringstream os;
  if (fmt == Format::csv) {
    os << "model,flip,acceptance_prob,overlap_golden,alice_overlap_plus,alice_overlap_minus,ctc_entropy,ctc_residual,alice_distance_from_mixed\n";
    for (const auto& r : c.pctc) {
      os << "PCTC," << r.flip << ',' << io::detail::exact(r.acceptance_prob) << ','
         << io::detail::exact(r.overlap_golden) << ',' << io::detail::exact(r.alice_overlap_plus) << ','
         << io::detail::exact(r.alice_overlap_minus) << ",,,\n";
    }
    for (const auto& r : c.deutsch) {
      os << "DEUTSCH," << r.flip << ",,,,," << io::detail::exact(r.ctc_entropy) << ','
         << io::detail::exact(r.ctc_residual) << ',' << io::detail::exact(r.alice_distance_from_mixed) << '\n';
    }
    return os.str();
  }
  os << "P-CTC\n  flip  acceptance  overlap_golden  |<+|A>|   |<-|A>|   state(A,B)\n";
  for (const auto& r : c.pctc) {
    os << "  " << std::left << std::setw(6) << (r.flip ? "on" : "off") << std::setw(12)
       << fixed6(r.acceptance_prob) << std::setw(16) << fixed6(r.overlap_golden) << std::setw(10)
       << fixed6(r.alice_overlap_plus) << std::setw(10) << fixed6(r.alice_overlap_minus)
       << amplitudes6(r.state.amplitudes()) << '\n';
  }
  os << "  Alice flip/no-flip trace distance  " << fixed6(c.pctc_alice_flip_distance) << "\n\n";
  os << "Deutsch\n  flip  ctc_entropy  ctc_state            output(A,B) diagonal\n";
  for (const auto& r : c.deutsch) {
    os << "  " << std::left << std::setw(6) << (r.flip ? "on" : "off") << std::setw(13)
       << fixed6(r.ctc_entropy) << std::setw(21) << matrix6(r.ctc_state.entries())
       << amplitudes6(r.output.entries().diagonal()) << '\n';
  }
  os << "  output flip/no-flip trace distance " << fixed6(c.deutsch_flip_distance) << '\n';
  return os.str();
}

inline Format parse_format(const std::string& f) {
  if (f == "json") return Format::json;
  if (f == "csv") return Format::csv;
  if (f == "table") return Format::table;
  throw UsageError("unknown format '" + f + "'");
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Closed-timelike-curve circuit simulator (P-CTC and Deutsch models)", "ctclab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed_value = 0;
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--out", cfg.out_path, "Write output to this file instead of stdout");
  auto* seed_opt = app.add_option("--seed", seed_value, "Random seed (default: $CTCLAB_SEED)");
  app.add_option("--jobs", cfg.jobs, "Worker threads for independent trials")->check(CLI::PositiveNumber);

  auto* demo = app.add_subcommand("demo-paper", "Canonical CNOT wormhole, with and without phase flip");
  auto* signal = app.add_subcommand("signal", "Send bits to the past through the shared pair");
  auto* paradox = app.add_subcommand("paradox", "Unproven-theorem paradox with an editor");
  auto* fixed = app.add_subcommand("fixed-point", "Deutsch consistency map and its max-entropy fixed point");
  app.add_subcommand("compare", "P-CTC versus Deutsch on the canonical scenario");

  for (auto* sub : {demo, fixed}) {
    sub->add_option("--interaction", cfg.interaction, "cnot | cnot-reversed | swap | identity")
        ->check(CLI::IsMember({"cnot", "cnot-reversed", "swap", "identity"}));
    sub->add_option("--input", cfg.input_path, "Scenario or interaction JSON file");
  }
  signal->add_option("--model", cfg.model, "pctc | deutsch")->required()->check(CLI::IsMember({"pctc", "deutsch"}));
  signal->add_option("--bits", cfg.bits, "Message, e.g. 1011")->required();
  paradox->add_option("--trials", cfg.trials, "Number of trials")->check(CLI::PositiveNumber);
  paradox->add_option("--bits", cfg.bits, "Theorem bits (default: random, see --theorem-length)");
  paradox->add_option("--theorem-length", cfg.theorem_length, "Length of a random theorem")
      ->check(CLI::PositiveNumber);
  fixed->add_option("--env", cfg.env, "maximally-mixed | zero | one | plus | minus")
      ->check(CLI::IsMember({"maximally-mixed", "zero", "one", "plus", "minus"}));
  fixed->add_option("--keep", cfg.keep, "Slot fed back into the CTC: entering | emerged")
      ->check(CLI::IsMember({"entering", "emerged"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (seed_opt->count() > 0) {
    cfg.seed = seed_value;
  } else if (const char* env_seed = std::getenv("CTCLAB_SEED")) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(env_seed, &used);
      if (used != std::string(env_seed).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      err << "error: CTCLAB_SEED is not an unsigned integer\n";
      return kExitUsage;
    }
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    const auto fmt = detail::parse_format(cfg.format);
    std::string text;
    if (cfg.command == "demo-paper") text = detail::cmd_demo_paper(cfg, fmt);
    if (cfg.command == "signal") text = detail::cmd_signal(cfg, fmt);
    if (cfg.command == "paradox") text = detail::cmd_paradox(cfg, fmt);
    if (cfg.command == "fixed-point") text = detail::cmd_fixed_point(cfg, fmt);
    if (cfg.command == "compare") text = detail::cmd_compare(cfg, fmt);
    if (cfg.out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out_path, std::ios::binary);
      if (!file) throw UsageError("cannot write '" + cfg.out_path + "'");
      file << text;
    }
    return kExitOk;
  } catch (const ParadoxicalEvolution& e) {
    err << "paradoxical evolution: " << e.what() << '\n';
    return kExitParadox;
  } catch (const ParadoxSetupError& e) {
    err << "paradox setup failed: " << e.what() << '\n';
    return kExitParadox;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvariantError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ctclab::cli
