// Copyright 2026 The fairx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRX_TOOLS_CLI_HPP
#define FAIRX_TOOLS_CLI_HPP

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairx/fairx.hpp"
#include "fairx/io.hpp"
#include "fairx/oracle/maxmin_programming.hpp"

namespace fairx::cli {

inline constexpr int kOk = 0;
inline constexpr int kDomainFail = 1;
inline constexpr int kInputError = 2;

namespace detail {

struct Options {
  std::string market;
  std::string output;
  bool explain = false;
  std::string alloc;
  std::string check;
  bool make = false;
  std::string from;
  std::string received;
  std::string mode = "strong";
  std::size_t cap = kDefaultCoalitionCap;
  std::uint64_t tokens = 100000;
  std::uint64_t seed = 0;
  bool ref = false;
  std::uint64_t interval = 100;
  std::string csv;
  double tolerance = 0.05;
  double window = 0.1;
  bool compare = false;
};

inline void emit(const io::Json& j, const Options& o, std::ostream& out) {
  if (o.output.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(o.output);
  if (!f) throw Error(ErrorCode::kParse, "cannot write '" + o.output + "'");
  f << j.dump(2) << '\n';
}

inline int solve(const Options& o, std::ostream& out) {
  auto g = io::load_market(o.market);
  auto lex = solve_lex_optimal(g);
  emit(io::to_json(g, lex, o.explain), o, out);
  return kOk;
}

inline int verify(const Options& o, std::ostream& out) {
  auto g = io::load_market(o.market);
  auto d = io::load_allocation(g, o.alloc);
  require_valid(g, d);
  auto rep = verify_theorem1(g, d);
  emit(io::to_json(g, rep), o, out);
  return rep.all_passed() ? kOk : kDomainFail;
}

inline int equilibrium(const Options& o, std::ostream& out) {
  auto g = io::load_market(o.market);
  if (!o.check.empty()) {
    auto d = io::load_allocation(g, o.check);
    require_valid(g, d);
    auto rep = is_exchange_equilibrium(g, d);
    emit(io::to_json(g, rep), o, out);
    return rep.is_equilibrium ? kOk : kDomainFail;
  }
  LexSolution lex;
  if (o.from.empty()) {
    lex = solve_lex_optimal(g);
  } else {
    auto d = io::load_allocation(g, o.from);
    require_valid(g, d);
    lex = certify_lex_optimal(g, std::move(d));
  }
  auto eq = proportionalize(g, lex);
  auto rep = is_exchange_equilibrium(g, eq);
  io::Json j = io::to_json(g, eq);
  j["received"] = io::received_json(g, received_vector(g, eq));
  j["report"] = io::to_json(g, rep);
  emit(j, o, out);
  return rep.is_equilibrium ? kOk : kDomainFail;
}

inline int stability(const Options& o, std::ostream& out, std::ostream& err) {
  auto g = io::load_market(o.market);
  auto r = io::load_received(g, o.received);
  if (o.cap > kDefaultCoalitionCap) {
    err << "warning: coalition cap " << o.cap << " enumerates up to 2^" << o.cap << " coalitions\n";
  }
  auto v = o.mode == "weak" ? weak_stability_check(g, r, o.cap) : strong_stability_check(g, r, o.cap);
  emit(io::to_json(g, v), o, out);
  return v.stable ? kOk : kDomainFail;
}

inline int simulate(const Options& o, std::ostream& out) {
  auto g = io::load_market(o.market);
  SimConfig config{rates_from_market(g), o.tokens, o.seed, o.interval};
  auto trace = fairx::simulate(g, config);
  if (!o.csv.empty()) {
    std::ofstream f(o.csv);
    if (!f) throw Error(ErrorCode::kParse, "cannot write '" + o.csv + "'");
    io::write_trace_csv(f, g, trace);
  }
  std::optional<ConvergenceReport> report;
  if (o.ref) report = convergence_report(g, trace, solve_lex_optimal(g), o.tolerance, o.window);
  emit(io::to_json(g, config, trace, report ? &*report : nullptr), o, out);
  return !report || report->passed ? kOk : kDomainFail;
}

inline int oracle(const Options& o, std::ostream& out) {
  auto g = io::load_market(o.market);
  auto res = oracle::maxmin_programming(g);
  io::Json rounds = io::Json::array();
  for (const auto& t : res.rounds) rounds.push_back(to_string(t));
  io::Json j = {{"ratios", io::ratios_json(g, res.ratios)}, {"rounds", rounds}, {"lp_solves", res.lp_solves}};
  int code = kOk;
  if (o.compare) {
    bool same = solve_lex_optimal(g).ratios == res.ratios;
    j["matches_solver"] = same;
    code = same ? kOk : kDomainFail;
  }
  emit(j, o, out);
  return code;
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  detail::Options o;
  CLI::App app{"Max-min fair exchange markets: solve, verify, analyze, simulate"};
  app.name("fairx");
  app.require_subcommand(1, 1);

  auto market_arg = [&](CLI::App* sub) {
    sub->add_option("market", o.market, "Market JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", o.output, "Write JSON here instead of stdout");
  };

  auto* solve = app.add_subcommand("solve", "Lex-optimal allocation and level structure");
  market_arg(solve);
  solve->add_flag("--explain", o.explain, "Attach search probes and cut certificates");

  auto* verify = app.add_subcommand("verify", "Check the level structure of an allocation");
  market_arg(verify);
  verify->add_option("--alloc", o.alloc, "Allocation JSON file")->required()->check(CLI::ExistingFile);

  auto* equilibrium = app.add_subcommand("equilibrium", "Check or construct an exchange equilibrium");
  market_arg(equilibrium);
  auto* check = equilibrium->add_option("--check", o.check, "Allocation to test")->check(CLI::ExistingFile);
  auto* make = equilibrium->add_flag("--make", o.make, "Build an equilibrium from a lex-optimal allocation");
  equilibrium->add_option("--from", o.from, "Lex-optimal allocation to start from (default: solve)")
      ->check(CLI::ExistingFile)
      ->needs(make);
  check->excludes(make);
  make->excludes(check);

  auto* stability = app.add_subcommand("stability", "Coalitional stability of a received vector");
  market_arg(stability);
  stability->add_option("received", o.received, "Received-vector JSON file")->required()->check(CLI::ExistingFile);
  stability->add_option("--mode", o.mode, "strong or weak")->check(CLI::IsMember({"strong", "weak"}));
  stability->add_option("--cap", o.cap, "Largest market to enumerate")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Token exchange dynamics with rates equal to endowments");
  market_arg(simulate);
  simulate->add_option("--tokens", o.tokens, "Number of token events")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", o.seed, "Generator seed");
  simulate->add_flag("--ref", o.ref, "Compare with the lex-optimal ratios");
  simulate->add_option("--interval", o.interval, "Events between samples")->check(CLI::PositiveNumber);
  simulate->add_option("--csv", o.csv, "Write the time,node,ratio trace here");
  simulate->add_option("--tolerance", o.tolerance, "Relative deviation allowed with --ref");
  simulate->add_option("--window", o.window, "Trailing fraction of samples averaged with --ref")
      ->check(CLI::Range(0.0, 1.0));

  auto* oracle = app.add_subcommand("oracle", "Ratios by exact progressive-filling linear programs");
  market_arg(oracle);
  oracle->add_flag("--compare", o.compare, "Also run the solver and report agreement");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "fairx: " << e.what() << '\n';
    return kInputError;
  }
  if (*equilibrium && !o.make && o.check.empty()) {
    err << "fairx: equilibrium needs --check FILE or --make\n";
    return kInputError;
  }

  try {
    if (*solve) return detail::solve(o, out);
    if (*verify) return detail::verify(o, out);
    if (*equilibrium) return detail::equilibrium(o, out);
    if (*stability) return detail::stability(o, out, err);
    if (*simulate) return detail::simulate(o, out);
    return detail::oracle(o, out);
  } catch (const Error& e) {
    err << "fairx: " << e.what() << '\n';
    return e.code() == ErrorCode::kNotLexOptimalInput ? kDomainFail : kInputError;
  }
}

}  // namespace fairx::cli

#endif  // FAIRX_TOOLS_CLI_HPP
