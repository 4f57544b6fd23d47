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

#ifndef FAIRX_TOKEN_SIM_HPP
#define FAIRX_TOKEN_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fairx/lex_decomposition.hpp"
#include "fairx/market.hpp"

namespace fairx {

inline constexpr const char* kSimRngName = "mt19937_64; uniform = (x >> 11) * 2^-53; exponential = -log1p(-u) / rate";

struct SimConfig {
  std::vector<double> rates;  // lambda_i > 0, tokens per unit time
  std::uint64_t tokens = 100000;
  std::uint64_t seed = 0;
  std::uint64_t sample_interval = 100;
};

/// Token counters per arc: given[arc(i, j)] is what i has granted to j, which
/// is also what j has received from i.
struct SimState {
  std::vector<std::uint64_t> given;
  std::vector<std::uint64_t> generated;  // per node
  std::vector<std::uint64_t> total_given;
  std::vector<std::uint64_t> total_received;
  double clock = 0.0;
  std::uint64_t events = 0;

  explicit SimState(const MarketGraph& g)
      : given(2 * g.edge_count(), 0),
        generated(g.size(), 0),
        total_given(g.size(), 0),
        total_received(g.size(), 0) {}

  /// received / given; 0 for a node that has given nothing.
  double ratio(NodeIndex i) const {
    if (total_given[i] == 0) return 0.0;
    return static_cast<double>(total_received[i]) / static_cast<double>(total_given[i]);
  }
};

/// Deterministic source of event draws.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline void require_rates(const MarketGraph& g, const SimConfig& config) {
  if (config.rates.size() != g.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(config.rates.size()) + " rates for " + std::to_string(g.size()) + " nodes");
  }
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (!(config.rates[i] > 0.0) || !std::isfinite(config.rates[i])) {
      throw Error(ErrorCode::kNonPositiveEndowment, "rate of '" + g.id(i) + "' must be positive");
    }
    if (g.is_isolated(i)) throw Error(ErrorCode::kEmptyEdgeSet, "node '" + g.id(i) + "' has no neighbor");
  }
}

// score(j) = received(i <- j) / given(i -> j); given = 0 scores +inf.
// Ties: fewest given, then lowest index.
inline bool better_partner(std::uint64_t got_a, std::uint64_t gave_a, NodeIndex a, std::uint64_t got_b,
                           std::uint64_t gave_b, NodeIndex b) {
  if (gave_a == 0 || gave_b == 0) {
    if (gave_a != gave_b) return gave_a == 0;
    return a < b;
  }
  using Wide = unsigned __int128;
  Wide lhs = static_cast<Wide>(got_a) * gave_b;
  Wide rhs = static_cast<Wide>(got_b) * gave_a;
  if (lhs != rhs) return lhs > rhs;
  if (gave_a != gave_b) return gave_a < gave_b;
  return a < b;
}

}  // namespace detail

/// The neighbor node i grants its next token to.
inline NodeIndex grant_target(const MarketGraph& g, const SimState& state, NodeIndex i) {
  const auto nbs = g.neighbors(i);
  NodeIndex best = nbs.front().node;
  std::uint64_t best_got = state.given[g.arc(best, i)];
  std::uint64_t best_gave = state.given[g.arc(i, best)];
  for (const auto& nb : nbs.subspan(1)) {
    std::uint64_t got = state.given[g.arc(nb.node, i)];
    std::uint64_t gave = state.given[g.arc(i, nb.node)];
    if (detail::better_partner(got, gave, nb.node, best_got, best_gave, best)) {
      best = nb.node;
      best_got = got;
      best_gave = gave;
    }
  }
  return best;
}

/// One token event: the clock advances by Exp(sum lambda), the generator is
/// drawn with probability lambda_i / sum lambda, and the token goes to the
/// best-scoring neighbor.
inline void step(const MarketGraph& g, SimState& state, const SimConfig& config, SimRng& rng) {
  double total = 0.0;
  for (double r : config.rates) total += r;
  state.clock += rng.exponential(total);
  double pick = rng.uniform() * total;
  NodeIndex i = 0;
  for (; i + 1 < g.size(); ++i) {
    if (pick < config.rates[i]) break;
    pick -= config.rates[i];
  }
  NodeIndex j = grant_target(g, state, i);
  ++state.given[g.arc(i, j)];
  ++state.generated[i];
  ++state.total_given[i];
  ++state.total_received[j];
  ++state.events;
}

struct SimSample {
  double time = 0.0;
  std::uint64_t events = 0;
  std::vector<double> ratios;
};

struct SimTrace {
  std::vector<SimSample> samples;
  SimState final_state;
};

inline SimSample snapshot(const MarketGraph& g, const SimState& state) {
  SimSample s{state.clock, state.events, std::vector<double>(g.size(), 0.0)};
  for (NodeIndex i = 0; i < g.size(); ++i) s.ratios[i] = state.ratio(i);
  return s;
}

/// Runs `config.tokens` events, sampling every `config.sample_interval`
/// events; the final state is always sampled.
inline SimTrace simulate(const MarketGraph& g, const SimConfig& config) {
  detail::require_rates(g, config);
  if (config.tokens == 0) throw Error(ErrorCode::kParse, "token horizon must be positive");
  const std::uint64_t interval = config.sample_interval == 0 ? 1 : config.sample_interval;
  SimRng rng(config.seed);
  SimTrace trace{{}, SimState(g)};
  for (std::uint64_t e = 1; e <= config.tokens; ++e) {
    step(g, trace.final_state, config, rng);
    if (e % interval == 0) trace.samples.push_back(snapshot(g, trace.final_state));
  }
  if (trace.samples.empty() || trace.samples.back().events != trace.final_state.events) {
    trace.samples.push_back(snapshot(g, trace.final_state));
  }
  return trace;
}

inline std::vector<double> rates_from_market(const MarketGraph& g) {
  std::vector<double> rates(g.size());
  for (NodeIndex i = 0; i < g.size(); ++i) rates[i] = to_double(g.endowment(i));
  return rates;
}

struct NodeConvergence {
  NodeIndex node;
  double mean = 0.0;
  double target = 0.0;
  double deviation = 0.0;
  bool passed = false;
};

struct ConvergenceReport {
  std::vector<NodeConvergence> nodes;
  std::size_t window_samples = 0;
  double tolerance = 0.0;
  double max_deviation = 0.0;
  bool passed = false;
};

/// Compares the trailing-window mean ratio of every non-isolated node with its
/// lex-optimal level. The window is the last `window_fraction` of samples.
inline ConvergenceReport convergence_report(const MarketGraph& g, const SimTrace& trace,
                                            const std::optional<LexSolution>& reference, double tolerance,
                                            double window_fraction = 0.1) {
  if (!reference) throw Error(ErrorCode::kMissingReference, "convergence needs a lex-optimal reference");
  if (reference->ratios.values.size() != g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "reference covers a different market");
  }
  ConvergenceReport rep;
  rep.tolerance = tolerance;
  const std::size_t n = trace.samples.size();
  std::size_t w = static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(n)));
  w = std::clamp<std::size_t>(w, n == 0 ? 0 : 1, n);
  rep.window_samples = w;
  rep.passed = w > 0;
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (g.is_isolated(i)) continue;
    NodeConvergence c{i};
    for (std::size_t s = n - w; s < n; ++s) c.mean += trace.samples[s].ratios[i];
    if (w > 0) c.mean /= static_cast<double>(w);
    c.target = to_double(reference->ratios[i]);
    c.deviation = std::abs(c.mean - c.target) / c.target;
    c.passed = c.deviation <= tolerance;
    rep.passed = rep.passed && c.passed;
    rep.max_deviation = std::max(rep.max_deviation, c.deviation);
    rep.nodes.push_back(c);
  }
  return rep;
}

}  // namespace fairx

#endif  // FAIRX_TOKEN_SIM_HPP
