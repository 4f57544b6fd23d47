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

// JSON and CSV encodings. Rationals are always written as "p/q" strings
// ("p" when the denominator is 1).

#ifndef FAIRX_IO_HPP
#define FAIRX_IO_HPP

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairx/equilibrium.hpp"
#include "fairx/lex_decomposition.hpp"
#include "fairx/market.hpp"
#include "fairx/stability.hpp"
#include "fairx/structure_check.hpp"
#include "fairx/token_sim.hpp"

namespace fairx::io {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParse, "'" + path + "' is not valid JSON: " + e.what());
  }
}

inline Rational rational_field(const Json& v, const std::string& what) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer() || v.is_number_unsigned()) return parse_rational(v.dump());
  if (v.is_number_float()) return parse_rational(v.dump());
  throw Error(ErrorCode::kParse, what + " must be a number or a \"p/q\" string");
}

namespace detail {

inline const Json& member(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kParse, where + " needs a \"" + key + "\" field");
  }
  return obj.at(key);
}

inline std::string string_field(const Json& obj, const char* key, const std::string& where) {
  const Json& v = member(obj, key, where);
  if (!v.is_string()) throw Error(ErrorCode::kParse, where + " field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

inline NodeIndex node_ref(const MarketGraph& g, const std::string& id) {
  auto i = g.index_of(id);
  if (!i) throw Error(ErrorCode::kUnknownNode, "unknown node '" + id + "'");
  return *i;
}

inline Json ids(const MarketGraph& g, std::span<const NodeIndex> set) {
  Json a = Json::array();
  for (NodeIndex i : set) a.push_back(g.id(i));
  return a;
}

}  // namespace detail

/// {"nodes":[{"id":"a","endowment":"10"}],"edges":[["a","b"]]}
inline RawMarket parse_market(const Json& j) {
  RawMarket raw;
  const Json& nodes = detail::member(j, "nodes", "market");
  if (!nodes.is_array()) throw Error(ErrorCode::kParse, "market \"nodes\" must be an array");
  for (const auto& n : nodes) {
    std::string id = detail::string_field(n, "id", "node");
    raw.nodes.push_back({id, rational_field(detail::member(n, "endowment", "node '" + id + "'"), "endowment")});
  }
  const Json& edges = detail::member(j, "edges", "market");
  if (!edges.is_array()) throw Error(ErrorCode::kParse, "market \"edges\" must be an array");
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
      throw Error(ErrorCode::kParse, "each edge must be a pair of node ids");
    }
    raw.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return raw;
}

inline MarketGraph load_market(const std::string& path) { return make_market(parse_market(read_json_file(path))); }

/// {"flows":[{"from":"a","to":"b","amount":"10/3"}]}; unlisted arcs are 0.
inline Allocation parse_allocation(const MarketGraph& g, const Json& j) {
  const Json& flows = detail::member(j, "flows", "allocation");
  if (!flows.is_array()) throw Error(ErrorCode::kParse, "allocation \"flows\" must be an array");
  Allocation d(g);
  std::vector<bool> seen(d.arc_count(), false);
  for (const auto& f : flows) {
    NodeIndex from = detail::node_ref(g, detail::string_field(f, "from", "flow"));
    NodeIndex to = detail::node_ref(g, detail::string_field(f, "to", "flow"));
    std::size_t arc = g.arc(from, to);
    if (seen[arc]) {
      throw Error(ErrorCode::kAllocationMismatch, "flow " + g.id(from) + "->" + g.id(to) + " listed twice");
    }
    seen[arc] = true;
    d.arc_amount(arc) = rational_field(detail::member(f, "amount", "flow"), "amount");
  }
  return d;
}

inline Allocation load_allocation(const MarketGraph& g, const std::string& path) {
  return parse_allocation(g, read_json_file(path));
}

/// {"received":[{"node":"a","amount":"30"}]}; every node must be listed once.
inline ReceivedVector parse_received(const MarketGraph& g, const Json& j) {
  const Json& list = detail::member(j, "received", "received file");
  if (!list.is_array()) throw Error(ErrorCode::kParse, "\"received\" must be an array");
  ReceivedVector r;
  r.values.assign(g.size(), Rational(0));
  std::vector<bool> seen(g.size(), false);
  for (const auto& e : list) {
    NodeIndex i = detail::node_ref(g, detail::string_field(e, "node", "received entry"));
    if (seen[i]) throw Error(ErrorCode::kDimensionMismatch, "node '" + g.id(i) + "' listed twice");
    seen[i] = true;
    r.values[i] = rational_field(detail::member(e, "amount", "received entry"), "amount");
    if (r.values[i] < 0) throw Error(ErrorCode::kParse, "negative amount for '" + g.id(i) + "'");
  }
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (!seen[i]) throw Error(ErrorCode::kDimensionMismatch, "node '" + g.id(i) + "' missing from received vector");
  }
  return r;
}

inline ReceivedVector load_received(const MarketGraph& g, const std::string& path) {
  return parse_received(g, read_json_file(path));
}

inline Json to_json(const MarketGraph& g) {
  Json nodes = Json::array();
  for (NodeIndex i = 0; i < g.size(); ++i) nodes.push_back({{"id", g.id(i)}, {"endowment", to_string(g.endowment(i))}});
  Json edges = Json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back(Json::array({g.id(u), g.id(v)}));
  return {{"nodes", nodes}, {"edges", edges}};
}

/// Nonzero arcs only, in arc order.
inline Json flows_json(const MarketGraph& g, const Allocation& d) {
  Json flows = Json::array();
  for (std::size_t a = 0; a < d.arc_count(); ++a) {
    if (d.arc_amount(a) == 0) continue;
    auto [from, to] = g.arc_endpoints(a);
    flows.push_back({{"from", g.id(from)}, {"to", g.id(to)}, {"amount", to_string(d.arc_amount(a))}});
  }
  return flows;
}

inline Json to_json(const MarketGraph& g, const Allocation& d) { return {{"flows", flows_json(g, d)}}; }

inline Json received_json(const MarketGraph& g, const ReceivedVector& r) {
  Json list = Json::array();
  for (NodeIndex i = 0; i < g.size(); ++i) list.push_back({{"node", g.id(i)}, {"amount", to_string(r[i])}});
  return list;
}

inline Json ratios_json(const MarketGraph& g, const RatioVector& rho) {
  Json list = Json::array();
  for (NodeIndex i = 0; i < g.size(); ++i) list.push_back({{"node", g.id(i)}, {"ratio", to_string(rho[i])}});
  return list;
}

inline Json cut_json(const MarketGraph& g, const CutCertificate& c) {
  return {{"sinks", detail::ids(g, c.sinks)}, {"supply", to_string(c.supply)}, {"demand", to_string(c.demand)}};
}

inline Json decomposition_json(const MarketGraph& g, const LevelDecomposition& dec) {
  Json levels = Json::array();
  Json sets = Json::array();
  for (std::size_t k = 0; k < dec.K(); ++k) {
    levels.push_back(to_string(dec.levels[k]));
    sets.push_back(detail::ids(g, dec.level_sets[k]));
  }
  Json grp = Json::array();
  for (const auto& m : groups(dec)) grp.push_back(detail::ids(g, m.nodes));
  return {{"K", dec.K()}, {"levels", levels}, {"level_sets", sets}, {"groups", grp}};
}

/// Solver output. With `explain`, each peeling pass lists its search probes
/// and the cut certificate that rejected each infeasible probe.
inline Json to_json(const MarketGraph& g, const LexSolution& s, bool explain = false) {
  Json out = decomposition_json(g, s.decomposition);
  out["received"] = received_json(g, s.received);
  out["ratios"] = ratios_json(g, s.ratios);
  out["flows"] = flows_json(g, s.allocation);
  Json redundant = Json::array();
  for (const auto& [u, v] : redundant_links(g, s)) redundant.push_back(Json::array({g.id(u), g.id(v)}));
  out["redundant_links"] = redundant;
  if (explain) {
    Json peels = Json::array();
    for (const auto& p : s.peels) {
      Json probes = Json::array();
      for (const auto& st : p.search) {
        Json probe = {{"value", to_string(st.value)}, {"feasible", st.feasible}};
        if (st.cut) probe["cut"] = cut_json(g, *st.cut);
        probes.push_back(probe);
      }
      peels.push_back({{"arena", detail::ids(g, p.arena)},
                       {"lambda", to_string(p.lambda)},
                       {"bottom", detail::ids(g, p.bottom)},
                       {"top", detail::ids(g, p.top)},
                       {"search", probes}});
    }
    out["peels"] = peels;
  }
  return out;
}

inline Json to_json(const MarketGraph& g, const StructureReport& rep) {
  Json verdicts = Json::array();
  for (const auto& v : rep.verdicts) {
    Json e = {{"property", v.property}, {"passed", v.passed}};
    if (!v.passed) {
      e["detail"] = v.detail;
      e["witness"] = detail::ids(g, v.witness);
    }
    verdicts.push_back(e);
  }
  Json out = {{"passed", rep.all_passed()}, {"verdicts", verdicts}};
  out["decomposition"] = decomposition_json(g, rep.decomposition);
  out["received"] = received_json(g, rep.received);
  return out;
}

inline const char* condition_name(EquilibriumCondition c) {
  return c == EquilibriumCondition::kReciprocity ? "reciprocity" : "minimum_ratio_partner";
}

inline Json to_json(const MarketGraph& g, const EquilibriumReport& rep) {
  Json violations = Json::array();
  for (const auto& v : rep.violations) {
    violations.push_back({{"node", g.id(v.node)},
                          {"neighbor", g.id(v.neighbor)},
                          {"condition", condition_name(v.condition)},
                          {"details", v.details}});
  }
  return {{"is_equilibrium", rep.is_equilibrium}, {"violations", violations}};
}

inline Json to_json(const MarketGraph& g, const StabilityVerdict& v) {
  Json out = {{"mode", v.mode == StabilityMode::kStrong ? "strong" : "weak"},
              {"stable", v.stable},
              {"coalitions_checked", v.coalitions_checked}};
  if (v.blocking) {
    Json edges = Json::array();
    for (const auto& [a, b] : v.blocking->edges) edges.push_back(Json::array({g.id(a), g.id(b)}));
    Json improved = Json::array();
    for (NodeIndex i : v.blocking->members) {
      improved.push_back({{"node", g.id(i)}, {"amount", to_string(v.improvement->received[i])}});
    }
    out["blocking_coalition"] = {{"members", detail::ids(g, v.blocking->members)},
                                 {"edges", edges},
                                 {"received", improved},
                                 {"flows", flows_json(g, v.improvement->allocation)}};
  }
  return out;
}

inline Json to_json(const MarketGraph& g, const SimConfig& config, const SimTrace& trace,
                    const ConvergenceReport* report) {
  Json final_ratios = Json::array();
  const auto& st = trace.final_state;
  for (NodeIndex i = 0; i < g.size(); ++i) {
    final_ratios.push_back({{"node", g.id(i)},
                            {"generated", st.generated[i]},
                            {"given", st.total_given[i]},
                            {"received", st.total_received[i]},
                            {"ratio", st.ratio(i)}});
  }
  Json out = {{"rng", kSimRngName},
              {"seed", config.seed},
              {"tokens", config.tokens},
              {"sample_interval", config.sample_interval},
              {"samples", trace.samples.size()},
              {"clock", st.clock},
              {"final", final_ratios}};
  if (report) {
    Json nodes = Json::array();
    for (const auto& c : report->nodes) {
      nodes.push_back({{"node", g.id(c.node)},
                       {"mean", c.mean},
                       {"target", c.target},
                       {"deviation", c.deviation},
                       {"passed", c.passed}});
    }
    out["convergence"] = {{"passed", report->passed},
                          {"tolerance", report->tolerance},
                          {"window_samples", report->window_samples},
                          {"max_deviation", report->max_deviation},
                          {"nodes", nodes}};
  }
  return out;
}

/// time,node,ratio rows, one per node per sample.
inline void write_trace_csv(std::ostream& os, const MarketGraph& g, const SimTrace& trace) {
  os << "time,node,ratio\n";
  os << std::setprecision(17);
  for (const auto& s : trace.samples) {
    for (NodeIndex i = 0; i < g.size(); ++i) os << s.time << ',' << g.id(i) << ',' << s.ratios[i] << '\n';
  }
}

}  // namespace fairx::io

#endif  // FAIRX_IO_HPP
