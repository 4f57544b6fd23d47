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

#ifndef FAIRX_MAX_FLOW_HPP
#define FAIRX_MAX_FLOW_HPP

#include <cstddef>
#include <queue>
#include <vector>

namespace fairx {

/// Dinic's algorithm over an exact integer capacity type. Arcs are explored
/// in insertion order, so results are deterministic.
template <typename Cap>
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t vertices) : graph_(vertices) {}

  std::size_t add_arc(std::size_t from, std::size_t to, Cap capacity) {
    std::size_t id = arcs_.size();
    arcs_.push_back({to, capacity, capacity});
    graph_[from].push_back(id);
    arcs_.push_back({from, Cap(0), Cap(0)});
    graph_[to].push_back(id + 1);
    return id;
  }

  Cap run(std::size_t source, std::size_t sink) {
    Cap total = 0;
    while (build_levels(source, sink)) {
      next_.assign(graph_.size(), 0);
      while (true) {
        Cap pushed = push(source, sink, Cap(-1));
        if (pushed == 0) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Flow currently on an arc returned by add_arc.
  Cap flow(std::size_t arc) const { return arcs_[arc].capacity - arcs_[arc].residual; }

  /// Vertices reachable from `source` in the residual graph.
  std::vector<bool> reachable(std::size_t source) const {
    std::vector<bool> seen(graph_.size(), false);
    std::queue<std::size_t> q;
    seen[source] = true;
    q.push(source);
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (std::size_t id : graph_[u]) {
        const auto& a = arcs_[id];
        if (a.residual > 0 && !seen[a.to]) {
          seen[a.to] = true;
          q.push(a.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    std::size_t to;
    Cap residual;
    Cap capacity;
  };

  bool build_levels(std::size_t source, std::size_t sink) {
    level_.assign(graph_.size(), -1);
    std::queue<std::size_t> q;
    level_[source] = 0;
    q.push(source);
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (std::size_t id : graph_[u]) {
        const auto& a = arcs_[id];
        if (a.residual > 0 && level_[a.to] < 0) {
          level_[a.to] = level_[u] + 1;
          q.push(a.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  // limit < 0 means unbounded.
  Cap push(std::size_t u, std::size_t sink, const Cap& limit) {
    if (u == sink) return limit;
    for (std::size_t& k = next_[u]; k < graph_[u].size(); ++k) {
      std::size_t id = graph_[u][k];
      Arc& a = arcs_[id];
      if (a.residual <= 0 || level_[a.to] != level_[u] + 1) continue;
      Cap bound = (limit < 0 || a.residual < limit) ? a.residual : limit;
      Cap got = push(a.to, sink, bound);
      if (got > 0) {
        a.residual -= got;
        arcs_[id ^ 1].residual += got;
        return got;
      }
    }
    return 0;
  }

  std::vector<std::vector<std::size_t>> graph_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

}  // namespace fairx

#endif  // FAIRX_MAX_FLOW_HPP
