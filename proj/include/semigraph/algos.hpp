/*
 * Copyright 2026 The SemiGraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "semigraph/engine.hpp"

namespace semigraph {

// The six applications, written as vertex programs over the engine. All
// cross-vertex effects go through messages; per-vertex algorithmic state is
// a small fixed-size struct, with transient neighbor buffers held in the
// running-vertex scratch that exists only while a vertex is in flight.
// Hooks are templated on the engine context so a program stays independent
// of its own engine instantiation.

inline constexpr uint32_t kUnsetLevel = UINT32_MAX;

// --------------------------------------------------------------------- BFS
// Frontier traversal over out-edge lists only.
struct BfsProgram {
  struct State {
    uint32_t level = kUnsetLevel;
    bool visited = false;
  };
  using Message = Empty;
  using Scratch = Empty;

  template <class Ctx>
  void run(Ctx& ctx, State& s) {
    if (s.visited) return;
    s.visited = true;
    s.level = uint32_t(ctx.iteration());
    ctx.request_own_edges(EdgeSide::Out);
  }

  template <class Ctx>
  void run_on_vertex(Ctx& ctx, State&, const EdgeListView& v) {
    std::vector<VertexId> nbrs;
    v.copy_neighbors(nbrs);
    ctx.activate(nbrs);
  }
};

// ---------------------------------------------------------------------- BC
// Single-source betweenness: forward BFS accumulating shortest-path counts
// over out-edges, then a backward sweep by decreasing depth that pushes
// dependency ratios to predecessors through in-edge lists. The backward
// wavefronts are driven from the iteration boundary.
struct BcProgram {
  struct State {
    uint64_t sigma = 0;
    uint32_t depth = kUnsetLevel;
    double delta = 0.0;
    bool visited = false;
  };
  struct Message {
    uint32_t depth;
    uint64_t sigma;
    double ratio;
  };
  using Scratch = Empty;

  explicit BcProgram(VertexId source) : source(source) {}

  VertexId source;
  bool backward = false;
  uint32_t back_depth = 0;

  template <class Ctx>
  void run(Ctx& ctx, State& s) {
    if (!backward) {
      if (s.visited) return;
      s.visited = true;
      s.depth = uint32_t(ctx.iteration());
      if (s.sigma == 0) s.sigma = 1;  // only the source starts unseeded
      ctx.request_own_edges(EdgeSide::Out);
    } else {
      if (s.depth != back_depth) return;
      ctx.request_own_edges(EdgeSide::In);
    }
  }

  template <class Ctx>
  void run_on_vertex(Ctx& ctx, State& s, const EdgeListView& v) {
    std::vector<VertexId> nbrs;
    v.copy_neighbors(nbrs);
    if (nbrs.empty()) return;
    if (!backward) {
      ctx.multicast(nbrs, {s.depth, s.sigma, 0.0}, /*activate=*/true);
    } else {
      ctx.multicast(nbrs, {s.depth, 0, (1.0 + s.delta) / double(s.sigma)});
    }
  }

  template <class Ctx>
  void run_on_message(Ctx& ctx, State& s, const Message& m) {
    if (!backward) {
      if (!s.visited) s.sigma += m.sigma;
    } else {
      if (ctx.vertex() == source) return;  // delta of the source stays 0
      if (s.visited && s.depth + 1 == m.depth)
        s.delta += double(s.sigma) * m.ratio;
    }
  }

  template <class BoundaryCtx>
  void on_iteration_boundary(BoundaryCtx& b) {
    if (!backward) {
      if (b.next_active_count() > 0) return;  // forward wave still growing
      uint32_t max_depth = 0;
      for (const State& s : b.states())
        if (s.visited && s.depth != kUnsetLevel)
          max_depth = std::max(max_depth, s.depth);
      if (max_depth == 0) return;  // nothing reachable beyond the source
      backward = true;
      back_depth = max_depth;
      activate_depth(b, back_depth);
    } else {
      if (back_depth == 0) return;
      back_depth--;
      if (back_depth >= 1) activate_depth(b, back_depth);
    }
  }

 private:
  template <class BoundaryCtx>
  void activate_depth(BoundaryCtx& b, uint32_t d) {
    auto& st = b.states();
    for (VertexId v = 0; v < st.size(); v++)
      if (st[v].visited && st[v].depth == d) b.activate(v);
  }
};

// ---------------------------------------------------------------------- PR
// Delta PageRank over out-edge lists: a vertex folds received deltas into
// its rank and re-multicasts d * delta / out_degree. Receivers activate
// themselves only when the accumulated delta reaches the threshold, and
// dangling vertices absorb rank.
struct PrProgram {
  struct State {
    double rank = 0.0;
    double pending = 0.0;
    double sending = 0.0;
  };
  struct Message {
    double delta;
  };
  using Scratch = Empty;

  PrProgram(double d, double threshold) : d(d), threshold(threshold) {}

  double d;
  double threshold;

  State init_state(VertexId) const { return {1.0 - d, 0.0, 0.0}; }

  template <class Ctx>
  void run(Ctx& ctx, State& s) {
    if (ctx.iteration() == 0) {
      s.sending = s.rank;  // bootstrap: push the initial rank once
    } else {
      if (std::abs(s.pending) < threshold) return;
      s.sending = s.pending;
      s.pending = 0.0;
    }
    if (ctx.degree(ctx.vertex(), EdgeSide::Out) == 0) return;  // dangling
    ctx.request_own_edges(EdgeSide::Out);
  }

  template <class Ctx>
  void run_on_vertex(Ctx& ctx, State& s, const EdgeListView& v) {
    std::vector<VertexId> nbrs;
    v.copy_neighbors(nbrs);
    if (nbrs.empty()) return;
    ctx.multicast(nbrs, {d * s.sending / double(nbrs.size())});
  }

  template <class Ctx>
  void run_on_message(Ctx& ctx, State& s, const Message& m) {
    s.rank += m.delta;
    s.pending += m.delta;
    if (std::abs(s.pending) >= threshold) ctx.activate_self();
  }
};

// --------------------------------------------------------------------- WCC
// Label propagation over the undirected projection: vertices broadcast
// their component label over both edge lists and adopt the smallest label
// they observe; only improved vertices run again.
struct WccProgram {
  struct State {
    VertexId label = 0;
    bool changed = false;
  };
  struct Message {
    VertexId label;
  };
  using Scratch = Empty;

  State init_state(VertexId v) const { return {v, true}; }

  template <class Ctx>
  void run(Ctx& ctx, State& s) {
    if (!s.changed) return;
    s.changed = false;
    ctx.request_own_edges(EdgeSide::Out);
    ctx.request_own_edges(EdgeSide::In);
  }

  template <class Ctx>
  void run_on_vertex(Ctx& ctx, State& s, const EdgeListView& v) {
    std::vector<VertexId> nbrs;
    v.copy_neighbors(nbrs);
    if (nbrs.empty()) return;
    ctx.multicast(nbrs, {s.label});
  }

  template <class Ctx>
  void run_on_message(Ctx& ctx, State& s, const Message& m) {
    if (m.label < s.label) {
      s.label = m.label;
      s.changed = true;
      ctx.activate_self();
    }
  }
};

// ---------------------------------------------------------------------- TC
// Canonical triangle counting: the smallest corner u intersects its
// higher-ID neighbor set with each such neighbor's lists and notifies the
// other two corners (and itself) by message. The undirected neighbor set is
// assembled on the fly from both edge lists. Supports vertical partitioning:
// part j only touches candidate neighbors inside its ID window.
struct TcProgram {
  struct State {
    uint64_t count = 0;
  };
  struct Message {
    uint64_t add;
  };
  struct PendingNbr {
    uint8_t seen = 0;
    std::vector<VertexId> found;  // intersection hits, kept sorted
  };
  struct Scratch {
    std::vector<VertexId> nbrs;  // own undirected neighbors > self
    uint8_t own_pending = 0;
    std::unordered_map<VertexId, PendingNbr> per_nbr;
  };
  static constexpr bool kSupportsVertical = true;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    if (ctx.degree(ctx.vertex(), EdgeSide::In) == 0 &&
        ctx.degree(ctx.vertex(), EdgeSide::Out) == 0)
      return;
    ctx.scratch().own_pending = 2;
    ctx.request_own_edges(EdgeSide::In);
    ctx.request_own_edges(EdgeSide::Out);
  }

  template <class Ctx>
  void run_on_vertex(Ctx& ctx, State&, const EdgeListView& v) {
    Scratch& sc = ctx.scratch();
    const VertexId self = ctx.vertex();
    if (v.owner() == self) {
      for (uint32_t i = 0; i < v.degree(); i++) {
        VertexId w = v.neighbor(i);
        if (w > self) sc.nbrs.push_back(w);
      }
      if (--sc.own_pending > 0) return;
      std::sort(sc.nbrs.begin(), sc.nbrs.end());
      sc.nbrs.erase(std::unique(sc.nbrs.begin(), sc.nbrs.end()),
                    sc.nbrs.end());
      auto [lo, hi] = ctx.part_window();
      for (VertexId w : sc.nbrs) {
        if (ctx.vertical_parts() > 1 && (w < lo || w >= hi)) continue;
        sc.per_nbr.emplace(w, PendingNbr{});
        ctx.request_edges(w, EdgeSide::In);
        ctx.request_edges(w, EdgeSide::Out);
      }
      return;
    }
    const VertexId w = v.owner();
    PendingNbr& pe = sc.per_nbr.at(w);
    // Triangles {self < w < x}: x must be a higher-than-w neighbor of both.
    std::vector<VertexId> hits;
    auto it = std::upper_bound(sc.nbrs.begin(), sc.nbrs.end(), w);
    uint32_t i = 0;
    while (i < v.degree() && it != sc.nbrs.end()) {
      VertexId x = v.neighbor(i);
      if (x <= w) {
        i++;
        continue;
      }
      if (x < *it)
        i++;
      else if (*it < x)
        ++it;
      else {
        hits.push_back(x);
        i++;
        ++it;
      }
    }
    std::vector<VertexId> merged;
    merged.reserve(pe.found.size() + hits.size());
    std::set_union(pe.found.begin(), pe.found.end(), hits.begin(), hits.end(),
                   std::back_inserter(merged));
    pe.found.swap(merged);
    if (++pe.seen < 2) return;
    if (!pe.found.empty()) {
      ctx.send(ctx.vertex(), {pe.found.size()});
      ctx.send(w, {pe.found.size()});
      for (VertexId x : pe.found) ctx.send(x, {1});
    }
    sc.per_nbr.erase(w);
  }

  template <class Ctx>
  void run_on_message(Ctx&, State& s, const Message& m) {
    s.count += m.add;
  }
};

// ---------------------------------------------------------------------- SS
// Scan statistics: locality(v) = edges in the closed neighborhood of v,
// evaluated like TC but over all neighbor pairs. A custom schedule runs
// large-degree vertices first so the running maximum's upper-bound test
// skips most of the graph. With vertical partitioning, parts report partial
// neighborhood counts to their owner by message.
struct SsProgram {
  enum Status : uint8_t { kPending = 0, kComputed = 1, kSkipped = 2 };
  struct State {
    uint64_t stat = 0;
    uint64_t partial = 0;
    uint32_t parts_done = 0;
    Status status = kPending;
  };
  struct Message {
    uint64_t value;
    bool skipped;
  };
  struct PendingNbr {
    uint8_t seen = 0;
    std::vector<VertexId> found;
  };
  struct Scratch {
    std::vector<VertexId> nbrs;  // full undirected neighbor set
    uint8_t own_pending = 0;
    uint32_t outstanding_nbrs = 0;
    uint64_t part_count = 0;
    std::unordered_map<VertexId, PendingNbr> per_nbr;
  };
  static constexpr ScanOrder kScanOrder = ScanOrder::Custom;
  static constexpr bool kSupportsVertical = true;

  explicit SsProgram(const GraphIndex* index, bool pruning = true)
      : index(index), pruning(pruning) {}

  const GraphIndex* index;
  bool pruning;
  GlobalMax best;

  // Largest-degree first; ties by ascending ID.
  void order_actives(std::span<VertexId> queue) {
    std::sort(queue.begin(), queue.end(), [this](VertexId a, VertexId b) {
      uint64_t da = degree_bound(a), db = degree_bound(b);
      if (da != db) return da > db;
      return a < b;
    });
  }

  template <class Ctx>
  void run(Ctx& ctx, State& s) {
    const VertexId self = ctx.vertex();
    uint64_t d = degree_bound(self);
    uint64_t ub = d + d * (d - 1) / 2;
    if (pruning && !best.would_improve(ub, self)) {
      finish_part(ctx, s, 0, /*skipped=*/true);
      return;
    }
    if (d == 0) {
      finish_part(ctx, s, 0, false);
      return;
    }
    ctx.scratch().own_pending = 2;
    ctx.request_own_edges(EdgeSide::In);
    ctx.request_own_edges(EdgeSide::Out);
  }

  template <class Ctx>
  void run_on_vertex(Ctx& ctx, State& s, const EdgeListView& v) {
    Scratch& sc = ctx.scratch();
    const VertexId self = ctx.vertex();
    if (v.owner() == self) {
      for (uint32_t i = 0; i < v.degree(); i++)
        sc.nbrs.push_back(v.neighbor(i));
      if (--sc.own_pending > 0) return;
      std::sort(sc.nbrs.begin(), sc.nbrs.end());
      sc.nbrs.erase(std::unique(sc.nbrs.begin(), sc.nbrs.end()),
                    sc.nbrs.end());
      if (ctx.part() == 0) sc.part_count += sc.nbrs.size();
      auto [lo, hi] = ctx.part_window();
      for (VertexId w : sc.nbrs) {
        if (ctx.vertical_parts() > 1 && (w < lo || w >= hi)) continue;
        sc.per_nbr.emplace(w, PendingNbr{});
        sc.outstanding_nbrs++;
        ctx.request_edges(w, EdgeSide::In);
        ctx.request_edges(w, EdgeSide::Out);
      }
      if (sc.outstanding_nbrs == 0) finish_part(ctx, s, sc.part_count, false);
      return;
    }
    const VertexId w = v.owner();
    PendingNbr& pe = sc.per_nbr.at(w);
    // Neighbor pairs counted once at their smaller endpoint: x > w, both
    // adjacent to self.
    std::vector<VertexId> hits;
    auto it = std::upper_bound(sc.nbrs.begin(), sc.nbrs.end(), w);
    uint32_t i = 0;
    while (i < v.degree() && it != sc.nbrs.end()) {
      VertexId x = v.neighbor(i);
      if (x <= w) {
        i++;
        continue;
      }
      if (x < *it)
        i++;
      else if (*it < x)
        ++it;
      else {
        hits.push_back(x);
        i++;
        ++it;
      }
    }
    std::vector<VertexId> merged;
    merged.reserve(pe.found.size() + hits.size());
    std::set_union(pe.found.begin(), pe.found.end(), hits.begin(), hits.end(),
                   std::back_inserter(merged));
    pe.found.swap(merged);
    if (++pe.seen < 2) return;
    sc.part_count += pe.found.size();
    sc.per_nbr.erase(w);
    if (--sc.outstanding_nbrs == 0) finish_part(ctx, s, sc.part_count, false);
  }

  template <class Ctx>
  void run_on_message(Ctx& ctx, State& s, const Message& m) {
    s.parts_done++;
    if (m.skipped)
      s.status = kSkipped;
    else
      s.partial += m.value;
    if (s.parts_done < ctx.vertical_parts()) return;
    if (s.status != kSkipped) {
      s.stat = s.partial;
      s.status = kComputed;
      best.update(s.stat, ctx.vertex());
    }
  }

 private:
  uint64_t degree_bound(VertexId v) const {
    return uint64_t(index->degree(v, EdgeSide::In)) +
           index->degree(v, EdgeSide::Out);
  }

  template <class Ctx>
  void finish_part(Ctx& ctx, State& s, uint64_t value, bool skipped) {
    if (ctx.vertical_parts() == 1) {
      // Single-part path finalizes inline so the running maximum grows
      // during the iteration and later windows can be pruned against it.
      if (skipped) {
        s.status = kSkipped;
      } else {
        s.stat = value;
        s.status = kComputed;
        best.update(s.stat, ctx.vertex());
      }
    } else {
      ctx.send(ctx.vertex(), {value, skipped});
    }
  }
};

// --------------------------------------------------------------- dispatch

struct AlgoParams {
  std::string algorithm;  // bfs | bc | pr | wcc | tc | ss
  VertexId source = 0;
  double damping = 0.85;
  uint32_t max_iters = 30;  // PageRank iteration cap
  double threshold = 1e-4;  // PageRank delta threshold
  bool ss_pruning = true;
};

struct AlgoResult {
  std::string algorithm;
  // Exactly one of these carries the per-vertex values.
  std::vector<uint32_t> levels;  // bfs
  std::vector<double> scores;    // bc dependency / pr rank
  std::vector<VertexId> labels;  // wcc
  std::vector<uint64_t> counts;  // tc per-vertex
  uint64_t tc_total = 0;
  uint64_t ss_max = 0;
  VertexId ss_argmax = kInvalidVertex;
  std::vector<IterationStats> iterations;
  IoStats io;
  std::vector<TraceEvent> trace;
};

AlgoResult run_algorithm(const GraphFile& file, const GraphIndex& index,
                         const EngineConfig& cfg, const AlgoParams& params);

// Result CSV: header plus one `vertex_id,value` row per vertex (SS emits a
// single `max_scan,argmax_vertex` summary row).
void write_result_csv(const std::string& path, const AlgoResult& result);
void write_iteration_csv(const std::string& path, const AlgoResult& result);

bool is_known_algorithm(const std::string& name);

}  // namespace semigraph
