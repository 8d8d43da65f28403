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

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "semigraph/types.hpp"

namespace semigraph::oracle {

// Plain in-memory reference implementations used by tests, `verify` and the
// acceptance suite. Deliberately simple, single-threaded, and built straight
// from the text edge list so they share no code with the binary store or the
// engine-side algorithms. Guarded to desk-scale graphs.

inline constexpr uint64_t kMaxOracleVertices = 200'000;

struct DenseGraph {
  uint64_t n = 0;
  bool directed = true;
  std::vector<std::vector<VertexId>> out;  // sorted, deduped, no self-loops
  std::vector<std::vector<VertexId>> in;
  std::vector<std::vector<VertexId>> undirected;  // union of in/out, deduped

  // Applies the same cleanup rules as conversion: self-loops dropped,
  // parallel edges collapsed, num_vertices = max id + 1.
  static DenseGraph from_edges(
      const std::vector<std::pair<VertexId, VertexId>>& edges, bool directed);
  static DenseGraph from_text(std::istream& text, bool directed);
  static DenseGraph from_text_file(const std::string& path, bool directed);
};

// Queue BFS over out-edges; unreachable vertices get kInvalidVertex.
std::vector<uint32_t> bfs(const DenseGraph& g, VertexId source);

// Single-source Brandes dependency accumulation over out-edges.
// delta[source] is 0 by convention.
std::vector<double> brandes(const DenseGraph& g, VertexId source);

// Synchronous dense PageRank, rank initialized to 1-d, run for exactly
// `iters` sweeps. Dangling vertices absorb rank (no redistribution).
std::vector<double> pagerank_dense(const DenseGraph& g, double d,
                                   uint32_t iters);

// Union-find over the undirected projection; label = smallest member ID.
std::vector<VertexId> wcc_unionfind(const DenseGraph& g);

struct TriangleCounts {
  std::vector<uint64_t> per_vertex;  // triangles incident to each vertex
  uint64_t total = 0;
};

// Hashed-wedge triple check over the undirected projection.
TriangleCounts triangles_bruteforce(const DenseGraph& g);

struct ScanResult {
  std::vector<uint64_t> locality;  // edges in each closed neighborhood
  uint64_t max_stat = 0;
  VertexId argmax = kInvalidVertex;  // smallest ID among maximizers
};

// Exhaustive per-vertex neighborhood edge counts, no pruning.
ScanResult scan_exhaustive(const DenseGraph& g);

// Full per-vertex offset table for one region from cumulative list sizes:
// table[v] = region_base + sum_{u<v} (8 + 4*deg[u] + attr_bytes*deg[u]).
std::vector<uint64_t> offsets(const std::vector<uint32_t>& degrees,
                              uint16_t attr_bytes, uint64_t region_base);

}  // namespace semigraph::oracle
