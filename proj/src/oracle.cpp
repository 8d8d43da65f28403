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

#include "semigraph/oracle.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "semigraph/convert.hpp"

namespace semigraph::oracle {

namespace {

void sort_dedup(std::vector<VertexId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

DenseGraph DenseGraph::from_edges(
    const std::vector<std::pair<VertexId, VertexId>>& edges, bool directed) {
  uint64_t n = 0;
  for (const auto& e : edges)
    n = std::max<uint64_t>(n, uint64_t(std::max(e.first, e.second)) + 1);
  if (n > kMaxOracleVertices)
    throw ContractViolation("oracle size guard exceeded: " + std::to_string(n) +
                            " vertices");
  DenseGraph g;
  g.n = n;
  g.directed = directed;
  g.out.resize(n);
  g.in.resize(n);
  g.undirected.resize(n);
  for (const auto& e : edges) {
    if (e.first == e.second) continue;
    if (directed) {
      g.out[e.first].push_back(e.second);
      g.in[e.second].push_back(e.first);
    } else {
      g.out[e.first].push_back(e.second);
      g.out[e.second].push_back(e.first);
    }
  }
  if (!directed) g.in = g.out;
  for (uint64_t v = 0; v < n; v++) {
    sort_dedup(g.out[v]);
    sort_dedup(g.in[v]);
    g.undirected[v] = g.out[v];
    g.undirected[v].insert(g.undirected[v].end(), g.in[v].begin(),
                           g.in[v].end());
    sort_dedup(g.undirected[v]);
  }
  return g;
}

DenseGraph DenseGraph::from_text(std::istream& text, bool directed) {
  return from_edges(parse_edge_list(text), directed);
}

DenseGraph DenseGraph::from_text_file(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return from_text(in, directed);
}

std::vector<uint32_t> bfs(const DenseGraph& g, VertexId source) {
  std::vector<uint32_t> level(g.n, kInvalidVertex);
  std::deque<VertexId> q;
  level[source] = 0;
  q.push_back(source);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    for (VertexId w : g.out[v]) {
      if (level[w] == kInvalidVertex) {
        level[w] = level[v] + 1;
        q.push_back(w);
      }
    }
  }
  return level;
}

std::vector<double> brandes(const DenseGraph& g, VertexId source) {
  std::vector<double> delta(g.n, 0.0);
  std::vector<uint64_t> sigma(g.n, 0);
  std::vector<uint32_t> dist(g.n, kInvalidVertex);
  std::vector<VertexId> order;
  order.reserve(g.n);

  std::deque<VertexId> q;
  sigma[source] = 1;
  dist[source] = 0;
  q.push_back(source);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    order.push_back(v);
    for (VertexId w : g.out[v]) {
      if (dist[w] == kInvalidVertex) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
      if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    VertexId w = *it;
    for (VertexId v : g.in[w]) {
      if (dist[v] != kInvalidVertex && dist[v] + 1 == dist[w])
        delta[v] += double(sigma[v]) / double(sigma[w]) * (1.0 + delta[w]);
    }
  }
  delta[source] = 0.0;
  return delta;
}

std::vector<double> pagerank_dense(const DenseGraph& g, double d,
                                   uint32_t iters) {
  std::vector<double> rank(g.n, 1.0 - d);
  std::vector<double> next(g.n);
  for (uint32_t it = 0; it < iters; it++) {
    for (uint64_t v = 0; v < g.n; v++) {
      double sum = 0.0;
      for (VertexId u : g.in[v])
        if (!g.out[u].empty()) sum += rank[u] / double(g.out[u].size());
      next[v] = (1.0 - d) + d * sum;
    }
    rank.swap(next);
  }
  return rank;
}

std::vector<VertexId> wcc_unionfind(const DenseGraph& g) {
  std::vector<VertexId> parent(g.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](VertexId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (uint64_t v = 0; v < g.n; v++)
    for (VertexId w : g.undirected[v]) {
      VertexId a = find(VertexId(v)), b = find(w);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<VertexId> label(g.n);
  // Roots are the smallest IDs in their components because unions always
  // point the larger root at the smaller one.
  for (uint64_t v = 0; v < g.n; v++) label[v] = find(VertexId(v));
  return label;
}

TriangleCounts triangles_bruteforce(const DenseGraph& g) {
  TriangleCounts tc;
  tc.per_vertex.assign(g.n, 0);
  // Wedge check: for each edge (u,w) with u < w, common neighbors x > w
  // close a triangle counted exactly once at its smallest corner u.
  for (uint64_t u = 0; u < g.n; u++) {
    for (VertexId w : g.undirected[u]) {
      if (w <= u) continue;
      const auto& nu = g.undirected[u];
      const auto& nw = g.undirected[w];
      auto iu = std::upper_bound(nu.begin(), nu.end(), w);
      auto iw = std::upper_bound(nw.begin(), nw.end(), w);
      while (iu != nu.end() && iw != nw.end()) {
        if (*iu < *iw)
          ++iu;
        else if (*iw < *iu)
          ++iw;
        else {
          tc.per_vertex[u]++;
          tc.per_vertex[w]++;
          tc.per_vertex[*iu]++;
          tc.total++;
          ++iu;
          ++iw;
        }
      }
    }
  }
  return tc;
}

ScanResult scan_exhaustive(const DenseGraph& g) {
  ScanResult r;
  r.locality.assign(g.n, 0);
  r.max_stat = 0;
  r.argmax = g.n ? 0 : kInvalidVertex;
  for (uint64_t v = 0; v < g.n; v++) {
    const auto& nv = g.undirected[v];
    uint64_t edges = nv.size();  // v's own incident edges
    for (VertexId w : nv) {
      const auto& nw = g.undirected[w];
      // Count each neighbor-neighbor edge once via the w < x ordering.
      auto it = std::upper_bound(nw.begin(), nw.end(), w);
      auto iv = std::upper_bound(nv.begin(), nv.end(), w);
      while (it != nw.end() && iv != nv.end()) {
        if (*it < *iv)
          ++it;
        else if (*iv < *it)
          ++iv;
        else {
          edges++;
          ++it;
          ++iv;
        }
      }
    }
    r.locality[v] = edges;
    if (edges > r.max_stat) {
      r.max_stat = edges;
      r.argmax = VertexId(v);
    }
  }
  return r;
}

std::vector<uint64_t> offsets(const std::vector<uint32_t>& degrees,
                              uint16_t attr_bytes, uint64_t region_base) {
  std::vector<uint64_t> table(degrees.size());
  uint64_t off = region_base;
  for (size_t v = 0; v < degrees.size(); v++) {
    table[v] = off;
    off += 8 + uint64_t(degrees[v]) * 4 + uint64_t(degrees[v]) * attr_bytes;
  }
  return table;
}

}  // namespace semigraph::oracle
