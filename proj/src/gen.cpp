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

#include "semigraph/gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace semigraph::gen {

std::vector<std::pair<VertexId, VertexId>> erdos_renyi(uint64_t n,
                                                       double avg_degree,
                                                       uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint64_t> pick(0, n - 1);
  uint64_t m = uint64_t(double(n) * avg_degree);
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(m);
  for (uint64_t i = 0; i < m; i++) {
    VertexId u = VertexId(pick(rng));
    VertexId v = VertexId(pick(rng));
    if (u != v) edges.emplace_back(u, v);
  }
  return edges;
}

std::vector<std::pair<VertexId, VertexId>> power_law(uint64_t n,
                                                     double avg_degree,
                                                     uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<uint64_t> pick(0, n - 1);
  // Pareto out-degree with alpha ~2.1, scaled so the mean lands near
  // avg_degree, truncated at n/4.
  const double alpha = 2.1;
  const double xmin = avg_degree * (alpha - 2.0) / (alpha - 1.0);
  const uint64_t cap = std::max<uint64_t>(4, n / 4);
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(uint64_t(double(n) * avg_degree));
  for (uint64_t v = 0; v < n; v++) {
    double x = xmin / std::pow(1.0 - uni(rng), 1.0 / (alpha - 1.0));
    uint64_t deg = std::min<uint64_t>(uint64_t(x), cap);
    for (uint64_t k = 0; k < deg; k++) {
      VertexId w = VertexId(pick(rng));
      if (w != v) edges.emplace_back(VertexId(v), w);
    }
  }
  return edges;
}

std::vector<std::pair<VertexId, VertexId>> hub_graph(uint64_t n,
                                                     uint32_t hub_degree,
                                                     double avg_degree,
                                                     uint64_t seed) {
  auto edges = erdos_renyi(n, avg_degree, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<uint64_t> pick(1, n - 1);
  const VertexId hub = 0;
  for (uint32_t i = 0; i < hub_degree; i++) {
    VertexId w = VertexId(pick(rng));
    edges.emplace_back(hub, w);
    edges.emplace_back(w, hub);
  }
  return edges;
}

std::string to_text(const std::vector<std::pair<VertexId, VertexId>>& edges) {
  std::string out;
  out.reserve(edges.size() * 12);
  char buf[32];
  for (const auto& e : edges) {
    int len = std::snprintf(buf, sizeof(buf), "%u %u\n", e.first, e.second);
    out.append(buf, size_t(len));
  }
  return out;
}

void write_text_file(const std::string& path,
                     const std::vector<std::pair<VertexId, VertexId>>& edges) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << to_text(edges);
  if (!out) throw IoError("short write to " + path);
}

}  // namespace semigraph::gen
