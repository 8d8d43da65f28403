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
#include <string>
#include <utility>
#include <vector>

#include "semigraph/types.hpp"

namespace semigraph::gen {

// Deterministic synthetic edge lists for tests and `bench`. All generators
// are pure functions of their arguments and the seed.

// Uniformly random directed pairs, roughly n*avg_degree edges before dedup.
std::vector<std::pair<VertexId, VertexId>> erdos_renyi(uint64_t n,
                                                       double avg_degree,
                                                       uint64_t seed);

// Heavy-tailed out-degrees (Pareto-ish, exponent ~2.1) with uniform targets.
std::vector<std::pair<VertexId, VertexId>> power_law(uint64_t n,
                                                     double avg_degree,
                                                     uint64_t seed);

// Sparse background graph plus one hub adjacent to hub_degree random
// vertices in both directions; forces computational skew.
std::vector<std::pair<VertexId, VertexId>> hub_graph(uint64_t n,
                                                     uint32_t hub_degree,
                                                     double avg_degree,
                                                     uint64_t seed);

// Edges as "src dst" lines, one per edge, for feeding both convert and the
// oracles from identical text.
std::string to_text(const std::vector<std::pair<VertexId, VertexId>>& edges);

void write_text_file(const std::string& path,
                     const std::vector<std::pair<VertexId, VertexId>>& edges);

}  // namespace semigraph::gen
