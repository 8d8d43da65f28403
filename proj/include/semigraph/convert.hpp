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

namespace semigraph {

// Text edge-list ingestion: one "src dst" pair of decimal IDs per line,
// whitespace-separated, '#' comment lines and blank lines skipped.
// Self-loops are dropped and parallel edges collapsed; the output adjacency
// is sorted ascending. Conversion is single-threaded and deterministic:
// the same input always produces byte-identical files.

struct ConvertOptions {
  bool directed = true;
  uint16_t attr_bytes = 0;  // opaque payload slots, zero-filled at conversion
  uint32_t anchor_stride = 32;
};

struct ConvertResult {
  uint64_t num_vertices = 0;
  // Directed edges after dedup, or unique undirected edges.
  uint64_t num_edges = 0;
  uint64_t dropped_self_loops = 0;
  uint64_t collapsed_duplicates = 0;
};

// Parses the stream into an edge list. Throws ParseError with the offending
// 1-based line number on malformed input or an ID that does not fit u32.
std::vector<std::pair<VertexId, VertexId>> parse_edge_list(std::istream& in);

// Writes graph_path (.fgg) and index_path (.fgi).
ConvertResult convert(std::istream& text, const std::string& graph_path,
                      const std::string& index_path,
                      const ConvertOptions& opts = {});

ConvertResult convert_file(const std::string& text_path,
                           const std::string& graph_path,
                           const std::string& index_path,
                           const ConvertOptions& opts = {});

}  // namespace semigraph
