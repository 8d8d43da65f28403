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
#include <vector>

#include "semigraph/format.hpp"
#include "semigraph/types.hpp"

namespace semigraph {

// Compact per-vertex index over the on-disk edge-list regions.
//
// Degrees are stored as one byte per vertex per side; the code 255 marks an
// overflow whose exact degree lives in a sorted side table (12 bytes per
// directed entry, 8 undirected). Absolute byte offsets are kept only for
// every anchor_stride-th vertex; any other location is recomputed at runtime
// by summing at most anchor_stride-1 list sizes. With the default stride of
// 32 this costs slightly more than 1.25 bytes per vertex undirected and 2.5
// directed.
//
// Immutable after construction; safe for concurrent readers.
class GraphIndex {
 public:
  struct Location {
    uint64_t offset;  // absolute file offset of the list
    uint64_t length;  // list byte length including its 8-byte header
  };

  static constexpr uint8_t kOverflowCode = 255;
  static constexpr uint32_t kDefaultAnchorStride = 32;

  GraphIndex() = default;

  // Builds the index from exact per-side degrees. For undirected graphs pass
  // the same vector twice (only one copy is stored). region offsets are the
  // absolute file offsets where each region starts.
  static GraphIndex build(const std::vector<uint32_t>& in_degrees,
                          const std::vector<uint32_t>& out_degrees,
                          bool directed, uint16_t attr_bytes,
                          uint64_t in_region_offset, uint64_t out_region_offset,
                          uint32_t anchor_stride = kDefaultAnchorStride);

  uint64_t num_vertices() const { return num_vertices_; }
  bool directed() const { return directed_; }
  uint16_t attr_bytes() const { return attr_bytes_; }
  uint32_t anchor_stride() const { return anchor_stride_; }
  uint64_t num_large() const { return large_.size() / large_entry_words(); }

  // Exact degree; consults the overflow table when the code is 255.
  uint32_t degree(VertexId v, EdgeSide side) const;

  // Absolute offset and byte length of v's edge list in the requested
  // region, recomputed from the nearest preceding anchor.
  Location locate(VertexId v, EdgeSide side) const;

  uint64_t list_bytes(VertexId v, EdgeSide side) const {
    return edge_list_bytes(degree(v, side), attr_bytes_);
  }

  // Measured footprint of the index payload (degree codes + anchors +
  // overflow entries + fixed struct overhead).
  uint64_t memory_bytes() const;

  void save(const std::string& path) const;
  static GraphIndex load(const std::string& path);

 private:
  size_t large_entry_words() const { return directed_ ? 3 : 2; }
  uint32_t large_degree(VertexId v, EdgeSide side) const;

  uint64_t num_vertices_ = 0;
  bool directed_ = false;
  uint16_t attr_bytes_ = 0;
  uint32_t anchor_stride_ = kDefaultAnchorStride;
  // 1 byte per vertex (undirected) or interleaved in,out pairs (directed).
  std::vector<uint8_t> codes_;
  // One u64 per anchor point (undirected) or in,out pairs (directed).
  std::vector<uint64_t> anchors_;
  // Sorted by id: (id, deg) undirected, (id, in, out) directed.
  std::vector<uint32_t> large_;
};

}  // namespace semigraph
