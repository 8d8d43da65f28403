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

#include <array>
#include <cstdint>

#include "semigraph/types.hpp"

namespace semigraph {

// On-disk graph container (.fgg):
//
//   [GraphHeader, 64 bytes] [pad to 4096] [in-edge region] [pad] [out-edge region]
//
// Each region is a sequence of edge lists in strictly ascending owner ID with
// no gaps; a degree-0 vertex gets a header-only list. One list is
//
//   owner:u32  degree:u32  neighbors:degree*u32 (sorted ascending)
//   attrs:degree*attr_bytes (opaque payload, contiguous after the neighbors)
//
// Undirected graphs store a single region and in_region_offset ==
// out_region_offset. Everything is little-endian; regions are aligned to 4096
// bytes so they start on a page boundary for every page size up to 4 KiB.

inline constexpr std::array<uint8_t, 8> kGraphMagic = {'S', 'E', 'M', 'I',
                                                       'G', 'F', 'G', '1'};
inline constexpr std::array<uint8_t, 8> kIndexMagic = {'S', 'E', 'M', 'I',
                                                       'G', 'F', 'I', '1'};
inline constexpr uint32_t kFormatVersion = 1;
inline constexpr uint64_t kRegionAlign = 4096;
inline constexpr size_t kGraphHeaderBytes = 64;
inline constexpr size_t kListHeaderBytes = 8;  // owner:u32 degree:u32

// Byte size of one on-disk edge list.
inline constexpr uint64_t edge_list_bytes(uint64_t degree, uint16_t attr_bytes) {
  return kListHeaderBytes + degree * 4 + degree * uint64_t(attr_bytes);
}

struct GraphHeader {
  std::array<uint8_t, 8> magic = kGraphMagic;
  uint32_t version = kFormatVersion;
  bool directed = false;
  uint64_t num_vertices = 0;
  // Directed: total directed edges. Undirected: each edge counted once.
  uint64_t num_edges = 0;
  uint16_t attr_bytes = 0;
  uint64_t in_region_offset = 0;
  uint64_t out_region_offset = 0;

  void encode(uint8_t out[kGraphHeaderBytes]) const;
  static GraphHeader decode(const uint8_t in[kGraphHeaderBytes]);
};

// Index file (.fgi) header, followed by:
//   degree codes   num_vertices bytes (undirected) or 2*num_vertices
//                  (directed, interleaved in/out); code 255 marks overflow
//   anchors        ceil(n/anchor_stride) entries of one u64 (undirected) or
//                  two u64 (directed: in then out), absolute file offsets
//   large degrees  num_large entries sorted by id:
//                  (id:u32, deg:u32) undirected; (id:u32, in:u32, out:u32) directed
struct IndexHeader {
  std::array<uint8_t, 8> magic = kIndexMagic;
  uint32_t version = kFormatVersion;
  bool directed = false;
  uint64_t num_vertices = 0;
  uint32_t anchor_stride = 32;
  uint64_t num_large = 0;
  uint16_t attr_bytes = 0;

  static constexpr size_t kBytes = 40;
  void encode(uint8_t out[kBytes]) const;
  static IndexHeader decode(const uint8_t in[kBytes]);
};

inline constexpr uint64_t align_up(uint64_t v, uint64_t a) {
  return (v + a - 1) / a * a;
}

}  // namespace semigraph
