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

#include "semigraph/format.hpp"

#include <cstring>

#include "semigraph/binio.hpp"

namespace semigraph {

void GraphHeader::encode(uint8_t out[kGraphHeaderBytes]) const {
  std::memset(out, 0, kGraphHeaderBytes);
  std::memcpy(out, magic.data(), 8);
  put_u32(out + 8, version);
  out[12] = directed ? 1 : 0;
  put_u64(out + 13, num_vertices);
  put_u64(out + 21, num_edges);
  put_u16(out + 29, attr_bytes);
  put_u64(out + 31, in_region_offset);
  put_u64(out + 39, out_region_offset);
}

GraphHeader GraphHeader::decode(const uint8_t in[kGraphHeaderBytes]) {
  GraphHeader h;
  std::memcpy(h.magic.data(), in, 8);
  if (h.magic != kGraphMagic) throw FormatError("bad graph file magic");
  h.version = get_u32(in + 8);
  if (h.version != kFormatVersion)
    throw FormatError("unsupported graph file version " +
                      std::to_string(h.version));
  h.directed = in[12] != 0;
  h.num_vertices = get_u64(in + 13);
  h.num_edges = get_u64(in + 21);
  h.attr_bytes = get_u16(in + 29);
  h.in_region_offset = get_u64(in + 31);
  h.out_region_offset = get_u64(in + 39);
  if (h.in_region_offset % kRegionAlign || h.out_region_offset % kRegionAlign)
    throw FormatError("graph regions are not page-aligned");
  if (!h.directed && h.in_region_offset != h.out_region_offset)
    throw FormatError("undirected graph must have a single region");
  return h;
}

void IndexHeader::encode(uint8_t out[kBytes]) const {
  std::memset(out, 0, kBytes);
  std::memcpy(out, magic.data(), 8);
  put_u32(out + 8, version);
  out[12] = directed ? 1 : 0;
  put_u64(out + 13, num_vertices);
  put_u32(out + 21, anchor_stride);
  put_u64(out + 25, num_large);
  put_u16(out + 33, attr_bytes);
}

IndexHeader IndexHeader::decode(const uint8_t in[kBytes]) {
  IndexHeader h;
  std::memcpy(h.magic.data(), in, 8);
  if (h.magic != kIndexMagic) throw FormatError("bad index file magic");
  h.version = get_u32(in + 8);
  if (h.version != kFormatVersion)
    throw FormatError("unsupported index file version " +
                      std::to_string(h.version));
  h.directed = in[12] != 0;
  h.num_vertices = get_u64(in + 13);
  h.anchor_stride = get_u32(in + 21);
  h.num_large = get_u64(in + 25);
  h.attr_bytes = get_u16(in + 33);
  if (h.anchor_stride == 0 || (h.anchor_stride & (h.anchor_stride - 1)))
    throw FormatError("anchor_stride must be a power of two");
  return h;
}

}  // namespace semigraph
