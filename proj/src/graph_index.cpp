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

#include "semigraph/graph_index.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <cstring>
#include <memory>

#include "semigraph/binio.hpp"

namespace semigraph {

GraphIndex GraphIndex::build(const std::vector<uint32_t>& in_degrees,
                             const std::vector<uint32_t>& out_degrees,
                             bool directed, uint16_t attr_bytes,
                             uint64_t in_region_offset,
                             uint64_t out_region_offset,
                             uint32_t anchor_stride) {
  if (anchor_stride == 0 || (anchor_stride & (anchor_stride - 1)))
    throw ContractViolation("anchor_stride must be a power of two");
  if (in_degrees.size() != out_degrees.size())
    throw ContractViolation("degree vectors must have equal length");

  GraphIndex idx;
  idx.num_vertices_ = in_degrees.size();
  idx.directed_ = directed;
  idx.attr_bytes_ = attr_bytes;
  idx.anchor_stride_ = anchor_stride;

  const uint64_t n = idx.num_vertices_;
  const int sides = directed ? 2 : 1;
  idx.codes_.resize(n * sides);

  for (uint64_t v = 0; v < n; v++) {
    uint32_t din = in_degrees[v];
    uint32_t dout = out_degrees[v];
    bool overflow = din >= kOverflowCode || dout >= kOverflowCode;
    if (directed) {
      idx.codes_[2 * v] =
          din >= kOverflowCode ? kOverflowCode : uint8_t(din);
      idx.codes_[2 * v + 1] =
          dout >= kOverflowCode ? kOverflowCode : uint8_t(dout);
      if (overflow) {
        idx.large_.push_back(uint32_t(v));
        idx.large_.push_back(din);
        idx.large_.push_back(dout);
      }
    } else {
      idx.codes_[v] =
          dout >= kOverflowCode ? kOverflowCode : uint8_t(dout);
      if (dout >= kOverflowCode) {
        idx.large_.push_back(uint32_t(v));
        idx.large_.push_back(dout);
      }
    }
  }

  const uint64_t num_anchors = n == 0 ? 0 : (n + anchor_stride - 1) / anchor_stride;
  idx.anchors_.reserve(num_anchors * sides);
  uint64_t in_off = in_region_offset;
  uint64_t out_off = out_region_offset;
  for (uint64_t v = 0; v < n; v++) {
    if (v % anchor_stride == 0) {
      if (directed) {
        idx.anchors_.push_back(in_off);
        idx.anchors_.push_back(out_off);
      } else {
        idx.anchors_.push_back(out_off);
      }
    }
    if (directed) in_off += edge_list_bytes(in_degrees[v], attr_bytes);
    out_off += edge_list_bytes(out_degrees[v], attr_bytes);
  }
  idx.codes_.shrink_to_fit();
  idx.anchors_.shrink_to_fit();
  idx.large_.shrink_to_fit();
  return idx;
}

uint32_t GraphIndex::large_degree(VertexId v, EdgeSide side) const {
  const size_t words = large_entry_words();
  const size_t n = large_.size() / words;
  size_t lo = 0, hi = n;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (large_[mid * words] < v)
      lo = mid + 1;
    else
      hi = mid;
  }
  assert(lo < n && large_[lo * words] == v);
  if (!directed_) return large_[lo * words + 1];
  return side == EdgeSide::In ? large_[lo * words + 1] : large_[lo * words + 2];
}

uint32_t GraphIndex::degree(VertexId v, EdgeSide side) const {
  assert(v < num_vertices_);
  uint8_t code;
  if (directed_)
    code = codes_[2 * uint64_t(v) + (side == EdgeSide::In ? 0 : 1)];
  else
    code = codes_[v];
  if (code != kOverflowCode) return code;
  return large_degree(v, side);
}

GraphIndex::Location GraphIndex::locate(VertexId v, EdgeSide side) const {
  assert(v < num_vertices_);
  const uint64_t anchor_vertex = (v / anchor_stride_) * anchor_stride_;
  const uint64_t anchor_idx = v / anchor_stride_;
  uint64_t off;
  if (directed_)
    off = anchors_[2 * anchor_idx + (side == EdgeSide::In ? 0 : 1)];
  else
    off = anchors_[anchor_idx];
  for (uint64_t u = anchor_vertex; u < v; u++)
    off += edge_list_bytes(degree(VertexId(u), side), attr_bytes_);
  return {off, edge_list_bytes(degree(v, side), attr_bytes_)};
}

uint64_t GraphIndex::memory_bytes() const {
  return codes_.size() * sizeof(uint8_t) + anchors_.size() * sizeof(uint64_t) +
         large_.size() * sizeof(uint32_t) + sizeof(*this);
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_all(std::FILE* f, const void* p, size_t n, const std::string& path) {
  if (n && std::fwrite(p, 1, n, f) != n)
    throw IoError("short write to " + path);
}

void read_all(std::FILE* f, void* p, size_t n, const std::string& path) {
  if (n && std::fread(p, 1, n, f) != n)
    throw FormatError("truncated index file " + path);
}

}  // namespace

void GraphIndex::save(const std::string& path) const {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open " + path + " for writing");

  IndexHeader h;
  h.directed = directed_;
  h.num_vertices = num_vertices_;
  h.anchor_stride = anchor_stride_;
  h.num_large = num_large();
  h.attr_bytes = attr_bytes_;
  uint8_t hdr[IndexHeader::kBytes];
  h.encode(hdr);
  write_all(f.get(), hdr, sizeof(hdr), path);
  write_all(f.get(), codes_.data(), codes_.size(), path);

  std::vector<uint8_t> buf(anchors_.size() * 8);
  for (size_t i = 0; i < anchors_.size(); i++)
    put_u64(buf.data() + 8 * i, anchors_[i]);
  write_all(f.get(), buf.data(), buf.size(), path);

  buf.assign(large_.size() * 4, 0);
  for (size_t i = 0; i < large_.size(); i++)
    put_u32(buf.data() + 4 * i, large_[i]);
  write_all(f.get(), buf.data(), buf.size(), path);

  if (std::fflush(f.get()) != 0) throw IoError("flush failed for " + path);
}

GraphIndex GraphIndex::load(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open " + path);

  uint8_t hdr[IndexHeader::kBytes];
  read_all(f.get(), hdr, sizeof(hdr), path);
  IndexHeader h = IndexHeader::decode(hdr);

  GraphIndex idx;
  idx.num_vertices_ = h.num_vertices;
  idx.directed_ = h.directed;
  idx.attr_bytes_ = h.attr_bytes;
  idx.anchor_stride_ = h.anchor_stride;

  const int sides = h.directed ? 2 : 1;
  idx.codes_.resize(h.num_vertices * sides);
  read_all(f.get(), idx.codes_.data(), idx.codes_.size(), path);

  const uint64_t num_anchors =
      h.num_vertices == 0
          ? 0
          : (h.num_vertices + h.anchor_stride - 1) / h.anchor_stride;
  std::vector<uint8_t> buf(num_anchors * sides * 8);
  read_all(f.get(), buf.data(), buf.size(), path);
  idx.anchors_.resize(num_anchors * sides);
  for (size_t i = 0; i < idx.anchors_.size(); i++)
    idx.anchors_[i] = get_u64(buf.data() + 8 * i);

  const size_t words = h.directed ? 3 : 2;
  buf.assign(h.num_large * words * 4, 0);
  read_all(f.get(), buf.data(), buf.size(), path);
  idx.large_.resize(h.num_large * words);
  for (size_t i = 0; i < idx.large_.size(); i++)
    idx.large_[i] = get_u32(buf.data() + 4 * i);
  return idx;
}

}  // namespace semigraph
