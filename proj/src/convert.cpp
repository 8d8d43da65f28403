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

#include "semigraph/convert.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "semigraph/binio.hpp"
#include "semigraph/format.hpp"
#include "semigraph/graph_index.hpp"

namespace semigraph {

namespace {

bool parse_id(const char*& p, const char* end, uint64_t& out) {
  if (p == end || !std::isdigit(uint8_t(*p))) return false;
  uint64_t v = 0;
  while (p != end && std::isdigit(uint8_t(*p))) {
    v = v * 10 + uint64_t(*p - '0');
    if (v > UINT32_MAX) return false;
    ++p;
  }
  out = v;
  return true;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

class RegionWriter {
 public:
  RegionWriter(std::FILE* f, const std::string& path) : f_(f), path_(path) {}

  void write(const void* p, size_t n) {
    if (n && std::fwrite(p, 1, n, f_) != n)
      throw IoError("short write to " + path_);
    pos_ += n;
  }

  void pad_to(uint64_t target) {
    static const uint8_t zeros[4096] = {};
    while (pos_ < target) {
      size_t chunk = size_t(std::min<uint64_t>(target - pos_, sizeof(zeros)));
      write(zeros, chunk);
    }
  }

  uint64_t pos() const { return pos_; }

 private:
  std::FILE* f_;
  std::string path_;
  uint64_t pos_ = 0;
};

// Emits one region: ascending owner IDs with no gaps, header-only lists for
// degree-0 vertices, zero-filled attribute slots after each neighbor array.
void write_region(RegionWriter& w, uint64_t num_vertices,
                  const std::vector<std::pair<VertexId, VertexId>>& edges,
                  uint16_t attr_bytes) {
  std::vector<uint8_t> buf;
  std::vector<uint8_t> attr_zeros(size_t(attr_bytes) * 256, 0);
  size_t i = 0;
  for (uint64_t v = 0; v < num_vertices; v++) {
    size_t begin = i;
    while (i < edges.size() && edges[i].first == v) i++;
    uint32_t degree = uint32_t(i - begin);
    buf.resize(kListHeaderBytes + 4 * size_t(degree));
    put_u32(buf.data(), uint32_t(v));
    put_u32(buf.data() + 4, degree);
    for (uint32_t k = 0; k < degree; k++)
      put_u32(buf.data() + kListHeaderBytes + 4 * size_t(k),
              edges[begin + k].second);
    w.write(buf.data(), buf.size());
    uint64_t attr_total = uint64_t(degree) * attr_bytes;
    while (attr_total > 0) {
      size_t chunk = size_t(std::min<uint64_t>(attr_total, attr_zeros.size()));
      if (attr_zeros.empty()) break;
      w.write(attr_zeros.data(), chunk);
      attr_total -= chunk;
    }
  }
}

std::vector<uint32_t> count_degrees(
    uint64_t num_vertices, const std::vector<std::pair<VertexId, VertexId>>& edges) {
  std::vector<uint32_t> deg(num_vertices, 0);
  for (const auto& e : edges) deg[e.first]++;
  return deg;
}

}  // namespace

std::vector<std::pair<VertexId, VertexId>> parse_edge_list(std::istream& in) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p != end && std::isspace(uint8_t(*p))) ++p;
    if (p == end || *p == '#') continue;
    uint64_t src, dst;
    if (!parse_id(p, end, src))
      throw ParseError(lineno, "expected a decimal source ID");
    while (p != end && std::isspace(uint8_t(*p))) ++p;
    if (!parse_id(p, end, dst))
      throw ParseError(lineno, "expected a decimal destination ID");
    while (p != end && std::isspace(uint8_t(*p))) ++p;
    if (p != end) throw ParseError(lineno, "trailing characters after edge");
    edges.emplace_back(VertexId(src), VertexId(dst));
  }
  return edges;
}

ConvertResult convert(std::istream& text, const std::string& graph_path,
                      const std::string& index_path,
                      const ConvertOptions& opts) {
  auto raw = parse_edge_list(text);

  ConvertResult res;
  uint64_t max_id = 0;
  bool any = false;
  for (const auto& e : raw) {
    max_id = std::max<uint64_t>(max_id, std::max(e.first, e.second));
    any = true;
  }
  res.num_vertices = any ? max_id + 1 : 0;

  // Out-edge pairs (src, dst); undirected graphs get both directions so a
  // single region serves either side.
  std::vector<std::pair<VertexId, VertexId>> out_pairs;
  out_pairs.reserve(raw.size() * (opts.directed ? 1 : 2));
  for (const auto& e : raw) {
    if (e.first == e.second) {
      res.dropped_self_loops++;
      continue;
    }
    out_pairs.emplace_back(e.first, e.second);
    if (!opts.directed) out_pairs.emplace_back(e.second, e.first);
  }
  raw.clear();
  raw.shrink_to_fit();

  std::sort(out_pairs.begin(), out_pairs.end());
  size_t before = out_pairs.size();
  out_pairs.erase(std::unique(out_pairs.begin(), out_pairs.end()),
                  out_pairs.end());
  size_t collapsed = before - out_pairs.size();
  if (opts.directed) {
    res.collapsed_duplicates = collapsed;
    res.num_edges = out_pairs.size();
  } else {
    res.collapsed_duplicates = collapsed / 2;
    res.num_edges = out_pairs.size() / 2;
  }

  std::vector<std::pair<VertexId, VertexId>> in_pairs;
  if (opts.directed) {
    in_pairs.reserve(out_pairs.size());
    for (const auto& e : out_pairs) in_pairs.emplace_back(e.second, e.first);
    std::sort(in_pairs.begin(), in_pairs.end());
  }

  GraphHeader hdr;
  hdr.directed = opts.directed;
  hdr.num_vertices = res.num_vertices;
  hdr.num_edges = res.num_edges;
  hdr.attr_bytes = opts.attr_bytes;

  auto out_degrees = count_degrees(res.num_vertices, out_pairs);
  uint64_t region_bytes = 0;
  for (uint32_t d : out_degrees)
    region_bytes += edge_list_bytes(d, opts.attr_bytes);

  hdr.in_region_offset = align_up(kGraphHeaderBytes, kRegionAlign);
  if (opts.directed) {
    // In-region and out-region hold the same edge count, so equal bytes.
    hdr.out_region_offset =
        align_up(hdr.in_region_offset + region_bytes, kRegionAlign);
  } else {
    hdr.out_region_offset = hdr.in_region_offset;
  }

  FilePtr f(std::fopen(graph_path.c_str(), "wb"));
  if (!f) throw IoError("cannot open " + graph_path + " for writing");
  RegionWriter w(f.get(), graph_path);

  uint8_t hdr_bytes[kGraphHeaderBytes];
  hdr.encode(hdr_bytes);
  w.write(hdr_bytes, sizeof(hdr_bytes));
  w.pad_to(hdr.in_region_offset);
  if (opts.directed) {
    write_region(w, res.num_vertices, in_pairs, opts.attr_bytes);
    w.pad_to(hdr.out_region_offset);
  }
  write_region(w, res.num_vertices, out_pairs, opts.attr_bytes);
  w.pad_to(align_up(w.pos(), kRegionAlign));
  if (std::fflush(f.get()) != 0) throw IoError("flush failed: " + graph_path);
  f.reset();

  auto in_degrees =
      opts.directed ? count_degrees(res.num_vertices, in_pairs) : out_degrees;
  GraphIndex index = GraphIndex::build(
      in_degrees, out_degrees, opts.directed, opts.attr_bytes,
      hdr.in_region_offset, hdr.out_region_offset, opts.anchor_stride);
  index.save(index_path);
  return res;
}

ConvertResult convert_file(const std::string& text_path,
                           const std::string& graph_path,
                           const std::string& index_path,
                           const ConvertOptions& opts) {
  std::ifstream in(text_path);
  if (!in) throw IoError("cannot open " + text_path);
  return convert(in, graph_path, index_path, opts);
}

}  // namespace semigraph
