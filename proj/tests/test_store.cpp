#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "semigraph/binio.hpp"
#include "semigraph/convert.hpp"
#include "semigraph/format.hpp"
#include "semigraph/gen.hpp"
#include "semigraph/graph_file.hpp"
#include "semigraph/graph_index.hpp"
#include "semigraph/oracle.hpp"

using namespace semigraph;
using testutil::TempDir;

namespace {

struct Converted {
  TempDir dir;
  ConvertResult res;
  std::string fgg, fgi;

  Converted(const std::string& text, const ConvertOptions& opts) {
    fgg = dir.file("g.fgg");
    fgi = dir.file("g.fgi");
    std::istringstream in(text);
    res = convert(in, fgg, fgi, opts);
  }
};

std::vector<std::vector<VertexId>> read_all_lists(const GraphFile& f,
                                                  const GraphIndex& idx,
                                                  EdgeSide side) {
  std::vector<std::vector<VertexId>> out(idx.num_vertices());
  for (VertexId v = 0; v < idx.num_vertices(); v++)
    out[v] = f.read_list_direct(idx, v, side);
  return out;
}

}  // namespace

TEST_CASE("graph header encodes to the declared 64-byte layout") {
  GraphHeader h;
  h.directed = true;
  h.num_vertices = 0x1122334455667788ull;
  h.num_edges = 42;
  h.attr_bytes = 7;
  h.in_region_offset = 4096;
  h.out_region_offset = 8192;
  uint8_t b[kGraphHeaderBytes];
  h.encode(b);
  CHECK(std::string(b, b + 8) == "SEMIGFG1");
  CHECK(get_u32(b + 8) == 1);  // version
  CHECK(b[12] == 1);           // directed flag
  CHECK(get_u64(b + 13) == h.num_vertices);
  CHECK(get_u64(b + 21) == 42);
  CHECK(get_u16(b + 29) == 7);
  CHECK(get_u64(b + 31) == 4096);
  CHECK(get_u64(b + 39) == 8192);
  for (size_t i = 47; i < 64; i++) CHECK(b[i] == 0);

  GraphHeader d = GraphHeader::decode(b);
  CHECK(d.num_vertices == h.num_vertices);
  CHECK(d.directed == h.directed);
  CHECK(d.attr_bytes == 7);
}

TEST_CASE("convert builds directed in/out lists") {
  Converted c("0 1\n1 2\n", {.directed = true});
  CHECK(c.res.num_vertices == 3);
  CHECK(c.res.num_edges == 2);
  GraphFile f(c.fgg);
  GraphIndex idx = GraphIndex::load(c.fgi);
  auto out = read_all_lists(f, idx, EdgeSide::Out);
  auto in = read_all_lists(f, idx, EdgeSide::In);
  CHECK(out == std::vector<std::vector<VertexId>>{{1}, {2}, {}});
  CHECK(in == std::vector<std::vector<VertexId>>{{}, {0}, {1}});
}

TEST_CASE("convert drops self-loops and collapses duplicates") {
  Converted c("0 1\n0 1\n1 1\n", {.directed = true});
  CHECK(c.res.num_vertices == 2);
  CHECK(c.res.num_edges == 1);
  CHECK(c.res.dropped_self_loops == 1);
  CHECK(c.res.collapsed_duplicates == 1);
  GraphFile f(c.fgg);
  GraphIndex idx = GraphIndex::load(c.fgi);
  CHECK(read_all_lists(f, idx, EdgeSide::Out) ==
        std::vector<std::vector<VertexId>>{{1}, {}});
}

TEST_CASE("undirected graphs share one region") {
  Converted c("0 1\n2 1\n", {.directed = false});
  GraphFile f(c.fgg);
  CHECK(f.header().in_region_offset == f.header().out_region_offset);
  CHECK(c.res.num_edges == 2);
  GraphIndex idx = GraphIndex::load(c.fgi);
  CHECK(read_all_lists(f, idx, EdgeSide::Out) ==
        std::vector<std::vector<VertexId>>{{1}, {0, 2}, {1}});
  CHECK(idx.degree(1, EdgeSide::In) == 2);
}

TEST_CASE("malformed input fails with the line number") {
  TempDir d;
  std::istringstream in("0 1\nx 2\n");
  CHECK_THROWS_WITH_AS(convert(in, d.file("g"), d.file("i"), {}),
                       doctest::Contains("line 2"), ParseError);
  std::istringstream in2("0 1\n3\n");
  CHECK_THROWS_AS(convert(in2, d.file("g"), d.file("i"), {}), ParseError);
  std::istringstream in3("0 1\n1 5000000000\n");  // does not fit u32
  CHECK_THROWS_WITH_AS(convert(in3, d.file("g"), d.file("i"), {}),
                       doctest::Contains("line 2"), ParseError);
}

TEST_CASE("comments and blank lines are skipped") {
  Converted c("# header comment\n\n0 1\n  # indented comment\n1 2\n",
              {.directed = true});
  CHECK(c.res.num_edges == 2);
}

TEST_CASE("index offsets follow the byte-size formula") {
  // degrees [3,5,2]: offset(v2) = R + (8+12) + (8+20) = R + 48, length 16
  Converted c("0 1\n0 2\n0 3\n1 0\n1 2\n1 3\n1 4\n1 5\n2 0\n2 1\n",
              {.directed = true});
  GraphIndex idx = GraphIndex::load(c.fgi);
  GraphFile f(c.fgg);
  const uint64_t R = f.header().out_region_offset;
  CHECK(idx.degree(0, EdgeSide::Out) == 3);
  CHECK(idx.degree(1, EdgeSide::Out) == 5);
  CHECK(idx.degree(2, EdgeSide::Out) == 2);
  auto loc = idx.locate(2, EdgeSide::Out);
  CHECK(loc.offset == R + 48);
  CHECK(loc.length == 16);
  // a vertex exactly at an anchor returns the stored anchor offset
  auto loc0 = idx.locate(0, EdgeSide::Out);
  CHECK(loc0.offset == R);
}

TEST_CASE("oracle offset table matches its cumulative-sum definition") {
  auto table = oracle::offsets({3, 5, 2}, 0, 1000);
  CHECK(table == std::vector<uint64_t>{1000, 1020, 1048});
}

TEST_CASE("index offsets equal the oracle table on random graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 8; trial++) {
    uint64_t n = 50 + rng() % 400;
    auto edges = trial % 2 == 0 ? gen::erdos_renyi(n, 4.0, rng())
                                : gen::power_law(n, 6.0, rng());
    uint16_t attr = trial % 3 == 0 ? 5 : 0;
    uint32_t stride = trial % 2 ? 8 : 32;
    Converted c(
        testutil::edges_to_text(edges),
        {.directed = true, .attr_bytes = attr, .anchor_stride = stride});
    GraphIndex idx = GraphIndex::load(c.fgi);
    GraphFile f(c.fgg);
    auto g = oracle::DenseGraph::from_edges(edges, true);
    std::vector<uint32_t> in_deg(g.n), out_deg(g.n);
    for (uint64_t v = 0; v < g.n; v++) {
      in_deg[v] = uint32_t(g.in[v].size());
      out_deg[v] = uint32_t(g.out[v].size());
    }
    auto in_table = oracle::offsets(in_deg, attr, f.header().in_region_offset);
    auto out_table =
        oracle::offsets(out_deg, attr, f.header().out_region_offset);
    for (VertexId v = 0; v < g.n; v++) {
      CHECK(idx.locate(v, EdgeSide::In).offset == in_table[v]);
      CHECK(idx.locate(v, EdgeSide::Out).offset == out_table[v]);
      CHECK(idx.locate(v, EdgeSide::Out).length ==
            edge_list_bytes(out_deg[v], attr));
    }
  }
}

TEST_CASE("degree codes: 254 stays in the byte array, 255 overflows") {
  std::string text;
  for (int i = 1; i <= 254; i++) text += "0 " + std::to_string(i) + "\n";
  for (int i = 1; i <= 255; i++) text += "300 " + std::to_string(i) + "\n";
  Converted c(text, {.directed = true});
  GraphIndex idx = GraphIndex::load(c.fgi);
  CHECK(idx.degree(0, EdgeSide::Out) == 254);
  CHECK(idx.degree(300, EdgeSide::Out) == 255);
  CHECK(idx.degree(300, EdgeSide::In) == 0);
  CHECK(idx.num_large() == 1);  // only the 255-degree vertex overflows
  CHECK(idx.degree(5, EdgeSide::In) == 2);
  CHECK(idx.degree(299, EdgeSide::Out) == 0);
}

TEST_CASE("round trip equals the oracle adjacency for many random graphs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; trial++) {
    bool power = trial >= 50;
    bool directed = trial % 3 != 2;
    uint64_t n = 100 + rng() % 1900;
    double deg = 2.0 + double(rng() % 80) / 10.0;
    auto edges = power ? gen::power_law(n, deg, rng())
                       : gen::erdos_renyi(n, deg, rng());
    if (edges.empty()) continue;
    Converted c(testutil::edges_to_text(edges), {.directed = directed});
    GraphFile f(c.fgg);
    GraphIndex idx = GraphIndex::load(c.fgi);
    auto g = oracle::DenseGraph::from_edges(edges, directed);
    REQUIRE(idx.num_vertices() == g.n);
    auto out = read_all_lists(f, idx, EdgeSide::Out);
    REQUIRE(out == g.out);
    if (directed) REQUIRE(read_all_lists(f, idx, EdgeSide::In) == g.in);
    uint64_t total_out = 0;
    for (auto& l : out) total_out += l.size();
    if (directed) CHECK(f.header().num_edges == total_out);
  }
}

TEST_CASE("index memory stays within the compact bound") {
  auto edges = gen::power_law(20000, 8.0, 99);
  Converted c(testutil::edges_to_text(edges), {.directed = true});
  GraphIndex idx = GraphIndex::load(c.fgi);
  const uint64_t n = idx.num_vertices();
  const uint64_t overflow = idx.num_large();
  CHECK(overflow < n / 100);  // bound applies when <1% of vertices overflow
  CHECK(idx.memory_bytes() <=
        uint64_t(double(n) * (2.0 + 16.0 / 32.0)) + 12 * overflow + 4096);
}

TEST_CASE("conversion is deterministic byte for byte") {
  auto edges = gen::erdos_renyi(500, 6.0, 123);
  auto text = testutil::edges_to_text(edges);
  Converted a(text, {.directed = true});
  Converted b(text, {.directed = true});
  CHECK(testutil::slurp(a.fgg) == testutil::slurp(b.fgg));
  CHECK(testutil::slurp(a.fgi) == testutil::slurp(b.fgi));
}

TEST_CASE("regions are page aligned and lists gap-free") {
  auto edges = gen::erdos_renyi(300, 3.0, 5);
  Converted c(testutil::edges_to_text(edges), {.directed = true});
  GraphFile f(c.fgg);
  CHECK(f.header().in_region_offset % kRegionAlign == 0);
  CHECK(f.header().out_region_offset % kRegionAlign == 0);
  GraphIndex idx = GraphIndex::load(c.fgi);
  // consecutive locate() results must tile each region exactly
  for (EdgeSide side : {EdgeSide::In, EdgeSide::Out}) {
    uint64_t expect = side == EdgeSide::In ? f.header().in_region_offset
                                           : f.header().out_region_offset;
    for (VertexId v = 0; v < idx.num_vertices(); v++) {
      auto loc = idx.locate(v, side);
      CHECK(loc.offset == expect);
      expect = loc.offset + loc.length;
    }
  }
}

TEST_CASE("attribute payload shifts offsets but not neighbors") {
  Converted c("0 1\n0 2\n1 2\n", {.directed = true, .attr_bytes = 3});
  GraphFile f(c.fgg);
  GraphIndex idx = GraphIndex::load(c.fgi);
  CHECK(read_all_lists(f, idx, EdgeSide::Out) ==
        std::vector<std::vector<VertexId>>{{1, 2}, {2}, {}});
  // list bytes = 8 + 2*4 + 2*3 = 22 for vertex 0
  CHECK(idx.locate(1, EdgeSide::Out).offset ==
        f.header().out_region_offset + 22);
}

TEST_CASE("index save/load round trips") {
  auto edges = gen::power_law(3000, 5.0, 17);
  Converted c(testutil::edges_to_text(edges), {.directed = true});
  GraphIndex idx = GraphIndex::load(c.fgi);
  TempDir d2;
  idx.save(d2.file("copy.fgi"));
  CHECK(testutil::slurp(c.fgi) == testutil::slurp(d2.file("copy.fgi")));
}

TEST_CASE("self-loop-only lines still widen the vertex range") {
  // a 3-vertex graph with no edges, expressed via dropped self-loops
  Converted c("0 0\n1 1\n2 2\n", {.directed = true});
  CHECK(c.res.num_vertices == 3);
  CHECK(c.res.num_edges == 0);
  GraphFile f(c.fgg);
  GraphIndex idx = GraphIndex::load(c.fgi);
  for (VertexId v = 0; v < 3; v++) {
    CHECK(idx.degree(v, EdgeSide::Out) == 0);
    CHECK(f.read_list_direct(idx, v, EdgeSide::Out).empty());
  }
}
