#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#define SEMIGRAPH_WANT_GRAPH_FIXTURE
#include <atomic>
#include <map>
#include <mutex>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "semigraph/algos.hpp"
#include "semigraph/engine.hpp"
#include "semigraph/gen.hpp"

using namespace semigraph;
using testutil::GraphOnDisk;

namespace {

EngineConfig small_cfg(uint32_t threads = 1) {
  EngineConfig cfg;
  cfg.num_threads = threads;
  cfg.cache.capacity_pages = 256;
  return cfg;
}

// Records hook invocations; shared across program copies by pointer.
struct Recording {
  std::mutex mu;
  std::vector<std::string> seq;
  std::map<std::pair<uint64_t, VertexId>, int> runs;  // (iteration, vertex)

  void note(const std::string& s) {
    std::lock_guard<std::mutex> lk(mu);
    seq.push_back(s);
  }
  void count_run(uint64_t iter, VertexId v) {
    std::lock_guard<std::mutex> lk(mu);
    runs[{iter, v}]++;
  }
};

}  // namespace

TEST_CASE("partition function is (v >> r) mod num_threads") {
  CHECK(partition_of(0, 2, 3) == 0);
  CHECK(partition_of(3, 2, 3) == 0);
  CHECK(partition_of(4, 2, 3) == 1);
  CHECK(partition_of(12, 2, 3) == 0);
  CHECK(partition_of(0x12345, 14, 7) == ((0x12345 >> 14) % 7));
}

namespace {

struct NeverActivates {
  struct State {
    int runs = 0;
  };
  using Message = Empty;
  using Scratch = Empty;
  Recording* rec;

  template <class Ctx>
  void run(Ctx& ctx, State& s) {
    s.runs++;
    rec->count_run(ctx.iteration(), ctx.vertex());
  }
};

}  // namespace

TEST_CASE("a program that activates nobody stops after one iteration") {
  GraphOnDisk g("0 1\n5 6\n");
  Recording rec;
  Engine<NeverActivates> eng(*g.file, g.index, small_cfg(), {&rec});
  eng.run({5});
  CHECK(eng.iteration_stats().size() == 1);
  CHECK(eng.iteration_stats()[0].active_count == 1);
  CHECK(eng.states()[5].runs == 1);
  for (VertexId v = 0; v < 7; v++)
    if (v != 5) CHECK(eng.states()[v].runs == 0);
}

TEST_CASE("BFS on a path takes one iteration per level") {
  GraphOnDisk g("0 1\n1 2\n");
  Engine<BfsProgram> eng(*g.file, g.index, small_cfg(), {});
  eng.run({0});
  CHECK(eng.iteration_stats().size() == 3);
  CHECK(eng.states()[0].level == 0);
  CHECK(eng.states()[1].level == 1);
  CHECK(eng.states()[2].level == 2);
}

namespace {

struct OrderProbe {
  struct State {
    int dummy = 0;
  };
  using Message = Empty;
  using Scratch = Empty;
  Recording* rec;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    rec->note(std::to_string(ctx.vertex()));
    std::vector<VertexId> again = {9, 3, 7};
    ctx.activate(again);
  }
};

}  // namespace

TEST_CASE("scheduler alternates scan direction between iterations") {
  GraphOnDisk g("9 9\n3 3\n7 7\n");  // ten isolated vertices
  Recording rec;
  EngineConfig cfg = small_cfg();
  cfg.max_iterations = 2;
  Engine<OrderProbe> eng(*g.file, g.index, cfg, {&rec});
  eng.run({9, 3, 7});
  CHECK(rec.seq ==
        std::vector<std::string>{"3", "7", "9", "9", "7", "3"});
}

namespace {

struct WindowProbe {
  struct State {
    int dummy = 0;
  };
  using Message = Empty;
  using Scratch = Empty;
  Recording* rec;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    rec->note("R" + std::to_string(ctx.vertex()));
    ctx.request_own_edges(EdgeSide::Out);
  }
  template <class Ctx>
  void run_on_vertex(Ctx& ctx, State&, const EdgeListView&) {
    rec->note("V" + std::to_string(ctx.vertex()));
  }
};

}  // namespace

TEST_CASE("running window caps a batch at max_running_per_thread") {
  GraphOnDisk g("1 2\n2 3\n3 1\n");
  Recording rec;
  EngineConfig cfg = small_cfg();
  cfg.max_running_per_thread = 2;
  cfg.max_iterations = 1;
  Engine<WindowProbe> eng(*g.file, g.index, cfg, {&rec});
  eng.run({1, 2, 3});
  // actives {1,2,3} with window 2: batch {1,2} completes before 3 runs
  CHECK(rec.seq == std::vector<std::string>{"R1", "R2", "V1", "V2", "R3",
                                            "V3"});
}

TEST_CASE("run executes exactly once per active vertex per iteration") {
  auto edges = gen::erdos_renyi(400, 5.0, 3);
  GraphOnDisk g(testutil::edges_to_text(edges));
  for (uint32_t threads : {1u, 2u, 8u}) {
    Recording rec;
    EngineConfig cfg = small_cfg(threads);
    cfg.range_shift = 4;
    Engine<NeverActivates> eng(*g.file, g.index, cfg, {&rec});
    std::vector<VertexId> initial;
    for (VertexId v = 0; v < g.index.num_vertices(); v += 3)
      initial.push_back(v);
    eng.run(initial);
    for (auto& [key, count] : rec.runs) CHECK(count == 1);
    CHECK(rec.runs.size() == initial.size());
  }
}

namespace {

struct MulticastProbe {
  struct State {
    uint32_t received = 0;
  };
  struct Message {
    uint32_t tag;
  };
  using Scratch = Empty;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    if (ctx.vertex() != 0) return;
    std::vector<VertexId> dests;
    for (VertexId v = 1; v <= 10; v++) dests.push_back(v);
    ctx.multicast(dests, {123});
  }
  template <class Ctx>
  void run_on_message(Ctx&, State& s, const Message& m) {
    if (m.tag == 123) s.received++;
  }
};

}  // namespace

TEST_CASE("multicast buffers one payload copy per destination thread") {
  std::string text;
  for (int v = 0; v <= 11; v++) text += std::to_string(v) + " 0\n";
  GraphOnDisk g(text);
  EngineConfig cfg = small_cfg(2);
  cfg.range_shift = 0;  // vertex v lives on thread v % 2
  Engine<MulticastProbe> eng(*g.file, g.index, cfg, {});
  eng.run({0});
  CHECK(eng.multicast_payload_copies() == 2);
  uint32_t received = 0;
  for (const auto& s : eng.states()) received += s.received;
  CHECK(received == 10);  // one run_on_message per destination vertex
  CHECK(eng.messages_sent() == 10);
  CHECK(eng.messages_delivered() == 10);
}

namespace {

struct InactiveReceiver {
  struct State {
    uint32_t got = 0;
  };
  struct Message {
    uint32_t x;
  };
  using Scratch = Empty;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    if (ctx.vertex() == 0) ctx.send(7, {1});  // 7 is never active
  }
  template <class Ctx>
  void run_on_message(Ctx&, State& s, const Message&) {
    s.got++;
  }
};

}  // namespace

TEST_CASE("messages reach inactive vertices") {
  GraphOnDisk g("0 7\n");
  Engine<InactiveReceiver> eng(*g.file, g.index, small_cfg(), {});
  eng.run({0});
  CHECK(eng.states()[7].got == 1);
}

namespace {

struct SendsALot {
  struct State {
    uint64_t acc = 0;
  };
  struct Message {
    uint64_t v;
  };
  using Scratch = Empty;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    // every active vertex sprays point messages across the graph
    for (int k = 1; k <= 7; k++)
      ctx.send(VertexId((ctx.vertex() * 31 + k * 17) % ctx.num_vertices()),
               {uint64_t(k)});
  }
  template <class Ctx>
  void run_on_message(Ctx&, State& s, const Message& m) {
    s.acc += m.v;
  }
};

}  // namespace

TEST_CASE("message counts are conserved across a random workload") {
  auto edges = gen::erdos_renyi(300, 4.0, 8);
  GraphOnDisk g(testutil::edges_to_text(edges));
  for (uint32_t threads : {1u, 3u}) {
    EngineConfig cfg = small_cfg(threads);
    cfg.range_shift = 3;
    cfg.flush_threshold = 16;  // force frequent mid-iteration flushes
    Engine<SendsALot> eng(*g.file, g.index, cfg, {});
    std::vector<VertexId> initial;
    for (VertexId v = 0; v < g.index.num_vertices(); v += 2)
      initial.push_back(v);
    eng.run(initial);
    CHECK(eng.messages_sent() == initial.size() * 7);
    CHECK(eng.messages_delivered() == eng.messages_sent());
    uint64_t sum = 0;
    for (const auto& s : eng.states()) sum += s.acc;
    CHECK(sum == initial.size() * (1 + 2 + 3 + 4 + 5 + 6 + 7));
  }
}

TEST_CASE("an idle thread steals work from a loaded partition") {
  // range_shift 30 puts every vertex in partition 0
  auto edges = gen::erdos_renyi(20000, 4.0, 12);
  GraphOnDisk g(testutil::edges_to_text(edges));
  EngineConfig cfg = small_cfg(2);
  cfg.range_shift = 30;
  cfg.max_running_per_thread = 64;
  cfg.trace_execution = true;
  Engine<BfsProgram> eng(*g.file, g.index, cfg, {});
  eng.run({0});
  uint64_t by_thread[2] = {0, 0};
  for (const auto& ev : eng.trace()) by_thread[ev.thread]++;
  CHECK(by_thread[0] > 0);
  CHECK(by_thread[1] > 0);  // starved thread must have stolen vertices
  uint64_t steals = 0;
  for (const auto& row : eng.iteration_stats()) steals += row.steals;
  CHECK(steals == by_thread[1]);
}

TEST_CASE("stealing does not change results") {
  auto edges = gen::erdos_renyi(3000, 6.0, 99);
  GraphOnDisk g(testutil::edges_to_text(edges));
  std::vector<uint32_t> base;
  for (uint32_t threads : {1u, 2u}) {
    EngineConfig cfg = small_cfg(threads);
    cfg.range_shift = 30;  // all vertices in one partition: pure stealing
    Engine<BfsProgram> eng(*g.file, g.index, cfg, {});
    eng.run({0});
    std::vector<uint32_t> levels;
    for (const auto& s : eng.states()) levels.push_back(s.level);
    if (threads == 1)
      base = levels;
    else
      CHECK(levels == base);
  }
}

namespace {

struct EndHookProbe {
  struct State {
    int end_calls = 0;
    uint64_t end_iteration = 0;
  };
  using Message = Empty;
  using Scratch = Empty;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    if (ctx.vertex() % 2 == 0) ctx.request_iteration_end_notification();
    if (ctx.iteration() == 0) ctx.activate_self();
  }
  template <class Ctx>
  void run_on_iteration_end(Ctx& ctx, State& s) {
    s.end_calls++;
    s.end_iteration = ctx.iteration();
  }
};

}  // namespace

TEST_CASE("run_on_iteration_end fires only for registered vertices") {
  GraphOnDisk g("0 1\n2 3\n4 5\n");
  Engine<EndHookProbe> eng(*g.file, g.index, small_cfg(), {});
  eng.run({0, 1, 2, 3});
  // registration is per iteration; even vertices registered in both rounds
  CHECK(eng.states()[0].end_calls == 2);
  CHECK(eng.states()[2].end_calls == 2);
  CHECK(eng.states()[1].end_calls == 0);
  CHECK(eng.states()[3].end_calls == 0);
  CHECK(eng.states()[4].end_calls == 0);
}

namespace {

struct VerticalProbe {
  struct State {
    int dummy = 0;
  };
  using Message = Empty;
  using Scratch = Empty;
  static constexpr bool kSupportsVertical = true;
  Recording* rec;
  std::atomic<uint64_t>* stamp;
  std::vector<std::pair<VertexId, uint32_t>>* window_checks;
  std::mutex* wc_mu;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    uint64_t t = stamp->fetch_add(1);
    rec->note("p" + std::to_string(ctx.part()) + "@" + std::to_string(t));
    auto [lo, hi] = ctx.part_window();
    uint64_t n = ctx.num_vertices();
    uint32_t j = ctx.part();
    uint32_t P = ctx.vertical_parts();
    CHECK(lo == n * j / P);
    CHECK(hi == n * (j + 1) / P);
    std::lock_guard<std::mutex> lk(*wc_mu);
    window_checks->push_back({ctx.vertex(), ctx.part()});
  }
};

}  // namespace

TEST_CASE("vertical parts run sub-phase by sub-phase with n/P windows") {
  // n = 8, P = 4: part j may touch neighbor IDs in [2j, 2j+2)
  GraphOnDisk g("7 7\n0 1\n");
  std::atomic<uint64_t> stamp{0};
  Recording rec;
  std::vector<std::pair<VertexId, uint32_t>> checks;
  std::mutex mu;
  EngineConfig cfg = small_cfg(2);
  cfg.vertical_parts = 4;
  cfg.range_shift = 1;
  Engine<VerticalProbe> eng(*g.file, g.index, cfg,
                            {&rec, &stamp, &checks, &mu});
  eng.run({0, 3, 5});
  // every active vertex ran once per part
  CHECK(checks.size() == 3 * 4);
  // all stamps of part j precede all stamps of part j+1
  std::map<uint32_t, std::pair<uint64_t, uint64_t>> range;  // part -> min,max
  for (const auto& s : rec.seq) {
    uint32_t part = uint32_t(s[1] - '0');
    uint64_t t = std::stoull(s.substr(s.find('@') + 1));
    auto it = range.find(part);
    if (it == range.end())
      range[part] = {t, t};
    else {
      it->second.first = std::min(it->second.first, t);
      it->second.second = std::max(it->second.second, t);
    }
  }
  for (uint32_t j = 0; j + 1 < 4; j++)
    CHECK(range[j].second < range[j + 1].first);
}

namespace {

struct WindowViolator {
  struct State {
    int dummy = 0;
  };
  using Message = Empty;
  using Scratch = Empty;
  static constexpr bool kSupportsVertical = true;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    // part 0's window on an 8-vertex graph with P=2 is [0,4): asking for
    // vertex 7's list from part 0 breaks the contract
    if (ctx.part() == 0) ctx.request_edges(7, EdgeSide::Out);
  }
};

}  // namespace

TEST_CASE("a part requesting outside its window is a contract violation") {
  GraphOnDisk g("7 7\n0 1\n");
  EngineConfig cfg = small_cfg();
  cfg.vertical_parts = 2;
  Engine<WindowViolator> eng(*g.file, g.index, cfg, {});
  CHECK_THROWS_WITH_AS(eng.run({0}),
                       doctest::Contains("outside its ID window"), Error);
}

TEST_CASE("vertical parts require program support") {
  GraphOnDisk g("0 1\n");
  EngineConfig cfg = small_cfg();
  cfg.vertical_parts = 2;
  CHECK_THROWS_AS(
      (Engine<BfsProgram>(*g.file, g.index, cfg, {})), ContractViolation);
}

namespace {

struct Thrower {
  struct State {
    int dummy = 0;
  };
  using Message = Empty;
  using Scratch = Empty;

  template <class Ctx>
  void run(Ctx& ctx, State&) {
    if (ctx.iteration() == 1) throw std::runtime_error("user hook exploded");
    ctx.activate_self();
  }
};

}  // namespace

TEST_CASE("a user hook failure aborts with the iteration number") {
  GraphOnDisk g("0 1\n");
  Engine<Thrower> eng(*g.file, g.index, small_cfg(), {});
  CHECK_THROWS_WITH_AS(eng.run({0}),
                       doctest::Contains("aborted at iteration 1"), Error);
}

TEST_CASE("an I/O failure aborts the run") {
  GraphOnDisk g(testutil::edges_to_text(gen::erdos_renyi(2000, 6.0, 5)));
  // re-point the engine at a truncated copy of the graph
  std::string bytes = testutil::slurp(g.dir.file("g.fgg"));
  testutil::spit(g.dir.file("cut.fgg"), bytes.substr(0, bytes.size() / 2));
  GraphFile cut(g.dir.file("cut.fgg"));
  Engine<BfsProgram> eng(cut, g.index, small_cfg(), {});
  CHECK_THROWS_AS(eng.run({0}), Error);
}

TEST_CASE("iteration stats track actives, messages and I/O") {
  GraphOnDisk g("0 1\n1 2\n");
  Engine<BfsProgram> eng(*g.file, g.index, small_cfg(), {});
  eng.run({0});
  const auto& rows = eng.iteration_stats();
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].iteration == 0);
  CHECK(rows[0].active_count == 1);
  CHECK(rows[0].issued_requests > 0);
  CHECK(rows[0].bytes_read > 0);
  // activation messages: 0 activates 1, then 1 activates 2
  CHECK(rows[0].msgs == 1);
  CHECK(rows[1].msgs == 1);
  std::string header = IterationStats::csv_header();
  CHECK(header ==
        "iteration,active_count,msgs,bytes_read,issued_requests,steals,"
        "wall_ms");
  CHECK(rows[0].csv_row().substr(0, 4) == "0,1,");
}
