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

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "semigraph/graph_file.hpp"
#include "semigraph/graph_index.hpp"
#include "semigraph/page_cache.hpp"
#include "semigraph/types.hpp"

namespace semigraph {

// Iterative vertex-centric execution. Vertices activated during iteration k
// run in iteration k+1; messages sent during an iteration are delivered at
// its boundary, before any vertex of the next iteration runs. Each iteration
// is a parallel phase (run / run_on_vertex, sends buffered), a barrier, a
// delivery phase (run_on_message and activations, each owner thread draining
// its own inboxes), and an end phase (run_on_iteration_end plus the
// program-level boundary hook). One worker thread owns each partition;
// partition(v) = (v >> range_shift) % num_threads.
//
// A vertex program is a value type providing:
//
//   using State = ...;          // fixed-size per-vertex algorithmic state
//   using Message = ...;        // fixed-size message payload
//   using Scratch = Empty;      // transient state of a running vertex
//   void run(Ctx&, State&);
//   void run_on_vertex(Ctx&, State&, const EdgeListView&);    // optional
//   void run_on_message(Ctx&, State&, const Message&);        // optional
//   void run_on_iteration_end(Ctx&, State&);                  // optional
//   void on_iteration_boundary(BoundaryCtx&);                 // optional
//   void order_actives(std::span<VertexId>);                  // optional
//   static constexpr ScanOrder kScanOrder = ...;              // optional
//   static constexpr bool kSupportsVertical = ...;            // optional
//
// run executes exactly once per active vertex per iteration (once per part
// and sub-phase when vertical partitioning is on) and must touch only the
// vertex's own state; edge data is visible only inside run_on_vertex.
// run_on_message is invoked on delivery even for inactive vertices.
// Delivery order is sorted by (destination, source), which makes results
// independent of the thread count.

struct Empty {};

enum class ScanOrder {
  Alternating,  // ascending IDs on even iterations, descending on odd
  Ascending,    // pinned ascending
  Custom,       // program reorders each frozen queue via order_actives
};

struct EngineConfig {
  uint32_t num_threads = 1;
  uint32_t range_shift = 14;  // r in partition(v) = (v >> r) % num_threads
  uint32_t max_running_per_thread = 4000;
  CacheConfig cache;
  uint32_t vertical_parts = 1;
  uint32_t flush_threshold = 4096;  // buffered messages per inbox before flush
  uint64_t max_iterations = UINT64_MAX;
  bool trace_execution = false;

  void validate() const {
    if (num_threads < 1) throw ContractViolation("num_threads must be >= 1");
    if (max_running_per_thread < 1)
      throw ContractViolation("max_running_per_thread must be >= 1");
    if (vertical_parts < 1)
      throw ContractViolation("vertical_parts must be >= 1");
    cache.validate();
  }
};

struct IterationStats {
  uint64_t iteration = 0;
  uint64_t active_count = 0;
  uint64_t msgs = 0;  // message units delivered at this iteration's boundary
  uint64_t bytes_read = 0;
  uint64_t issued_requests = 0;
  uint64_t steals = 0;  // vertices executed by a non-owner thread
  double wall_ms = 0.0;
  // Extra fields for tests and studies; not part of the CSV row.
  uint64_t cache_hits = 0;
  uint64_t cache_misses = 0;

  static std::string csv_header() {
    return "iteration,active_count,msgs,bytes_read,issued_requests,steals,"
           "wall_ms";
  }
  std::string csv_row() const {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%llu,%llu,%llu,%llu,%llu,%llu,%.3f",
                  (unsigned long long)iteration,
                  (unsigned long long)active_count, (unsigned long long)msgs,
                  (unsigned long long)bytes_read,
                  (unsigned long long)issued_requests,
                  (unsigned long long)steals, wall_ms);
    return buf;
  }
};

struct TraceEvent {
  uint64_t iteration;
  VertexId vertex;
  uint32_t part;
  uint32_t thread;
};

// Order-independent (value, vertex) maximum with smallest-ID tie break.
// Updates are monotone, so the result is deterministic under any thread
// interleaving.
class GlobalMax {
 public:
  GlobalMax() = default;
  GlobalMax(const GlobalMax& o) {
    auto [v, i] = o.get();
    value_ = v;
    id_ = i;
  }
  GlobalMax& operator=(const GlobalMax& o) {
    auto [v, i] = o.get();
    std::lock_guard<std::mutex> lk(mu_);
    value_ = v;
    id_ = i;
    return *this;
  }

  void update(uint64_t value, VertexId id) {
    std::lock_guard<std::mutex> lk(mu_);
    if (better(value, id)) {
      value_ = value;
      id_ = id;
    }
  }
  // True when (value, id) could still improve the maximum; a vertex whose
  // upper bound fails this test can never affect the result.
  bool would_improve(uint64_t value, VertexId id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return better(value, id);
  }
  std::pair<uint64_t, VertexId> get() const {
    std::lock_guard<std::mutex> lk(mu_);
    return {value_, id_};
  }

 private:
  bool better(uint64_t value, VertexId id) const {
    return value > value_ || (value == value_ && id < id_);
  }
  mutable std::mutex mu_;
  uint64_t value_ = 0;
  VertexId id_ = kInvalidVertex;
};

// Format-aware view over one on-disk edge list; valid only inside
// run_on_vertex.
class EdgeListView {
 public:
  EdgeListView(const PageRange& range, uint16_t attr_bytes)
      : range_(range), attr_bytes_(attr_bytes) {}

  VertexId owner() const { return range_.u32_at(0); }
  uint32_t degree() const { return range_.u32_at(4); }
  VertexId neighbor(uint32_t i) const {
    return range_.u32_at(kListHeaderBytes + 4ull * i);
  }
  void copy_neighbors(std::vector<VertexId>& out) const {
    uint32_t d = degree();
    out.resize(d);
    for (uint32_t i = 0; i < d; i++) out[i] = neighbor(i);
  }
  uint16_t attr_bytes() const { return attr_bytes_; }
  void copy_attr(uint32_t i, void* dst) const {
    range_.copy(kListHeaderBytes + 4ull * degree() + uint64_t(i) * attr_bytes_,
                dst, attr_bytes_);
  }

 private:
  const PageRange& range_;
  uint16_t attr_bytes_;
};

inline uint32_t partition_of(VertexId v, uint32_t range_shift,
                             uint32_t num_threads) {
  return uint32_t((uint64_t(v) >> range_shift) % num_threads);
}

namespace detail {

template <class Message>
struct MsgRecord {
  VertexId src = kInvalidVertex;
  VertexId dest = kInvalidVertex;   // point-to-point destination
  std::vector<VertexId> dests;      // multicast fan-out within one thread
  Message payload{};
  bool is_multicast = false;
  bool has_payload = true;
  bool activate = false;
};

template <class Message>
struct MsgUnit {
  VertexId dest;
  VertexId src;
  Message payload{};
  bool has_payload = true;
  bool activate = false;
};

}  // namespace detail

template <class Program>
class Engine {
 public:
  using State = typename Program::State;
  using Message = typename Program::Message;
  using Scratch = typename Program::Scratch;

  static constexpr size_t kMaxMessageBytes = 256;
  static_assert(sizeof(Message) <= kMaxMessageBytes,
                "message payload exceeds the fixed-size limit");
  static constexpr uint32_t kStealBatch = 64;

  class Ctx;
  class BoundaryCtx;

  Engine(const GraphFile& file, const GraphIndex& index,
         const EngineConfig& cfg, Program program)
      : file_(file),
        index_(index),
        cfg_(cfg),
        program_(std::move(program)),
        cache_(file, cfg.cache) {
    cfg_.validate();
    if (cfg_.vertical_parts > 1 && !supports_vertical())
      throw ContractViolation(
          "program does not declare per-part logic; vertical_parts must be 1");
    n_ = index_.num_vertices();
    if constexpr (requires(Program& p) { p.init_state(VertexId{}); }) {
      states_.reserve(n_);
      for (uint64_t v = 0; v < n_; v++)
        states_.push_back(program_.init_state(VertexId(v)));
    } else {
      states_.assign(n_, State{});
    }
    next_active_.assign(n_, 0);
    workers_.reserve(cfg_.num_threads);
    for (uint32_t t = 0; t < cfg_.num_threads; t++)
      workers_.push_back(std::make_unique<Worker>(cfg_.num_threads));
  }

  // Runs to quiescence: stops at the first boundary with no active vertex
  // for the next iteration and no message in flight, or at max_iterations.
  void run(std::vector<VertexId> initial_active);

  std::vector<State>& states() { return states_; }
  const std::vector<State>& states() const { return states_; }
  const std::vector<IterationStats>& iteration_stats() const {
    return iterations_;
  }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  PageCache& cache() { return cache_; }
  const GraphIndex& index() const { return index_; }
  const EngineConfig& config() const { return cfg_; }
  Program& program() { return program_; }
  uint64_t messages_sent() const { return total_produced_; }
  uint64_t messages_delivered() const { return total_delivered_; }
  uint64_t multicast_payload_copies() const { return multicast_copies_; }

 private:
  friend class Ctx;
  friend class BoundaryCtx;

  static constexpr bool supports_vertical() {
    if constexpr (requires { Program::kSupportsVertical; })
      return Program::kSupportsVertical;
    else
      return false;
  }

  static constexpr ScanOrder scan_order() {
    if constexpr (requires { Program::kScanOrder; })
      return Program::kScanOrder;
    else
      return ScanOrder::Alternating;
  }

  using Rec = detail::MsgRecord<Message>;
  using Unit = detail::MsgUnit<Message>;
  using Chunk = std::vector<Rec>;

  struct RunningEntry {
    uint32_t outstanding = 0;
    bool run_returned = false;
    Scratch scratch{};
  };

  struct Worker {
    explicit Worker(uint32_t num_threads)
        : outbox_chunk(num_threads),
          outbox_units(num_threads, 0),
          inbox(num_threads) {}

    // Frozen queue for the current iteration, already in scan order.
    std::vector<VertexId> queue;
    std::atomic<uint64_t> cursor{0};
    std::vector<VertexId> next_list;        // owned vertices active next
    std::vector<Chunk> outbox_chunk;        // per peer: chunk being built
    std::vector<uint64_t> outbox_units;     // per peer: units in that chunk
    std::vector<std::vector<Chunk>> inbox;  // per producer: sealed chunks
    std::vector<VertexId> boundary_activations;  // from delivery/end hooks
    std::vector<IoRequest> pending;
    std::unordered_map<VertexId, RunningEntry> running;
    std::vector<VertexId> end_notify;
    uint64_t produced_units = 0;
    uint64_t delivered_units = 0;
    uint64_t steals = 0;
    uint64_t multicast_copies = 0;
    std::vector<TraceEvent> trace;
    std::vector<Unit> units;  // delivery scratch
  };

  uint32_t owner_of(VertexId v) const {
    return partition_of(v, cfg_.range_shift, cfg_.num_threads);
  }

  std::pair<VertexId, VertexId> window_of_part(uint32_t j) const {
    uint64_t lo = n_ * uint64_t(j) / cfg_.vertical_parts;
    uint64_t hi = n_ * (uint64_t(j) + 1) / cfg_.vertical_parts;
    return {VertexId(lo), VertexId(hi)};
  }

  void record_error(std::exception_ptr e) {
    std::lock_guard<std::mutex> lk(error_mu_);
    if (!first_error_) first_error_ = e;
    abort_.store(true, std::memory_order_release);
  }
  bool aborted() const { return abort_.load(std::memory_order_acquire); }

  void flush_chunk(uint32_t producer, uint32_t dest) {
    Worker& w = *workers_[producer];
    if (w.outbox_chunk[dest].empty()) return;
    workers_[dest]->inbox[producer].push_back(std::move(w.outbox_chunk[dest]));
    w.outbox_chunk[dest] = {};
    w.outbox_units[dest] = 0;
  }

  void send_record(uint32_t producer, uint32_t dest_thread, Rec rec,
                   uint64_t units, bool allow_flush) {
    Worker& w = *workers_[producer];
    w.outbox_chunk[dest_thread].push_back(std::move(rec));
    w.outbox_units[dest_thread] += units;
    w.produced_units += units;
    // Mid-iteration flush is safe only while inboxes are quiescent; sends
    // from delivery or end hooks stay buffered until the next flush point.
    if (allow_flush && w.outbox_units[dest_thread] >= cfg_.flush_threshold)
      flush_chunk(producer, dest_thread);
  }

  void finish_vertex_if_done(Worker& w, VertexId v) {
    auto it = w.running.find(v);
    if (it != w.running.end() && it->second.run_returned &&
        it->second.outstanding == 0)
      w.running.erase(it);
  }

  void drain_requests(uint32_t t);
  void process_batch(uint32_t t, uint32_t part,
                     std::span<const VertexId> batch);
  void worker_parallel_phase(uint32_t t, uint32_t part);
  void worker_delivery_phase(uint32_t t);
  void worker_end_phase(uint32_t t);
  void apply_boundary_activations();
  void freeze_queues(uint64_t next_iteration);
  void boundary_bookkeeping();

  const GraphFile& file_;
  const GraphIndex& index_;
  EngineConfig cfg_;
  Program program_;
  PageCache cache_;
  uint64_t n_ = 0;

  std::vector<State> states_;
  std::vector<uint8_t> next_active_;
  std::vector<std::unique_ptr<Worker>> workers_;
  std::vector<IterationStats> iterations_;
  std::vector<TraceEvent> trace_;
  uint64_t iter_ = 0;
  bool done_ = false;
  bool ran_ = false;

  std::atomic<bool> abort_{false};
  std::mutex error_mu_;
  std::exception_ptr first_error_;

  uint64_t total_produced_ = 0;
  uint64_t total_delivered_ = 0;
  uint64_t multicast_copies_ = 0;
  IoStats last_io_;
  std::chrono::steady_clock::time_point iteration_start_;

 public:
  // Per-worker execution context handed to every program hook.
  class Ctx {
   public:
    VertexId vertex() const { return vertex_; }
    uint32_t part() const { return part_; }
    uint32_t vertical_parts() const { return eng_->cfg_.vertical_parts; }
    // Neighbor-ID window [lo, hi) this part may request edge lists in.
    std::pair<VertexId, VertexId> part_window() const {
      return eng_->window_of_part(part_);
    }
    uint64_t iteration() const { return eng_->iter_; }
    uint64_t num_vertices() const { return eng_->n_; }
    uint32_t thread() const { return thread_; }
    uint32_t num_threads() const { return eng_->cfg_.num_threads; }

    uint32_t degree(VertexId v, EdgeSide side) const {
      return eng_->index_.degree(v, side);
    }

    void request_edges(VertexId v, EdgeSide side);
    void request_own_edges(EdgeSide side) { request_edges(vertex_, side); }

    void send(VertexId dest, const Message& m, bool activate = false);
    void multicast(std::span<const VertexId> dests, const Message& m,
                   bool activate = false);
    // Activation is idempotent and targets the next iteration, from any hook.
    void activate(std::span<const VertexId> dests);
    void activate(VertexId dest) { activate(std::span(&dest, 1)); }
    void activate_self() { activate(vertex_); }

    void request_iteration_end_notification() {
      eng_->workers_[thread_]->end_notify.push_back(vertex_);
    }

    Scratch& scratch() {
      return eng_->workers_[thread_]->running[vertex_].scratch;
    }

   private:
    friend class Engine;
    Engine* eng_ = nullptr;
    uint32_t thread_ = 0;
    VertexId vertex_ = kInvalidVertex;
    uint32_t part_ = 0;
    bool in_parallel_phase_ = false;
  };

  // Program-level view of an iteration boundary; runs single-threaded after
  // delivery and end hooks, before the next iteration's queues freeze.
  class BoundaryCtx {
   public:
    uint64_t iteration() const { return eng_->iter_; }
    uint64_t num_vertices() const { return eng_->n_; }
    std::vector<State>& states() { return eng_->states_; }
    void activate(VertexId v) {
      if (!eng_->next_active_[v]) {
        eng_->next_active_[v] = 1;
        eng_->workers_[eng_->owner_of(v)]->next_list.push_back(v);
      }
    }
    uint64_t next_active_count() const {
      uint64_t c = 0;
      for (auto& w : eng_->workers_) c += w->next_list.size();
      return c;
    }

   private:
    friend class Engine;
    explicit BoundaryCtx(Engine* e) : eng_(e) {}
    Engine* eng_;
  };
};

// ---------------------------------------------------------------------------
// implementation

template <class P>
void Engine<P>::Ctx::request_edges(VertexId v, EdgeSide side) {
  Engine* e = eng_;
  if (v >= e->n_)
    throw ContractViolation("edge-list request for vertex " +
                            std::to_string(v) + " out of range");
  if (!in_parallel_phase_)
    throw ContractViolation(
        "edge lists may be requested only from run/run_on_vertex");
  if (e->cfg_.vertical_parts > 1 && v != vertex_) {
    auto [lo, hi] = part_window();
    if (v < lo || v >= hi)
      throw ContractViolation("vertex part " + std::to_string(part_) + " of " +
                              std::to_string(vertex_) +
                              " requested edge list " + std::to_string(v) +
                              " outside its ID window");
  }
  auto loc = e->index_.locate(v, side);
  Worker& w = *e->workers_[thread_];
  w.running[vertex_].outstanding++;

  IoRequest req;
  req.offset = loc.offset;
  req.length = loc.length;
  req.target = v;
  req.side = side;
  req.task = [e, t = thread_, requester = vertex_, part = part_, v,
              side](const IoResult& res) {
    Worker& w = *e->workers_[t];
    try {
      if (!e->aborted()) {
        if (!res.ok)
          throw IoError("edge list read for vertex " + std::to_string(v) +
                        " failed: " + res.error);
        EdgeListView view(res.view, e->index_.attr_bytes());
        if (view.owner() != v || view.degree() != e->index_.degree(v, side))
          throw FormatError("edge list header mismatch at vertex " +
                            std::to_string(v) + " (offset " +
                            std::to_string(res.request->offset) +
                            "): index and file disagree");
        Ctx ctx;
        ctx.eng_ = e;
        ctx.thread_ = t;
        ctx.vertex_ = requester;
        ctx.part_ = part;
        ctx.in_parallel_phase_ = true;
        if constexpr (requires(Ctx& c, State& s, const EdgeListView& el) {
                        e->program_.run_on_vertex(c, s, el);
                      }) {
          e->program_.run_on_vertex(ctx, e->states_[requester], view);
        }
      }
    } catch (...) {
      e->record_error(std::current_exception());
    }
    w.running[requester].outstanding--;
    e->finish_vertex_if_done(w, requester);
  };
  w.pending.push_back(std::move(req));
}

template <class P>
void Engine<P>::Ctx::send(VertexId dest, const Message& m, bool activate) {
  if (dest >= eng_->n_)
    throw ContractViolation("message to out-of-range vertex " +
                            std::to_string(dest));
  Rec rec;
  rec.src = vertex_;
  rec.dest = dest;
  rec.payload = m;
  rec.has_payload = true;
  rec.activate = activate;
  eng_->send_record(thread_, eng_->owner_of(dest), std::move(rec), 1,
                    in_parallel_phase_);
}

template <class P>
void Engine<P>::Ctx::multicast(std::span<const VertexId> dests,
                               const Message& m, bool activate) {
  if (dests.empty()) return;
  Engine* e = eng_;
  Worker& w = *e->workers_[thread_];
  // One payload copy per destination thread; receivers fan out locally.
  std::vector<std::vector<VertexId>> per_thread(e->cfg_.num_threads);
  for (VertexId d : dests) {
    if (d >= e->n_)
      throw ContractViolation("multicast to out-of-range vertex " +
                              std::to_string(d));
    per_thread[e->owner_of(d)].push_back(d);
  }
  for (uint32_t t = 0; t < e->cfg_.num_threads; t++) {
    if (per_thread[t].empty()) continue;
    Rec rec;
    rec.src = vertex_;
    rec.is_multicast = true;
    rec.dests = std::move(per_thread[t]);
    rec.payload = m;
    rec.has_payload = true;
    rec.activate = activate;
    uint64_t units = rec.dests.size();
    w.multicast_copies++;
    e->send_record(thread_, t, std::move(rec), units, in_parallel_phase_);
  }
}

template <class P>
void Engine<P>::Ctx::activate(std::span<const VertexId> dests) {
  if (dests.empty()) return;
  Engine* e = eng_;
  Worker& w = *e->workers_[thread_];
  if (!in_parallel_phase_) {
    // Delivery/end phase: activations still target the next iteration; they
    // are buffered per thread and merged before the queues freeze.
    w.boundary_activations.insert(w.boundary_activations.end(), dests.begin(),
                                  dests.end());
    for (VertexId d : dests)
      if (d >= e->n_)
        throw ContractViolation("activation of out-of-range vertex " +
                                std::to_string(d));
    return;
  }
  // Parallel phase: activation rides the message system as a payload-less
  // multicast, one copy per destination thread.
  std::vector<std::vector<VertexId>> per_thread(e->cfg_.num_threads);
  for (VertexId d : dests) {
    if (d >= e->n_)
      throw ContractViolation("activation of out-of-range vertex " +
                              std::to_string(d));
    per_thread[e->owner_of(d)].push_back(d);
  }
  for (uint32_t t = 0; t < e->cfg_.num_threads; t++) {
    if (per_thread[t].empty()) continue;
    Rec rec;
    rec.src = vertex_;
    rec.is_multicast = true;
    rec.dests = std::move(per_thread[t]);
    rec.has_payload = false;
    rec.activate = true;
    uint64_t units = rec.dests.size();
    w.multicast_copies++;
    e->send_record(thread_, t, std::move(rec), units, in_parallel_phase_);
  }
}

template <class P>
void Engine<P>::drain_requests(uint32_t t) {
  Worker& w = *workers_[t];
  while (!w.pending.empty() && !aborted()) {
    std::vector<IoRequest> batch;
    batch.swap(w.pending);
    try {
      cache_.submit_batch(std::move(batch), /*sorted_hint=*/true);
    } catch (...) {
      record_error(std::current_exception());
    }
  }
  if (aborted()) {
    w.pending.clear();
    w.running.clear();
  }
}

template <class P>
void Engine<P>::process_batch(uint32_t t, uint32_t part,
                              std::span<const VertexId> batch) {
  Worker& w = *workers_[t];
  for (VertexId v : batch) {
    if (aborted()) return;
    if (cfg_.trace_execution) w.trace.push_back({iter_, v, part, t});
    Ctx ctx;
    ctx.eng_ = this;
    ctx.thread_ = t;
    ctx.vertex_ = v;
    ctx.part_ = part;
    ctx.in_parallel_phase_ = true;
    try {
      program_.run(ctx, states_[v]);
    } catch (...) {
      record_error(std::current_exception());
      return;
    }
    auto it = w.running.find(v);
    if (it != w.running.end()) {
      it->second.run_returned = true;
      finish_vertex_if_done(w, v);
    }
  }
  // One running window at a time keeps |running| <= max_running_per_thread
  // and lets the cache observe a whole window's requests for merging.
  drain_requests(t);
}

template <class P>
void Engine<P>::worker_parallel_phase(uint32_t t, uint32_t part) {
  Worker& mine = *workers_[t];
  // Own partition first, then steal from the others. The frozen queue plus
  // an atomic cursor guarantees each vertex runs on exactly one thread.
  for (uint32_t pass = 0; pass < cfg_.num_threads; pass++) {
    uint32_t victim = (t + pass) % cfg_.num_threads;
    Worker& q = *workers_[victim];
    uint64_t take =
        pass == 0 ? cfg_.max_running_per_thread
                  : std::min<uint64_t>(kStealBatch, cfg_.max_running_per_thread);
    while (!aborted()) {
      uint64_t begin = q.cursor.fetch_add(take, std::memory_order_relaxed);
      if (begin >= q.queue.size()) break;
      uint64_t end = std::min<uint64_t>(begin + take, q.queue.size());
      if (pass != 0) mine.steals += end - begin;
      process_batch(t, part, std::span(q.queue.data() + begin, end - begin));
    }
  }
}

template <class P>
void Engine<P>::worker_delivery_phase(uint32_t t) {
  Worker& w = *workers_[t];
  w.units.clear();
  for (uint32_t p = 0; p < cfg_.num_threads; p++) {
    for (Chunk& chunk : w.inbox[p]) {
      for (Rec& rec : chunk) {
        if (rec.is_multicast) {
          for (VertexId d : rec.dests)
            w.units.push_back(
                {d, rec.src, rec.payload, rec.has_payload, rec.activate});
        } else {
          w.units.push_back(
              {rec.dest, rec.src, rec.payload, rec.has_payload, rec.activate});
        }
      }
    }
    w.inbox[p].clear();
  }
  // Deterministic delivery: per-(dest, src) order is the sender's send
  // order; sorting makes the interleaving independent of thread count.
  std::stable_sort(w.units.begin(), w.units.end(),
                   [](const Unit& a, const Unit& b) {
                     if (a.dest != b.dest) return a.dest < b.dest;
                     return a.src < b.src;
                   });
  for (const Unit& u : w.units) {
    if (aborted()) break;
    w.delivered_units++;
    if (u.activate && !next_active_[u.dest]) {
      next_active_[u.dest] = 1;
      w.next_list.push_back(u.dest);
    }
    if (u.has_payload) {
      if constexpr (requires(Ctx& c, State& s, const Message& m) {
                      program_.run_on_message(c, s, m);
                    }) {
        Ctx ctx;
        ctx.eng_ = this;
        ctx.thread_ = t;
        ctx.vertex_ = u.dest;
        ctx.part_ = 0;
        ctx.in_parallel_phase_ = false;
        try {
          program_.run_on_message(ctx, states_[u.dest], u.payload);
        } catch (...) {
          record_error(std::current_exception());
          break;
        }
      }
    }
  }
  w.units.clear();
}

template <class P>
void Engine<P>::worker_end_phase(uint32_t t) {
  // Vertices register from whichever thread executed them; each owner runs
  // the hook for its own vertices, in ID order.
  std::vector<VertexId> mine;
  for (auto& other : workers_)
    for (VertexId v : other->end_notify)
      if (owner_of(v) == t) mine.push_back(v);
  if (mine.empty()) return;
  std::sort(mine.begin(), mine.end());
  mine.erase(std::unique(mine.begin(), mine.end()), mine.end());
  if constexpr (requires(Ctx& c, State& s) {
                  program_.run_on_iteration_end(c, s);
                }) {
    for (VertexId v : mine) {
      if (aborted()) break;
      Ctx ctx;
      ctx.eng_ = this;
      ctx.thread_ = t;
      ctx.vertex_ = v;
      ctx.part_ = 0;
      ctx.in_parallel_phase_ = false;
      try {
        program_.run_on_iteration_end(ctx, states_[v]);
      } catch (...) {
        record_error(std::current_exception());
      }
    }
  }
}

template <class P>
void Engine<P>::apply_boundary_activations() {
  for (auto& wp : workers_) {
    for (VertexId v : wp->boundary_activations) {
      if (!next_active_[v]) {
        next_active_[v] = 1;
        workers_[owner_of(v)]->next_list.push_back(v);
      }
    }
    wp->boundary_activations.clear();
  }
}

template <class P>
void Engine<P>::freeze_queues(uint64_t next_iteration) {
  bool descending =
      scan_order() == ScanOrder::Alternating && (next_iteration % 2 == 1);
  for (auto& wp : workers_) {
    Worker& w = *wp;
    w.queue.swap(w.next_list);
    w.next_list.clear();
    for (VertexId v : w.queue) next_active_[v] = 0;
    std::sort(w.queue.begin(), w.queue.end());
    if (descending) std::reverse(w.queue.begin(), w.queue.end());
    if constexpr (requires(std::span<VertexId> q) {
                    program_.order_actives(q);
                  }) {
      if (scan_order() == ScanOrder::Custom)
        program_.order_actives(std::span(w.queue));
    }
    w.cursor.store(0, std::memory_order_relaxed);
  }
}

template <class P>
void Engine<P>::boundary_bookkeeping() {
  for (auto& w : workers_) w->end_notify.clear();
  if constexpr (requires(BoundaryCtx& b) { program_.on_iteration_boundary(b); }) {
    if (!aborted()) {
      BoundaryCtx b(this);
      try {
        program_.on_iteration_boundary(b);
      } catch (...) {
        record_error(std::current_exception());
      }
    }
  }

  IterationStats row;
  row.iteration = iter_;
  for (auto& w : workers_) row.active_count += w->queue.size();
  uint64_t delivered = 0, produced = 0;
  for (auto& w : workers_) {
    delivered += w->delivered_units;
    produced += w->produced_units;
    row.steals += w->steals;
    w->steals = 0;
  }
  row.msgs = delivered - total_delivered_;
  total_delivered_ = delivered;
  total_produced_ = produced;
  IoStats now = cache_.stats();
  IoStats delta = now - last_io_;
  last_io_ = now;
  row.bytes_read = delta.bytes_read;
  row.issued_requests = delta.requests_issued_to_file;
  row.cache_hits = delta.cache_hits;
  row.cache_misses = delta.cache_misses;
  auto end = std::chrono::steady_clock::now();
  row.wall_ms =
      std::chrono::duration<double, std::milli>(end - iteration_start_).count();
  iteration_start_ = end;
  iterations_.push_back(row);

  freeze_queues(iter_ + 1);
  uint64_t next_active = 0;
  for (auto& w : workers_) next_active += w->queue.size();
  uint64_t in_flight = total_produced_ - total_delivered_;
  iter_++;
  done_ = aborted() || (next_active == 0 && in_flight == 0) ||
          iter_ >= cfg_.max_iterations;
}

template <class P>
void Engine<P>::run(std::vector<VertexId> initial_active) {
  if (ran_) throw ContractViolation("engine can only run once");
  ran_ = true;
  for (VertexId v : initial_active) {
    if (v >= n_)
      throw ContractViolation("initial active vertex " + std::to_string(v) +
                              " out of range");
    if (!next_active_[v]) {
      next_active_[v] = 1;
      workers_[owner_of(v)]->next_list.push_back(v);
    }
  }
  iter_ = 0;
  done_ = false;
  freeze_queues(0);
  uint64_t frozen = 0;
  for (auto& w : workers_) frozen += w->queue.size();
  if (frozen == 0) return;
  last_io_ = cache_.stats();
  iteration_start_ = std::chrono::steady_clock::now();

  omp_set_dynamic(0);  // the worker-per-partition layout needs the exact team
#pragma omp parallel num_threads(int(cfg_.num_threads))
  {
    uint32_t t = uint32_t(omp_get_thread_num());
    while (true) {
      for (uint32_t j = 0; j < cfg_.vertical_parts; j++) {
        worker_parallel_phase(t, j);
#pragma omp barrier
#pragma omp single
        {
          // All parts in vertical partition j finish engine-wide before
          // partition j+1 starts.
          if (j + 1 < cfg_.vertical_parts)
            for (auto& w : workers_)
              w->cursor.store(0, std::memory_order_relaxed);
        }
      }
      for (uint32_t d = 0; d < cfg_.num_threads; d++) flush_chunk(t, d);
#pragma omp barrier
      worker_delivery_phase(t);
#pragma omp barrier
      worker_end_phase(t);
#pragma omp barrier
#pragma omp single
      {
        apply_boundary_activations();
        boundary_bookkeeping();
      }
      if (done_) break;
    }
  }

  if (cfg_.trace_execution)
    for (auto& w : workers_)
      trace_.insert(trace_.end(), w->trace.begin(), w->trace.end());
  uint64_t multicasts = 0;
  for (auto& w : workers_) multicasts += w->multicast_copies;
  multicast_copies_ = multicasts;

  if (first_error_) {
    try {
      std::rethrow_exception(first_error_);
    } catch (const std::exception& e) {
      throw Error("engine aborted at iteration " + std::to_string(iter_ - 1) +
                  ": " + e.what());
    }
  }
}

}  // namespace semigraph
