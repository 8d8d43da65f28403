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

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "semigraph/binio.hpp"
#include "semigraph/graph_file.hpp"
#include "semigraph/types.hpp"

namespace semigraph {

// User-space page cache over the graph file. Pages live in a hash table with
// multiple pages per slot; eviction is LRU within a slot. Completion follows
// the user-task model: a request carries a task that runs against the cached
// pages once its byte range is resident, with no per-request buffer copies.

struct CacheConfig {
  uint64_t capacity_pages = 4096;
  uint32_t associativity = 8;  // pages per hash slot
  uint64_t page_size = 4096;   // power of two
  bool merging = true;
  // Merging never bridges an untouched page and never grows one request
  // beyond this span (overlapping requests merge regardless to keep covered
  // pages disjoint).
  uint64_t max_merge_bytes = 4ull << 20;

  void validate() const;
};

// Plain counter record. hits + misses always equals page touches, where a
// touch is one page acquisition by a merged request or read_through call.
struct IoStats {
  uint64_t requests_submitted = 0;
  uint64_t requests_issued_to_file = 0;  // pread calls (contiguous page runs)
  uint64_t pages_read = 0;
  uint64_t cache_hits = 0;
  uint64_t cache_misses = 0;
  uint64_t bytes_read = 0;
  // Indexed by EdgeSide; tracks which edge-list region requests target.
  uint64_t requests_by_side[2] = {0, 0};
  uint64_t bytes_requested_by_side[2] = {0, 0};

  IoStats operator-(const IoStats& o) const;
  static std::string csv_header();
  std::string csv_row() const;
};

// Readable window over pinned cache pages. Valid only for the duration of
// the completion task it is handed to; positions are relative to the window.
class PageRange {
 public:
  PageRange() = default;
  PageRange(uint64_t offset, uint64_t length, uint64_t page_size,
            uint64_t first_page, const uint8_t* const* pages)
      : offset_(offset),
        length_(length),
        page_size_(page_size),
        first_page_(first_page),
        pages_(pages) {}

  uint64_t offset() const { return offset_; }
  uint64_t length() const { return length_; }

  uint8_t byte_at(uint64_t pos) const {
    uint64_t abs = offset_ + pos;
    return pages_[abs / page_size_ - first_page_][abs % page_size_];
  }

  // Little-endian u32 read, safe across a page boundary.
  uint32_t u32_at(uint64_t pos) const {
    uint64_t abs = offset_ + pos;
    uint64_t in_page = abs % page_size_;
    if (in_page + 4 <= page_size_)
      return get_u32(pages_[abs / page_size_ - first_page_] + in_page);
    uint8_t b[4];
    copy(pos, b, 4);
    return get_u32(b);
  }

  void copy(uint64_t pos, void* dst, uint64_t n) const;

 private:
  uint64_t offset_ = 0;
  uint64_t length_ = 0;
  uint64_t page_size_ = 1;
  uint64_t first_page_ = 0;
  const uint8_t* const* pages_ = nullptr;
};

struct IoRequest;

struct IoResult {
  const IoRequest* request = nullptr;
  bool ok = false;
  PageRange view;     // valid only when ok, only during the task call
  std::string error;  // set when !ok
};

using IoTask = std::function<void(const IoResult&)>;

// Page-aligned read descriptor carrying the user task.
struct IoRequest {
  uint64_t offset = 0;
  uint64_t length = 0;
  VertexId target = kInvalidVertex;
  EdgeSide side = EdgeSide::Out;
  IoTask task;
};

// Contiguous page span covering one or more requests after merging.
struct MergedRequest {
  uint64_t first_page = 0;
  uint64_t page_count = 0;
  std::vector<uint32_t> members;  // indices into the submitted batch
};

// Coalesces requests whose page spans overlap or abut; never bridges an
// untouched page. Input must be sorted ascending by offset or a
// ContractViolation is thrown. Covered pages of the output are exactly the
// union of the touched pages and pairwise disjoint.
std::vector<MergedRequest> merge(const std::vector<IoRequest>& sorted,
                                 uint64_t page_size,
                                 uint64_t max_merge_bytes = UINT64_MAX);

class PageCache {
 public:
  // How completions are ordered within one submit_batch call.
  enum class Completion {
    Grouped,          // per merged request, as its pages become resident
    SubmissionOrder,  // strictly in submission order (deterministic mode)
  };

  PageCache(const GraphFile& file, const CacheConfig& cfg);
  ~PageCache();

  // Sorts (skipped when sorted_hint is set and the batch is already
  // sorted), merges per the config, satisfies requests from cache or file,
  // and runs every request's task exactly once. Tasks read through the
  // cached pages; a file error surfaces as an error outcome on the affected
  // tasks. Safe to call concurrently from multiple threads.
  void submit_batch(std::vector<IoRequest> requests, bool sorted_hint,
                    Completion mode = Completion::Grouped);

  // Single-page read path; pins the page for the handle's lifetime.
  class PinnedPage {
   public:
    PinnedPage(PinnedPage&& o) noexcept;
    PinnedPage(const PinnedPage&) = delete;
    ~PinnedPage();
    const uint8_t* data() const;
    uint64_t page_no() const;

   private:
    friend class PageCache;
    PinnedPage(PageCache* cache, void* entry) : cache_(cache), entry_(entry) {}
    PageCache* cache_;
    void* entry_;
  };
  PinnedPage read_through(uint64_t page_no);

  const CacheConfig& config() const { return cfg_; }
  uint64_t num_file_pages() const { return num_pages_; }
  IoStats stats() const;
  void reset_stats();

 private:
  struct Entry;
  struct Slot;
  struct Pinned;

  Entry* acquire_page(uint64_t page_no);  // pins; counts hit or miss
  void acquire_run(uint64_t first, uint64_t count, std::vector<Entry*>& out);
  void release(Entry* e);
  void validate_request(const IoRequest& r) const;
  void fetch_and_complete(const std::vector<IoRequest>& batch,
                          const MergedRequest& mr,
                          const std::vector<uint32_t>* order_rank);

  const GraphFile& file_;
  CacheConfig cfg_;
  uint64_t num_pages_ = 0;
  uint64_t num_slots_ = 0;
  std::vector<std::unique_ptr<Slot>> slots_;
  std::atomic<uint64_t> tick_{0};

  struct Counters;
  std::unique_ptr<Counters> counters_;
};

}  // namespace semigraph
