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

#include "semigraph/page_cache.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <numeric>

namespace semigraph {

void CacheConfig::validate() const {
  if (page_size < 512 || page_size > (1ull << 20) ||
      (page_size & (page_size - 1)))
    throw ContractViolation("page_size must be a power of two in [512, 1MiB]");
  if (associativity < 1 || capacity_pages < associativity)
    throw ContractViolation("need capacity_pages >= associativity >= 1");
  if (max_merge_bytes < page_size)
    throw ContractViolation("max_merge_bytes must hold at least one page");
}

IoStats IoStats::operator-(const IoStats& o) const {
  IoStats d;
  d.requests_submitted = requests_submitted - o.requests_submitted;
  d.requests_issued_to_file = requests_issued_to_file - o.requests_issued_to_file;
  d.pages_read = pages_read - o.pages_read;
  d.cache_hits = cache_hits - o.cache_hits;
  d.cache_misses = cache_misses - o.cache_misses;
  d.bytes_read = bytes_read - o.bytes_read;
  for (int s = 0; s < 2; s++) {
    d.requests_by_side[s] = requests_by_side[s] - o.requests_by_side[s];
    d.bytes_requested_by_side[s] =
        bytes_requested_by_side[s] - o.bytes_requested_by_side[s];
  }
  return d;
}

std::string IoStats::csv_header() {
  return "requests_submitted,requests_issued_to_file,pages_read,cache_hits,"
         "cache_misses,bytes_read,in_requests,out_requests,in_bytes_requested,"
         "out_bytes_requested";
}

std::string IoStats::csv_row() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu",
                (unsigned long long)requests_submitted,
                (unsigned long long)requests_issued_to_file,
                (unsigned long long)pages_read, (unsigned long long)cache_hits,
                (unsigned long long)cache_misses,
                (unsigned long long)bytes_read,
                (unsigned long long)requests_by_side[0],
                (unsigned long long)requests_by_side[1],
                (unsigned long long)bytes_requested_by_side[0],
                (unsigned long long)bytes_requested_by_side[1]);
  return buf;
}

void PageRange::copy(uint64_t pos, void* dst, uint64_t n) const {
  assert(pos + n <= length_);
  auto* out = static_cast<uint8_t*>(dst);
  uint64_t abs = offset_ + pos;
  while (n > 0) {
    uint64_t page = abs / page_size_ - first_page_;
    uint64_t in_page = abs % page_size_;
    uint64_t chunk = std::min(n, page_size_ - in_page);
    std::memcpy(out, pages_[page] + in_page, chunk);
    out += chunk;
    abs += chunk;
    n -= chunk;
  }
}

std::vector<MergedRequest> merge(const std::vector<IoRequest>& sorted,
                                 uint64_t page_size,
                                 uint64_t max_merge_bytes) {
  std::vector<MergedRequest> out;
  uint64_t prev_offset = 0;
  for (uint32_t i = 0; i < sorted.size(); i++) {
    const IoRequest& r = sorted[i];
    if (i > 0 && r.offset < prev_offset)
      throw ContractViolation("merge input is not sorted by offset");
    prev_offset = r.offset;
    uint64_t first = r.offset / page_size;
    uint64_t last = (r.offset + std::max<uint64_t>(r.length, 1) - 1) / page_size;
    if (!out.empty()) {
      MergedRequest& cur = out.back();
      uint64_t cur_last = cur.first_page + cur.page_count - 1;
      bool adjacent = first <= cur_last + 1;
      uint64_t grown =
          (std::max(last, cur_last) - cur.first_page + 1) * page_size;
      // Overlapping spans must merge so covered pages stay disjoint; the
      // size cap only splits at fresh-page boundaries.
      bool overlaps = first <= cur_last;
      if (adjacent && (overlaps || grown <= max_merge_bytes)) {
        cur.page_count = std::max(last, cur_last) - cur.first_page + 1;
        cur.members.push_back(i);
        continue;
      }
    }
    MergedRequest mr;
    mr.first_page = first;
    mr.page_count = last - first + 1;
    mr.members.push_back(i);
    out.push_back(std::move(mr));
  }
  return out;
}

struct PageCache::Entry {
  uint64_t page_no = 0;
  uint32_t pins = 0;
  uint64_t last_use = 0;
  std::unique_ptr<uint8_t[]> buf;
};

struct PageCache::Slot {
  std::mutex mu;
  std::vector<std::unique_ptr<Entry>> pages;
};

struct PageCache::Counters {
  std::atomic<uint64_t> requests_submitted{0};
  std::atomic<uint64_t> requests_issued_to_file{0};
  std::atomic<uint64_t> pages_read{0};
  std::atomic<uint64_t> cache_hits{0};
  std::atomic<uint64_t> cache_misses{0};
  std::atomic<uint64_t> bytes_read{0};
  std::atomic<uint64_t> requests_by_side[2] = {{0}, {0}};
  std::atomic<uint64_t> bytes_requested_by_side[2] = {{0}, {0}};
};

PageCache::PageCache(const GraphFile& file, const CacheConfig& cfg)
    : file_(file), cfg_(cfg), counters_(std::make_unique<Counters>()) {
  cfg_.validate();
  num_pages_ = (file_.file_bytes() + cfg_.page_size - 1) / cfg_.page_size;
  num_slots_ = std::max<uint64_t>(1, cfg_.capacity_pages / cfg_.associativity);
  slots_.reserve(num_slots_);
  for (uint64_t i = 0; i < num_slots_; i++)
    slots_.push_back(std::make_unique<Slot>());
}

PageCache::~PageCache() = default;

IoStats PageCache::stats() const {
  IoStats s;
  s.requests_submitted = counters_->requests_submitted.load();
  s.requests_issued_to_file = counters_->requests_issued_to_file.load();
  s.pages_read = counters_->pages_read.load();
  s.cache_hits = counters_->cache_hits.load();
  s.cache_misses = counters_->cache_misses.load();
  s.bytes_read = counters_->bytes_read.load();
  for (int i = 0; i < 2; i++) {
    s.requests_by_side[i] = counters_->requests_by_side[i].load();
    s.bytes_requested_by_side[i] = counters_->bytes_requested_by_side[i].load();
  }
  return s;
}

void PageCache::reset_stats() { counters_ = std::make_unique<Counters>(); }

void PageCache::validate_request(const IoRequest& r) const {
  const GraphHeader& h = file_.header();
  uint64_t begin = r.side == EdgeSide::In ? h.in_region_offset
                                          : h.out_region_offset;
  if (r.length == 0) throw ContractViolation("zero-length I/O request");
  if (r.offset < begin)
    throw ContractViolation("request offset before its region");
  if (h.directed && r.side == EdgeSide::In &&
      r.offset + r.length > h.out_region_offset)
    throw ContractViolation("in-region request crosses into out region");
  if (!r.task) throw ContractViolation("request has no completion task");
}

PageCache::Entry* PageCache::acquire_page(uint64_t page_no) {
  std::vector<Entry*> one;
  acquire_run(page_no, 1, one);
  return one[0];
}

// Pins `count` consecutive pages, reading each maximal missing run from the
// file with a single positioned read.
void PageCache::acquire_run(uint64_t first, uint64_t count,
                            std::vector<Entry*>& out) {
  out.assign(count, nullptr);
  for (uint64_t i = 0; i < count; i++) {
    uint64_t pno = first + i;
    Slot& slot = *slots_[pno % num_slots_];
    std::lock_guard<std::mutex> lk(slot.mu);
    for (auto& e : slot.pages) {
      if (e->page_no == pno) {
        e->pins++;
        e->last_use = tick_.fetch_add(1, std::memory_order_relaxed);
        out[i] = e.get();
        break;
      }
    }
    if (out[i])
      counters_->cache_hits.fetch_add(1, std::memory_order_relaxed);
    else
      counters_->cache_misses.fetch_add(1, std::memory_order_relaxed);
  }

  for (uint64_t i = 0; i < count;) {
    if (out[i]) {
      i++;
      continue;
    }
    uint64_t run_begin = i;
    while (i < count && !out[i]) i++;
    uint64_t run_len = i - run_begin;

    std::vector<uint8_t> buf(run_len * cfg_.page_size, 0);
    size_t got = file_.read_at((first + run_begin) * cfg_.page_size, buf.data(),
                               buf.size());
    counters_->requests_issued_to_file.fetch_add(1, std::memory_order_relaxed);
    counters_->pages_read.fetch_add(run_len, std::memory_order_relaxed);
    counters_->bytes_read.fetch_add(got, std::memory_order_relaxed);

    for (uint64_t k = 0; k < run_len; k++) {
      uint64_t pno = first + run_begin + k;
      Slot& slot = *slots_[pno % num_slots_];
      std::lock_guard<std::mutex> lk(slot.mu);
      Entry* found = nullptr;
      for (auto& e : slot.pages)
        if (e->page_no == pno) {
          found = e.get();
          break;
        }
      if (found) {  // another thread filled it meanwhile
        found->pins++;
        found->last_use = tick_.fetch_add(1, std::memory_order_relaxed);
        out[run_begin + k] = found;
        continue;
      }
      auto fresh = std::make_unique<Entry>();
      fresh->page_no = pno;
      fresh->pins = 1;
      fresh->last_use = tick_.fetch_add(1, std::memory_order_relaxed);
      fresh->buf = std::make_unique<uint8_t[]>(cfg_.page_size);
      std::memcpy(fresh->buf.get(), buf.data() + k * cfg_.page_size,
                  cfg_.page_size);
      if (slot.pages.size() >= cfg_.associativity) {
        // Evict the least-recently-used unpinned entry; when everything is
        // pinned the slot temporarily overflows and is trimmed on release.
        size_t victim = slot.pages.size();
        for (size_t j = 0; j < slot.pages.size(); j++) {
          if (slot.pages[j]->pins > 0) continue;
          if (victim == slot.pages.size() ||
              slot.pages[j]->last_use < slot.pages[victim]->last_use)
            victim = j;
        }
        if (victim != slot.pages.size()) {
          out[run_begin + k] = fresh.get();
          slot.pages[victim] = std::move(fresh);
          continue;
        }
      }
      out[run_begin + k] = fresh.get();
      slot.pages.push_back(std::move(fresh));
    }
  }
}

void PageCache::release(Entry* e) {
  Slot& slot = *slots_[e->page_no % num_slots_];
  std::lock_guard<std::mutex> lk(slot.mu);
  assert(e->pins > 0);
  e->pins--;
  while (slot.pages.size() > cfg_.associativity) {
    size_t victim = slot.pages.size();
    for (size_t j = 0; j < slot.pages.size(); j++) {
      if (slot.pages[j]->pins > 0) continue;
      if (victim == slot.pages.size() ||
          slot.pages[j]->last_use < slot.pages[victim]->last_use)
        victim = j;
    }
    if (victim == slot.pages.size()) break;  // all pinned
    slot.pages.erase(slot.pages.begin() + ptrdiff_t(victim));
  }
}

void PageCache::fetch_and_complete(const std::vector<IoRequest>& batch,
                                   const MergedRequest& mr,
                                   const std::vector<uint32_t>* order_rank) {
  std::vector<Entry*> entries;
  std::string fetch_error;
  try {
    acquire_run(mr.first_page, mr.page_count, entries);
  } catch (const IoError& e) {
    fetch_error = e.what();
  }

  std::vector<const uint8_t*> datas;
  if (fetch_error.empty()) {
    datas.reserve(entries.size());
    for (Entry* e : entries) datas.push_back(e->buf.get());
  }

  std::vector<uint32_t> members = mr.members;
  if (order_rank)
    std::sort(members.begin(), members.end(),
              [&](uint32_t a, uint32_t b) {
                return (*order_rank)[a] < (*order_rank)[b];
              });

  for (uint32_t m : members) {
    const IoRequest& r = batch[m];
    IoResult res;
    res.request = &r;
    if (!fetch_error.empty()) {
      res.ok = false;
      res.error = fetch_error;
    } else if (r.offset + r.length > file_.file_bytes()) {
      res.ok = false;
      res.error = "short read: request extends past end of file";
    } else {
      res.ok = true;
      res.view = PageRange(r.offset, r.length, cfg_.page_size, mr.first_page,
                           datas.data());
    }
    r.task(res);
  }

  for (Entry* e : entries)
    if (e) release(e);
}

void PageCache::submit_batch(std::vector<IoRequest> requests, bool sorted_hint,
                             Completion mode) {
  if (requests.empty()) return;
  for (const IoRequest& r : requests) {
    validate_request(r);
    counters_->requests_submitted.fetch_add(1, std::memory_order_relaxed);
    counters_->requests_by_side[size_t(r.side)].fetch_add(
        1, std::memory_order_relaxed);
    counters_->bytes_requested_by_side[size_t(r.side)].fetch_add(
        r.length, std::memory_order_relaxed);
  }

  auto by_offset = [](const IoRequest& a, const IoRequest& b) {
    return a.offset < b.offset;
  };
  // order_rank[i] = submission position of sorted entry i.
  std::vector<uint32_t> order_rank(requests.size());
  std::iota(order_rank.begin(), order_rank.end(), 0);
  if (!(sorted_hint &&
        std::is_sorted(requests.begin(), requests.end(), by_offset))) {
    std::vector<uint32_t> perm(requests.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](uint32_t a, uint32_t b) {
      return requests[a].offset < requests[b].offset;
    });
    std::vector<IoRequest> sorted;
    sorted.reserve(requests.size());
    for (size_t k = 0; k < perm.size(); k++) {
      sorted.push_back(std::move(requests[perm[k]]));
      order_rank[k] = perm[k];
    }
    requests.swap(sorted);
  }

  std::vector<MergedRequest> merged;
  if (cfg_.merging) {
    merged = merge(requests, cfg_.page_size, cfg_.max_merge_bytes);
  } else {
    merged.reserve(requests.size());
    for (uint32_t i = 0; i < requests.size(); i++) {
      MergedRequest mr;
      mr.first_page = requests[i].offset / cfg_.page_size;
      mr.page_count = (requests[i].offset + requests[i].length - 1) /
                          cfg_.page_size -
                      mr.first_page + 1;
      mr.members.push_back(i);
      merged.push_back(std::move(mr));
    }
  }

  if (mode == Completion::Grouped) {
    for (const MergedRequest& mr : merged)
      fetch_and_complete(requests, mr, &order_rank);
    return;
  }

  // SubmissionOrder: make every page resident first, then run tasks strictly
  // in the order requests were submitted.
  struct Held {
    std::vector<Entry*> entries;
    std::vector<const uint8_t*> datas;
    std::string error;
  };
  std::vector<Held> held(merged.size());
  std::vector<uint32_t> member_group(requests.size());
  for (size_t g = 0; g < merged.size(); g++) {
    for (uint32_t m : merged[g].members) member_group[m] = uint32_t(g);
    try {
      acquire_run(merged[g].first_page, merged[g].page_count,
                  held[g].entries);
      for (Entry* e : held[g].entries) held[g].datas.push_back(e->buf.get());
    } catch (const IoError& e) {
      held[g].error = e.what();
      held[g].entries.clear();
    }
  }

  std::vector<uint32_t> by_submission(requests.size());
  std::iota(by_submission.begin(), by_submission.end(), 0);
  std::sort(by_submission.begin(), by_submission.end(),
            [&](uint32_t a, uint32_t b) { return order_rank[a] < order_rank[b]; });
  for (uint32_t m : by_submission) {
    const IoRequest& r = requests[m];
    const Held& h = held[member_group[m]];
    IoResult res;
    res.request = &r;
    if (!h.error.empty()) {
      res.ok = false;
      res.error = h.error;
    } else if (r.offset + r.length > file_.file_bytes()) {
      res.ok = false;
      res.error = "short read: request extends past end of file";
    } else {
      res.ok = true;
      res.view = PageRange(r.offset, r.length, cfg_.page_size,
                           merged[member_group[m]].first_page, h.datas.data());
    }
    r.task(res);
  }
  for (Held& h : held)
    for (Entry* e : h.entries)
      if (e) release(e);
}

PageCache::PinnedPage::PinnedPage(PinnedPage&& o) noexcept
    : cache_(o.cache_), entry_(o.entry_) {
  o.cache_ = nullptr;
  o.entry_ = nullptr;
}

PageCache::PinnedPage::~PinnedPage() {
  if (cache_ && entry_) cache_->release(static_cast<Entry*>(entry_));
}

const uint8_t* PageCache::PinnedPage::data() const {
  return static_cast<Entry*>(entry_)->buf.get();
}

uint64_t PageCache::PinnedPage::page_no() const {
  return static_cast<Entry*>(entry_)->page_no;
}

PageCache::PinnedPage PageCache::read_through(uint64_t page_no) {
  if (page_no >= num_pages_)
    throw ContractViolation("page " + std::to_string(page_no) +
                            " is outside the file");
  return PinnedPage(this, acquire_page(page_no));
}

}  // namespace semigraph
