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
#include "semigraph/graph_index.hpp"
#include "semigraph/types.hpp"

namespace semigraph {

// Read-only handle on a .fgg container. Immutable after open; pread-based
// access is safe from any number of threads.
class GraphFile {
 public:
  explicit GraphFile(const std::string& path);
  ~GraphFile();

  GraphFile(const GraphFile&) = delete;
  GraphFile& operator=(const GraphFile&) = delete;
  GraphFile(GraphFile&& o) noexcept;
  GraphFile& operator=(GraphFile&&) = delete;

  const GraphHeader& header() const { return header_; }
  uint64_t file_bytes() const { return file_bytes_; }
  const std::string& path() const { return path_; }

  uint64_t region_offset(EdgeSide side) const {
    return side == EdgeSide::In ? header_.in_region_offset
                                : header_.out_region_offset;
  }

  // Positioned read; returns bytes actually read (short only at EOF).
  size_t read_at(uint64_t offset, void* dst, size_t len) const;

  // Uncached direct read of one vertex's sorted neighbor list. Validates the
  // on-disk list header against the index. Test and tool path; the engine
  // goes through the page cache instead.
  std::vector<VertexId> read_list_direct(const GraphIndex& index, VertexId v,
                                         EdgeSide side) const;

 private:
  std::string path_;
  int fd_ = -1;
  uint64_t file_bytes_ = 0;
  GraphHeader header_;
};

}  // namespace semigraph
