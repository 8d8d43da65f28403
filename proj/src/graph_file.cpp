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

#include "semigraph/graph_file.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "semigraph/binio.hpp"

namespace semigraph {

GraphFile::GraphFile(const std::string& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_RDONLY);
  if (fd_ < 0)
    throw IoError("cannot open " + path + ": " + std::strerror(errno));
  off_t end = ::lseek(fd_, 0, SEEK_END);
  if (end < 0) {
    ::close(fd_);
    throw IoError("lseek failed on " + path);
  }
  file_bytes_ = uint64_t(end);

  uint8_t hdr[kGraphHeaderBytes];
  if (file_bytes_ < kGraphHeaderBytes ||
      ::pread(fd_, hdr, sizeof(hdr), 0) != ssize_t(sizeof(hdr))) {
    ::close(fd_);
    throw FormatError("file too small for a graph header: " + path);
  }
  try {
    header_ = GraphHeader::decode(hdr);
  } catch (...) {
    ::close(fd_);
    throw;
  }
}

GraphFile::~GraphFile() {
  if (fd_ >= 0) ::close(fd_);
}

GraphFile::GraphFile(GraphFile&& o) noexcept
    : path_(std::move(o.path_)),
      fd_(o.fd_),
      file_bytes_(o.file_bytes_),
      header_(o.header_) {
  o.fd_ = -1;
}

size_t GraphFile::read_at(uint64_t offset, void* dst, size_t len) const {
  size_t done = 0;
  auto* p = static_cast<uint8_t*>(dst);
  while (done < len) {
    ssize_t r = ::pread(fd_, p + done, len - done, off_t(offset + done));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw IoError("pread failed on " + path_ + ": " + std::strerror(errno));
    }
    if (r == 0) break;  // EOF
    done += size_t(r);
  }
  return done;
}

std::vector<VertexId> GraphFile::read_list_direct(const GraphIndex& index,
                                                  VertexId v,
                                                  EdgeSide side) const {
  auto loc = index.locate(v, side);
  std::vector<uint8_t> buf(loc.length);
  if (read_at(loc.offset, buf.data(), buf.size()) != buf.size())
    throw FormatError("short read of edge list for vertex " +
                      std::to_string(v));
  VertexId owner = get_u32(buf.data());
  uint32_t degree = get_u32(buf.data() + 4);
  if (owner != v || degree != index.degree(v, side))
    throw FormatError("edge list header mismatch at vertex " +
                      std::to_string(v) + " (offset " +
                      std::to_string(loc.offset) + ")");
  std::vector<VertexId> out(degree);
  for (uint32_t i = 0; i < degree; i++)
    out[i] = get_u32(buf.data() + kListHeaderBytes + 4 * size_t(i));
  return out;
}

}  // namespace semigraph
