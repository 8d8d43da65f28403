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
#include <stdexcept>
#include <string>

namespace semigraph {

// Vertex IDs are dense in [0, num_vertices).
using VertexId = uint32_t;

inline constexpr VertexId kInvalidVertex = UINT32_MAX;

// Which on-disk edge-list region a request targets. Undirected graphs have a
// single region and either side resolves to it.
enum class EdgeSide : uint8_t { In = 0, Out = 1 };

inline constexpr const char* side_name(EdgeSide s) {
  return s == EdgeSide::In ? "in" : "out";
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or truncated on-disk data.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File I/O failure (open/read/write).
class IoError : public Error {
 public:
  using Error::Error;
};

// An API precondition was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Text-input parse failure; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

}  // namespace semigraph
