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

#include "semigraph/algos.hpp"

#include <cstdio>
#include <memory>
#include <numeric>

namespace semigraph {

namespace {

std::vector<VertexId> all_vertices(uint64_t n) {
  std::vector<VertexId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

template <class Program>
AlgoResult run_with(const GraphFile& file, const GraphIndex& index,
                    const EngineConfig& cfg, Program program,
                    std::vector<VertexId> initial) {
  Engine<Program> engine(file, index, cfg, std::move(program));
  engine.run(std::move(initial));
  AlgoResult r;
  r.iterations = engine.iteration_stats();
  r.io = engine.cache().stats();
  r.trace = engine.trace();

  const auto& st = engine.states();
  if constexpr (std::is_same_v<Program, BfsProgram>) {
    r.levels.reserve(st.size());
    for (const auto& s : st) r.levels.push_back(s.level);
  } else if constexpr (std::is_same_v<Program, BcProgram>) {
    r.scores.reserve(st.size());
    for (const auto& s : st) r.scores.push_back(s.delta);
  } else if constexpr (std::is_same_v<Program, PrProgram>) {
    r.scores.reserve(st.size());
    for (const auto& s : st) r.scores.push_back(s.rank);
  } else if constexpr (std::is_same_v<Program, WccProgram>) {
    r.labels.reserve(st.size());
    for (const auto& s : st) r.labels.push_back(s.label);
  } else if constexpr (std::is_same_v<Program, TcProgram>) {
    r.counts.reserve(st.size());
    uint64_t sum = 0;
    for (const auto& s : st) {
      r.counts.push_back(s.count);
      sum += s.count;
    }
    r.tc_total = sum / 3;
  } else if constexpr (std::is_same_v<Program, SsProgram>) {
    auto [max_stat, argmax] = engine.program().best.get();
    r.ss_max = max_stat;
    r.ss_argmax = argmax;
  }
  return r;
}

}  // namespace

bool is_known_algorithm(const std::string& name) {
  return name == "bfs" || name == "bc" || name == "pr" || name == "wcc" ||
         name == "tc" || name == "ss";
}

AlgoResult run_algorithm(const GraphFile& file, const GraphIndex& index,
                         const EngineConfig& cfg, const AlgoParams& params) {
  const uint64_t n = index.num_vertices();
  AlgoResult r;
  if (params.algorithm == "bfs" || params.algorithm == "bc") {
    if (params.source >= n)
      throw ContractViolation("source vertex " +
                              std::to_string(params.source) +
                              " is out of range");
  }
  if (params.algorithm == "bfs") {
    r = run_with(file, index, cfg, BfsProgram{}, {params.source});
  } else if (params.algorithm == "bc") {
    r = run_with(file, index, cfg, BcProgram(params.source), {params.source});
  } else if (params.algorithm == "pr") {
    EngineConfig pr_cfg = cfg;
    pr_cfg.max_iterations = params.max_iters;
    r = run_with(file, index, pr_cfg,
                 PrProgram(params.damping, params.threshold),
                 all_vertices(n));
  } else if (params.algorithm == "wcc") {
    r = run_with(file, index, cfg, WccProgram{}, all_vertices(n));
  } else if (params.algorithm == "tc") {
    r = run_with(file, index, cfg, TcProgram{}, all_vertices(n));
  } else if (params.algorithm == "ss") {
    r = run_with(file, index, cfg, SsProgram(&index, params.ss_pruning),
                 all_vertices(n));
  } else {
    throw ContractViolation("unknown algorithm: " + params.algorithm);
  }
  r.algorithm = params.algorithm;
  return r;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_out(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open " + path + " for writing");
  return f;
}

}  // namespace

void write_result_csv(const std::string& path, const AlgoResult& r) {
  FilePtr f = open_out(path);
  if (r.algorithm == "bfs") {
    std::fprintf(f.get(), "vertex_id,level\n");
    for (size_t v = 0; v < r.levels.size(); v++)
      std::fprintf(f.get(), "%zu,%u\n", v, r.levels[v]);
  } else if (r.algorithm == "bc") {
    std::fprintf(f.get(), "vertex_id,dependency\n");
    for (size_t v = 0; v < r.scores.size(); v++)
      std::fprintf(f.get(), "%zu,%.17g\n", v, r.scores[v]);
  } else if (r.algorithm == "pr") {
    std::fprintf(f.get(), "vertex_id,rank\n");
    for (size_t v = 0; v < r.scores.size(); v++)
      std::fprintf(f.get(), "%zu,%.17g\n", v, r.scores[v]);
  } else if (r.algorithm == "wcc") {
    std::fprintf(f.get(), "vertex_id,label\n");
    for (size_t v = 0; v < r.labels.size(); v++)
      std::fprintf(f.get(), "%zu,%u\n", v, r.labels[v]);
  } else if (r.algorithm == "tc") {
    std::fprintf(f.get(), "vertex_id,triangles\n");
    for (size_t v = 0; v < r.counts.size(); v++)
      std::fprintf(f.get(), "%zu,%llu\n", v,
                   (unsigned long long)r.counts[v]);
  } else if (r.algorithm == "ss") {
    std::fprintf(f.get(), "max_scan,argmax_vertex\n");
    std::fprintf(f.get(), "%llu,%u\n", (unsigned long long)r.ss_max,
                 r.ss_argmax);
  }
  if (std::fflush(f.get()) != 0) throw IoError("flush failed: " + path);
}

void write_iteration_csv(const std::string& path, const AlgoResult& r) {
  FilePtr f = open_out(path);
  std::fprintf(f.get(), "%s\n", IterationStats::csv_header().c_str());
  for (const auto& row : r.iterations)
    std::fprintf(f.get(), "%s\n", row.csv_row().c_str());
  if (std::fflush(f.get()) != 0) throw IoError("flush failed: " + path);
}

}  // namespace semigraph
