// Shared test utilities: temp directories, file slurping, text graphs.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "semigraph/types.hpp"

namespace testutil {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() /
                        "semigraph_test_XXXXXX")
                           .string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

inline std::string edges_to_text(
    const std::vector<std::pair<semigraph::VertexId, semigraph::VertexId>>&
        edges) {
  std::string s;
  char buf[32];
  for (auto& e : edges) {
    std::snprintf(buf, sizeof(buf), "%u %u\n", e.first, e.second);
    s += buf;
  }
  return s;
}

}  // namespace testutil

#ifdef SEMIGRAPH_WANT_GRAPH_FIXTURE
#include <memory>
#include <sstream>

#include "semigraph/convert.hpp"
#include "semigraph/graph_file.hpp"
#include "semigraph/graph_index.hpp"

namespace testutil {

// A text graph converted to disk and opened, for engine-level tests.
struct GraphOnDisk {
  TempDir dir;
  semigraph::ConvertResult res;
  std::unique_ptr<semigraph::GraphFile> file;
  semigraph::GraphIndex index;

  explicit GraphOnDisk(const std::string& text,
                       semigraph::ConvertOptions opts = {.directed = true}) {
    std::istringstream in(text);
    res = semigraph::convert(in, dir.file("g.fgg"), dir.file("g.fgi"), opts);
    file = std::make_unique<semigraph::GraphFile>(dir.file("g.fgg"));
    index = semigraph::GraphIndex::load(dir.file("g.fgi"));
  }
};

}  // namespace testutil
#endif
