// Deterministic result serialization. Summaries are JSON with floats at 17
// significant digits; bulk data goes to tab-separated tables; path dumps have
// a text and a compact binary layout (magic "RWREPATH", little-endian i32
// coordinates).
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rwre/path.hpp"

namespace rwre {

std::string format_double(double x);  // %.17g

// Streaming JSON emitter with stable key order and 2-space indentation.
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& os) : os_(os) {}

  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& null_value();

  template <class T>
  JsonWriter& kv(const std::string& k, const T& v) {
    key(k);
    return value(v);
  }

 private:
  void separator();
  void newline_indent();
  std::ostream& os_;
  std::vector<bool> needs_comma_;
  bool pending_key_ = false;
};

class TableWriter {
 public:
  TableWriter(std::ostream& os, const std::vector<std::string>& columns);
  TableWriter& cell(double v);
  TableWriter& cell(std::int64_t v);
  TableWriter& cell(const std::string& v);
  void end_row();

 private:
  std::ostream& os_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

void write_paths_tsv(std::ostream& os, const std::vector<WalkPath>& paths);
void write_paths_binary(std::ostream& os, const std::vector<WalkPath>& paths);

}  // namespace rwre
