#include "rwre/io.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace rwre {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void JsonWriter::separator() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!needs_comma_.empty()) {
    if (needs_comma_.back()) os_ << ",";
    needs_comma_.back() = true;
    newline_indent();
  }
}

void JsonWriter::newline_indent() {
  os_ << "\n";
  for (std::size_t i = 0; i < needs_comma_.size(); ++i) os_ << "  ";
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  os_ << "{";
  needs_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool had_items = needs_comma_.back();
  needs_comma_.pop_back();
  if (had_items) newline_indent();
  os_ << "}";
  if (needs_comma_.empty()) os_ << "\n";
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  os_ << "[";
  needs_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  const bool had_items = needs_comma_.back();
  needs_comma_.pop_back();
  if (had_items) newline_indent();
  os_ << "]";
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  separator();
  os_ << '"' << k << "\": ";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  os_ << format_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
  separator();
  os_ << v;
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  separator();
  os_ << v;
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  os_ << (v ? "true" : "false");
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  separator();
  os_ << '"';
  for (char c : v) {
    if (c == '"' || c == '\\') os_ << '\\';
    os_ << c;
  }
  os_ << '"';
  return *this;
}

JsonWriter& JsonWriter::null_value() {
  separator();
  os_ << "null";
  return *this;
}

TableWriter::TableWriter(std::ostream& os, const std::vector<std::string>& columns)
    : os_(os), columns_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "\t" : "") << columns[i];
  os_ << "\n";
}

TableWriter& TableWriter::cell(double v) {
  os_ << (in_row_++ ? "\t" : "") << format_double(v);
  return *this;
}

TableWriter& TableWriter::cell(std::int64_t v) {
  os_ << (in_row_++ ? "\t" : "") << v;
  return *this;
}

TableWriter& TableWriter::cell(const std::string& v) {
  os_ << (in_row_++ ? "\t" : "") << v;
  return *this;
}

void TableWriter::end_row() {
  if (in_row_ != columns_) throw std::logic_error("TableWriter: row width mismatch");
  os_ << "\n";
  in_row_ = 0;
}

void write_paths_tsv(std::ostream& os, const std::vector<WalkPath>& paths) {
  if (paths.empty()) return;
  const int d = paths.front().dim();
  std::vector<std::string> cols = {"replica", "t"};
  for (int i = 0; i < d; ++i) cols.push_back("x" + std::to_string(i + 1));
  TableWriter table(os, cols);
  for (std::size_t r = 0; r < paths.size(); ++r) {
    for (std::int64_t t = 0; t <= paths[r].horizon(); ++t) {
      table.cell(static_cast<std::int64_t>(r)).cell(t);
      for (int i = 0; i < d; ++i) table.cell(static_cast<std::int64_t>(paths[r].at(t)[i]));
      table.end_row();
    }
  }
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_i32(std::ostream& os, std::int32_t v) { put_u32(os, static_cast<std::uint32_t>(v)); }

}  // namespace

void write_paths_binary(std::ostream& os, const std::vector<WalkPath>& paths) {
  // Layout: magic "RWREPATH", u32 version = 1, u32 dim, u32 record count,
  // then records of (u32 replica, u32 t, i32 x_1..x_d), all little-endian.
  os.write("RWREPATH", 8);
  put_u32(os, 1);
  const std::uint32_t dim = paths.empty() ? 0 : static_cast<std::uint32_t>(paths.front().dim());
  put_u32(os, dim);
  std::uint32_t records = 0;
  for (const auto& p : paths) records += static_cast<std::uint32_t>(p.horizon() + 1);
  put_u32(os, records);
  for (std::size_t r = 0; r < paths.size(); ++r) {
    for (std::int64_t t = 0; t <= paths[r].horizon(); ++t) {
      put_u32(os, static_cast<std::uint32_t>(r));
      put_u32(os, static_cast<std::uint32_t>(t));
      for (int i = 0; i < static_cast<int>(dim); ++i) put_i32(os, paths[r].at(t)[i]);
    }
  }
}

}  // namespace rwre
