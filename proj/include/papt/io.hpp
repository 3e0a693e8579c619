// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace papt {

/// Shortest round-trip decimal for a double. Byte-stable across runs and
/// platforms, which keeps golden files and determinism checks meaningful.
inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Minimal CSV emitter with a fixed column order.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(const std::vector<std::string>& cols) { row_strings(cols); }

  void field(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
  }
  void field(double x) { field(format_double(x)); }
  void field(std::uint64_t x) { field(std::to_string(x)); }
  void field(std::int64_t x) { field(std::to_string(x)); }
  void field(int x) { field(std::to_string(x)); }

  void end_row() {
    os_ << '\n';
    first_ = true;
  }

  void row_strings(const std::vector<std::string>& cols) {
    for (const auto& c : cols) field(c);
    end_row();
  }

 private:
  std::ostream& os_;
  bool first_ = true;
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace papt
