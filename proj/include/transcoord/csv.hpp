#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace transcoord {

// Shortest text that round-trips a double: 17 significant digits, '.' decimal
// separator regardless of locale.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) {
    write_fields(header);
  }

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    Row& operator<<(double v) { return add(format_real(v)); }
    Row& operator<<(int v) { return add(std::to_string(v)); }
    Row& operator<<(long v) { return add(std::to_string(v)); }
    Row& operator<<(unsigned long v) { return add(std::to_string(v)); }
    Row& operator<<(unsigned long long v) { return add(std::to_string(v)); }
    Row& operator<<(long long v) { return add(std::to_string(v)); }
    Row& operator<<(bool v) { return add(v ? "true" : "false"); }
    Row& operator<<(std::string_view v) { return add(std::string(v)); }
    Row& operator<<(const char* v) { return add(v); }
    ~Row() { w_.write_fields(fields_); }

   private:
    Row& add(std::string s) {
      fields_.push_back(std::move(s));
      return *this;
    }
    CsvWriter& w_;
    std::vector<std::string> fields_;
  };

  Row row() { return Row(*this); }

 private:
  void write_fields(const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) os_ << ',';
      os_ << f[i];
    }
    os_ << '\n';
  }

  std::ostream& os_;
};

}  // namespace transcoord
