#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace etaq::csv {

/// Shortest digit string that parses back to the same double. Stable
/// across platforms, so CSV artifacts are byte-reproducible.
inline std::string format(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  static_cast<void>(ec);
  return std::string(buf, ptr);
}

inline std::string format(std::int64_t v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  static_cast<void>(ec);
  return std::string(buf, ptr);
}

/// Comma-separated row accumulator. No quoting: cells are numbers and
/// fixed identifiers by construction.
class Writer {
 public:
  Writer& cell(const std::string& s) {
    if (!line_start_) out_.push_back(',');
    out_ += s;
    line_start_ = false;
    return *this;
  }
  Writer& cell(const char* s) { return cell(std::string(s)); }
  Writer& cell(double v) { return cell(format(v)); }
  Writer& cell(int v) { return cell(format(static_cast<std::int64_t>(v))); }
  Writer& cell(std::int64_t v) { return cell(format(v)); }

  /// Raw line (comment headers and the like); must not contain commas
  /// meant as separators.
  Writer& line(const std::string& s) {
    out_ += s;
    out_.push_back('\n');
    line_start_ = true;
    return *this;
  }

  Writer& endrow() {
    out_.push_back('\n');
    line_start_ = true;
    return *this;
  }

  const std::string& str() const { return out_; }

 private:
  std::string out_;
  bool line_start_ = true;
};

}  // namespace etaq::csv
