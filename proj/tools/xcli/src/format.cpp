#include "xcli/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace xcli {

namespace {

std::string non_finite(double x) {
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string fmt(double x) {
  if (!std::isfinite(x)) return non_finite(x);
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), res.ptr};
}

std::string fmt_fixed(double x, int decimals) {
  if (!std::isfinite(x)) return non_finite(x);
  std::array<char, 512> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed, decimals);
  return {buf.data(), res.ptr};
}

std::string fmt_compact(double x, int decimals) {
  if (std::isfinite(x) && std::abs(x) < 1e15 && x == std::round(x)) return fmt_fixed(x, 0);
  return fmt_fixed(x, decimals);
}

bool parse_double(std::string_view text, double& out) {
  if (text == "nan") {
    out = std::nan("");
    return true;
  }
  if (text == "inf" || text == "+inf") {
    out = HUGE_VAL;
    return true;
  }
  if (text == "-inf") {
    out = -HUGE_VAL;
    return true;
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size() && !text.empty();
}

bool parse_int(std::string_view text, long& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size() && !text.empty();
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

void write_csv_row(std::ostream& os, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (auto f : fields) {
    if (!first) os << ',';
    os << f;
    first = false;
  }
  os << '\n';
}

}  // namespace xcli
