#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace xcli {

/// Shortest decimal text that parses back to exactly `x`; "nan", "inf", "-inf"
/// for non-finite values. Independent of the global locale.
std::string fmt(double x);

/// Fixed notation with `decimals` digits after the point.
std::string fmt_fixed(double x, int decimals);

/// Fixed notation, but integers print without a fractional part.
std::string fmt_compact(double x, int decimals);

/// Parses a double written in the C locale; the whole string must be consumed.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long& out);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);
void write_csv_row(std::ostream& os, std::initializer_list<std::string_view> fields);

}  // namespace xcli
