#pragma once

#include <iosfwd>
#include <string_view>
#include <span>
#include <string>
#include <vector>

namespace ncar {

/// Shortest decimal text that reads back to exactly `x` ('.' separator, no locale).
[[nodiscard]] std::string format_double(double x);

/// Parses a whole string as a finite double; throws InvalidArgument otherwise.
[[nodiscard]] double parse_double(std::string_view text);

/// One value per line. Blank lines and lines starting with '#' are skipped.
[[nodiscard]] std::vector<double> read_series(std::istream& in);
[[nodiscard]] std::vector<double> read_series_file(const std::string& path);

void write_series(std::ostream& out, std::span<const double> values);
void write_series_file(const std::string& path, std::span<const double> values);

}  // namespace ncar
