#pragma once

// Locale-independent number text for the CSV formats.

#include <cstdint>
#include <string>
#include <string_view>

namespace consist::numfmt {

/// Shortest-general form with 17 significant digits ("inf" for +infinity).
std::string sig17(double x);

/// Fixed notation with `decimals` digits after the point.
std::string fixed(double x, int decimals);

/// Whole-field parses; throw std::invalid_argument on anything left over.
double parse_double(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

}  // namespace consist::numfmt
