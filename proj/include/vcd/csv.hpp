#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vcd::csv {

// Minimal RFC 4180: fields containing ',', '"' or newlines are quoted.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Returns false at end of input.
bool read_row(std::istream& in, std::vector<std::string>& fields);

// %.6g
std::string fmt(double value);

}  // namespace vcd::csv
