#include "vcd/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "vcd/error.hpp"

namespace vcd::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

bool read_row(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  int c = in.peek();
  if (c == EOF) return false;
  std::string cur;
  bool quoted = false;
  while ((c = in.get()) != EOF) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          cur += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        cur += static_cast<char>(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += static_cast<char>(c);
    }
  }
  if (quoted) throw Error(ErrorCode::kParseError, "unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return true;
}

std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

}  // namespace vcd::csv
