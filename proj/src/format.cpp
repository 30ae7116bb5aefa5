#include "fraudgraph/format.hpp"

#include <charconv>
#include <cstdlib>
#include <stdexcept>

namespace fraudgraph {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw std::invalid_argument("cannot parse '" + text + "' as a number");
  }
  return value;
}

}  // namespace fraudgraph
