#pragma once

#include <string>

namespace fraudgraph {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Parses the whole string as a double (decimal or hex-float); throws
// std::invalid_argument otherwise.
double parse_double(const std::string& text);

}  // namespace fraudgraph
