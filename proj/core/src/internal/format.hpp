#pragma once

#include <sstream>
#include <string>

namespace dinilab::detail {

inline std::string number(double v, int precision = 6) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

}  // namespace dinilab::detail
