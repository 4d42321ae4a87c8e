#include "hybridsl/format.hpp"

#include <charconv>

namespace hybridsl {

std::string fmt_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace hybridsl
