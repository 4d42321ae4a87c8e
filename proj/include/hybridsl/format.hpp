#pragma once

#include <string>

namespace hybridsl {

/// Shortest text form of a double that reads back to the same value.
std::string fmt_double(double value);

}  // namespace hybridsl
