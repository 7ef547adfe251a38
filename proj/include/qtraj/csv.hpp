#pragma once

#include <string>

namespace qtraj {

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double value);

/// Locale-independent decimal parse of the whole string; throws ValidationError.
double parse_double(const std::string& text);

}  // namespace qtraj
