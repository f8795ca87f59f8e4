#pragma once

#include <string>

namespace ponder {

/// Locale-independent scientific formatting with 17 significant digits,
/// roundtrip-exact for IEEE doubles.
std::string fmt_full(double v);

}  // namespace ponder
