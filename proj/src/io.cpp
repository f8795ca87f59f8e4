#include "ponder/io.hpp"

#include <cstdio>

namespace ponder {

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

}  // namespace ponder
