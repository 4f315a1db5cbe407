#pragma once

#include <cstdio>
#include <string>

#include "geoint/types.hpp"

namespace geoint {

/// Version tag written into every CSV and JSON artifact.
inline constexpr int kSchemaVersion = 1;

/// Significant digits of every numeric artifact field; 12 unless changed.
inline int& output_digits() {
  static int digits = 12;
  return digits;
}

inline std::string fmt_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*Lg", output_digits(), v);
  return buf;
}

/// Rounded to output_digits() significant digits for JSON emission.
inline double round_sig(Real v) { return std::stod(fmt_real(v)); }

}  // namespace geoint
