#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <utility>

#include "eegbench/core/error.hpp"

namespace eegbench {

enum class Paradigm { MI, ERP, SSVEP };

constexpr std::string_view to_string(Paradigm p) {
  switch (p) {
    case Paradigm::MI: return "MI";
    case Paradigm::ERP: return "ERP";
    case Paradigm::SSVEP: return "SSVEP";
  }
  return "?";
}

/// Accepts "MI"/"mi", "ERP"/"erp"/"P300", "SSVEP"/"ssvep".
inline Paradigm parse_paradigm(std::string_view s) {
  std::string up(s);
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "MI") return Paradigm::MI;
  if (up == "ERP" || up == "P300") return Paradigm::ERP;
  if (up == "SSVEP") return Paradigm::SSVEP;
  fail(ErrorCode::InvalidConfig, "unknown paradigm '" + std::string(s) + "'");
}

/// Default preprocessing band (Hz) of each paradigm.
constexpr std::pair<double, double> default_band(Paradigm p) {
  switch (p) {
    case Paradigm::MI: return {8.0, 32.0};
    case Paradigm::ERP: return {1.0, 24.0};
    case Paradigm::SSVEP: return {7.0, 45.0};
  }
  return {0.0, 0.0};
}

}  // namespace eegbench
