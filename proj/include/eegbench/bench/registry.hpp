#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eegbench/core/error.hpp"
#include "eegbench/core/paradigm.hpp"

namespace eegbench::bench {

/// One published dataset. Cells that vary across subjects or classes are
/// kept verbatim; the numeric fields hold the uniform value when there is one.
struct DatasetDescriptor {
  std::string id;
  Paradigm paradigm = Paradigm::MI;
  int n_subjects = 0;
  int n_channels = 0;
  std::string n_classes;     // e.g. "3(4)": used classes (all classes)
  std::string trials;        // per session per class (MI, SSVEP) or NT/T per session (ERP)
  double trial_len_s = 0;
  double sfreq_hz = 0;
  std::string n_sessions;
  std::string n_runs;
  std::string class_names;   // classes, or the keyboard for ERP rows

  int classes_used() const { return std::atoi(n_classes.c_str()); }

  /// Count inside the parentheses when present, else the used count.
  int classes_total() const {
    const auto open = n_classes.find('(');
    return open == std::string::npos ? classes_used() : std::atoi(n_classes.c_str() + open + 1);
  }

  /// Session count when every subject has the same number.
  std::optional<int> uniform_sessions() const { return plain_int(n_sessions); }
  std::optional<int> uniform_runs() const { return plain_int(n_runs); }

  /// Per-class trial count per session when it is identical for all
  /// subjects ("72 ± 0" or "50").
  std::optional<double> uniform_trials() const {
    if (paradigm == Paradigm::ERP) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(trials.c_str(), &end);
    const std::string_view rest(end);
    if (end == trials.c_str()) return std::nullopt;
    if (rest.empty() || rest == " ± 0") return v;
    return std::nullopt;
  }

 private:
  static std::optional<int> plain_int(const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
      return std::nullopt;
    return std::atoi(s.c_str());
  }
};

/// Trials in the whole dataset for one subject: trials per class per session
/// × all classes × sessions (BNCI2014_001: 72 × 4 × 2 = 576, i.e. 12 per run
/// over 6 runs).
inline std::optional<double> total_trials_per_subject(const DatasetDescriptor& d) {
  const auto t = d.uniform_trials();
  const auto s = d.uniform_sessions();
  if (!t || !s) return std::nullopt;
  return *t * d.classes_total() * *s;
}

inline const std::vector<DatasetDescriptor>& registry() {
  using P = Paradigm;
  static const std::vector<DatasetDescriptor> rows = {
      // Motor imagery
      {"AlexMI", P::MI, 8, 16, "2(3)", "20 ± 0", 3, 512, "1", "1", "RH, F, (R)"},
      {"BNCI2014_001", P::MI, 9, 22, "3(4)", "72 ± 0", 4, 250, "2", "6", "RH, LH, F, (T)"},
      {"BNCI2014_002", P::MI, 14, 15, "2", "80 ± 0", 5, 512, "1", "8", "RH, F"},
      {"BNCI2014_004", P::MI, 9, 3, "2", "72.4 ± 9.5", 4.5, 250, "5", "1", "RH, LH"},
      {"BNCI2015_001", P::MI, 12, 13, "2", "100 ± 0", 5, 512, "3 subj. 8-11, 2 others", "1", "RH, F"},
      {"BNCI2015_004", P::MI, 9, 30, "2(5)", "39.4 ± 1.6", 7, 256, "2", "1", "RH, F"},
      {"Cho2017", P::MI, 52, 64, "2", "101.2 ± 4.7", 3, 512, "1", "1", "RH, LH"},
      {"Lee2019_MI", P::MI, 54, 62, "2", "50", 4, 1000, "2", "1", "RH, LH"},
      {"GrosseWentrup2009", P::MI, 10, 128, "2", "150 ± 0", 7, 500, "1", "1", "RH, LH"},
      {"PhysionetMI", P::MI, 109, 64, "4(5)", "22.6 ± 1.3", 3, 160, "1", "6***", "RH, LH, H, F, (R)"},
      {"Schirrmeister2017", P::MI, 14, 128, "3(4)", "240.8 ± 37.7", 4, 500, "1", "2", "RH, LH, F, (R)"},
      {"Shin2017A", P::MI, 29, 30, "2", "10 ± 0", 10, 200, "3", "1", "RH, LH"},
      {"Weibo2014", P::MI, 10, 60, "4(7)", "79 ± 3", 4, 200, "1", "1", "RH, LH, H, F, (LHRF), (RHLF), (R)"},
      {"Zhou2016", P::MI, 4, 14, "3", "50 ± 3.5", 5, 250, "3", "2", "RH, LF, F"},
      // ERP
      {"BI2012", P::ERP, 25, 16, "2", "638.2 ± 1.9/127.6 ± 0.7", 1, 128, "1", "1", "36 aliens"},
      {"BI2013a", P::ERP, 24, 16, "2", "400.3 ± 2.3/80.1 ± 0.5", 1, 512, "8 subj. 1-7, 1 subj. 8-24", "1",
       "36 aliens"},
      {"BI2014a", P::ERP, 64, 16, "2", "794.5 ± 276.7/158.9 ± 55.3", 1, 512, "1", "1", "36 aliens"},
      {"BI2014b", P::ERP, 37, 32, "2", "201.3 ± 61.5/40.3 ± 12.3", 1, 512, "1", "1", "36 aliens"},
      {"BI2015a", P::ERP, 43, 32, "2", "461.8 ± 220.9/92.3 ± 44.1", 1, 512, "3", "1", "36 aliens"},
      {"BI2015b", P::ERP, 44, 32, "2", "2158.7 ± 6.3/479.9 ± 0.3", 1, 512, "1", "4", "36 aliens"},
      {"BNCI2014_008", P::ERP, 8, 8, "2", "3500 ± 0/700 ± 0", 1, 256, "1", "1", "36 char."},
      {"BNCI2014_009", P::ERP, 10, 16, "2", "480 ± 0/96 ± 0", 0.8, 256, "3", "1", "36 char."},
      {"BNCI2015_003", P::ERP, 10, 8, "2", "2250 ± 1500/270 ± 60", 0.8, 256, "1", "2", "36 char."},
      {"EPFLP300", P::ERP, 8, 32, "2", "685.2 ± 16.9/137.2 ± 3.5", 1, 2048, "4", "6", "6 images"},
      {"Huebner2017", P::ERP, 13, 31, "2", "3275.3 ± 2.1/1007.8 ± 0.6", 0.9, 1000, "2 subj. 6, 3 others", "9",
       "42 char."},
      {"Huebner2018", P::ERP, 12, 31, "2", "3638.4 ± 7.7/1119.6 ± 2.5", 0.9, 1000, "3", "10", "42 char."},
      {"Lee2019_ERP", P::ERP, 54, 62, "2", "3450/690", 1, 1000, "2", "1", "36 char."},
      {"Sosulski2019", P::ERP, 13, 31, "2", "75 ± 0/15 ± 0", 1.2, 1000, "4 subj. 1, 3 others", "20", "2 tones"},
      {"Cattan2019_VR", P::ERP, 21, 16, "2", "600 ± 0/120 ± 0", 1, 512, "2", "60", "36 crosses"},
      // SSVEP
      {"Lee2019_SSVEP", P::SSVEP, 54, 62, "4", "25", 1, 1000, "2", "1", "4 (5.45-12)"},
      {"MAMEM1", P::SSVEP, 10, 256, "5", "16.8 ± 3.5 classes 8.57,10.0; 21.0 ± 4.4 classes 6.66,7.5,12.0", 3, 250,
       "1", "3 subj. 1,3,8; 4 subj. 4,6; 5 others", "5 (6.66-12.00)"},
      {"MAMEM2", P::SSVEP, 10, 256, "5", "20 class 12.0; 30 class 8.57; 25 others", 3, 250, "1", "5",
       "5 (6.66-12.00)"},
      {"MAMEM3", P::SSVEP, 10, 14, "4",
       "20.0 ± 0.0 class 6.66; 25.0 ± 0.0 class 8.57; 30.0 ± 0.0 class 10.0; 25.0 ± 0.0 class 12.0", 3, 128, "1",
       "10", "4 (6.66-12.00)"},
      {"Nakanishi2015", P::SSVEP, 9, 8, "12", "15.0 ± 0.0", 4.15, 256, "1", "1", "12 (9.25-14.75)"},
      {"Kalunga2016", P::SSVEP, 12, 8, "4", "20.0 ± 7.7", 2, 256, "1", "5 subj. 12; 4 subj. 10; 3 subj. 7; 2 others",
       "4 (13,17,21,rest)"},
      {"Wang2016", P::SSVEP, 34, 62, "40", "6.0 ± 0.0", 5, 250, "1", "1", "40 (8-15.8)"},
  };
  return rows;
}

namespace detail {

inline std::string registry_key(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out += char(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace detail

/// Case-insensitive lookup that ignores '-', '_' and spaces, so result-table
/// spellings ("BNCI2014-001", "AlexandreMotorImagery") resolve too.
inline const DatasetDescriptor& registry_lookup(std::string_view id) {
  static const std::map<std::string, std::string> aliases = {
      {"alexandremotorimagery", "AlexMI"},   {"physionetmotorimagery", "PhysionetMI"},
      {"braininvaders2012", "BI2012"},       {"braininvaders2013a", "BI2013a"},
      {"braininvaders2014a", "BI2014a"},     {"braininvaders2014b", "BI2014b"},
      {"braininvaders2015a", "BI2015a"},     {"braininvaders2015b", "BI2015b"},
  };
  std::string key = detail::registry_key(id);
  if (const auto it = aliases.find(key); it != aliases.end()) key = detail::registry_key(it->second);
  for (const auto& d : registry())
    if (detail::registry_key(d.id) == key) return d;
  fail(ErrorCode::NotFound, "unknown dataset '" + std::string(id) + "'");
}

inline bool registry_contains(std::string_view id) {
  try {
    registry_lookup(id);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace eegbench::bench
