#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "eegbench/core/error.hpp"
#include "eegbench/eval/evaluate.hpp"

namespace eegbench::bench {

/// Shortest round-trip representation; independent of the C locale.
inline std::string format_number(double v) {
  if (v == 0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return std::string(buf, r.ptr);
}

inline double parse_number(std::string_view s) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  require(r.ec == std::errc() && r.ptr == s.data() + s.size(), ErrorCode::InvalidInput,
          "not a number: '" + std::string(s) + "'");
  return v;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

/// Splits CSV text into records (RFC 4180 quoting).
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  require(!quoted, ErrorCode::InvalidInput, "unterminated quote in CSV");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorCode::NotFound, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline const std::vector<std::string> kResultColumns = {
    "dataset", "subject", "session", "pipeline", "fold", "metric", "score", "n_train", "n_test",
    "fit_time_s", "predict_time_s", "energy_wh", "co2_g"};

/// `with_timing` false writes zeros in the four timing columns so the file
/// depends only on data, configuration and seed.
inline std::string results_csv(const std::vector<eval::ResultRow>& rows, bool with_timing = true) {
  std::string out;
  for (std::size_t i = 0; i < kResultColumns.size(); ++i) out += (i ? "," : "") + kResultColumns[i];
  out += '\n';
  for (const auto& r : rows) {
    const auto t = [&](double v) { return with_timing ? format_number(v) : std::string("0"); };
    out += csv_field(r.dataset) + ',' + std::to_string(r.subject) + ',' + csv_field(r.session) + ',' +
           csv_field(r.pipeline) + ',' + std::to_string(r.fold) + ',' + r.metric + ',' + format_number(r.score) +
           ',' + std::to_string(r.n_train) + ',' + std::to_string(r.n_test) + ',' + t(r.fit_time_s) + ',' +
           t(r.predict_time_s) + ',' + t(r.energy_wh) + ',' + t(r.co2_g) + '\n';
  }
  return out;
}

inline std::string timings_csv(const std::vector<eval::ResultRow>& rows) {
  std::string out = "dataset,subject,session,pipeline,fold,fit_time_s,predict_time_s,energy_wh,co2_g\n";
  for (const auto& r : rows)
    out += csv_field(r.dataset) + ',' + std::to_string(r.subject) + ',' + csv_field(r.session) + ',' +
           csv_field(r.pipeline) + ',' + std::to_string(r.fold) + ',' + format_number(r.fit_time_s) + ',' +
           format_number(r.predict_time_s) + ',' + format_number(r.energy_wh) + ',' + format_number(r.co2_g) +
           '\n';
  return out;
}

inline std::vector<eval::ResultRow> parse_results(std::string_view text) {
  const auto records = parse_csv(text);
  require(!records.empty(), ErrorCode::InvalidInput, "empty results file");
  const auto& header = records.front();
  std::vector<int> col(kResultColumns.size(), -1);
  for (std::size_t i = 0; i < header.size(); ++i)
    for (std::size_t k = 0; k < kResultColumns.size(); ++k)
      if (header[i] == kResultColumns[k]) col[k] = int(i);
  for (std::size_t k = 0; k < 7; ++k)
    require(col[k] >= 0, ErrorCode::InvalidInput, "results file lacks column '" + kResultColumns[k] + "'");
  std::vector<eval::ResultRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    require(f.size() == header.size(), ErrorCode::InvalidInput, "results line " + std::to_string(i + 1) +
                                                                    " has " + std::to_string(f.size()) + " fields");
    const auto get = [&](std::size_t k) -> std::string { return col[k] >= 0 ? f[std::size_t(col[k])] : "0"; };
    eval::ResultRow r;
    r.dataset = get(0);
    r.subject = int(parse_number(get(1)));
    r.session = get(2);
    r.pipeline = get(3);
    r.fold = int(parse_number(get(4)));
    r.metric = get(5);
    r.score = parse_number(get(6));
    r.n_train = std::size_t(parse_number(get(7)));
    r.n_test = std::size_t(parse_number(get(8)));
    r.fit_time_s = parse_number(get(9));
    r.predict_time_s = parse_number(get(10));
    r.energy_wh = parse_number(get(11));
    r.co2_g = parse_number(get(12));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace eegbench::bench
