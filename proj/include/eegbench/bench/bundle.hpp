#pragma once

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "eegbench/core/error.hpp"
#include "eegbench/core/paradigm.hpp"
#include "eegbench/eval/evaluate.hpp"

namespace eegbench::bench {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline constexpr int kBundleVersion = 1;

/// On-disk trial container: meta.json plus data.bin holding little-endian
/// float32 samples in [trial][channel][sample] order.
struct Bundle {
  std::string dataset;
  Paradigm paradigm = Paradigm::MI;
  double sfreq = 0;
  double tmin = 0;
  std::vector<std::string> channels;
  std::vector<std::string> class_names;  // label id → name
  std::vector<int> labels;
  std::vector<int> subjects;
  std::vector<std::string> sessions;
  std::vector<Eigen::MatrixXd> data;      // channels × samples, float32-representable
};

namespace detail {

inline std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  return v;
}

inline Json read_json(const fs::path& p) {
  std::ifstream in(p);
  require(bool(in), ErrorCode::NotFound, "cannot open " + p.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorCode::CorruptBundle, p.string() + ": " + e.what());
  }
}

}  // namespace detail

/// Flattens evaluation sessions into one bundle.
inline Bundle to_bundle(const eval::EvalDataset& d, Paradigm paradigm) {
  require(!d.sessions.empty(), ErrorCode::EmptyEpochs, "dataset has no sessions");
  Bundle b;
  b.dataset = d.id;
  b.paradigm = paradigm;
  const auto& first = d.sessions.front().epochs;
  b.sfreq = first.sfreq;
  b.tmin = first.tmin;
  for (Eigen::Index c = 0; c < first.channels(); ++c) b.channels.push_back("ch" + std::to_string(c));
  for (const auto& s : d.sessions) {
    if (s.epochs.class_names.size() > b.class_names.size()) b.class_names = s.epochs.class_names;
    for (std::size_t i = 0; i < s.epochs.size(); ++i) {
      b.data.push_back(s.epochs.data[i]);
      b.labels.push_back(s.epochs.labels[i]);
      b.subjects.push_back(s.subject);
      b.sessions.push_back(s.session);
    }
  }
  for (std::size_t k = 0; k < b.class_names.size(); ++k)
    if (b.class_names[k].empty()) b.class_names[k] = std::to_string(k);
  return b;
}

/// Regroups trials by (subject, session) in order of first appearance.
inline eval::EvalDataset to_eval_dataset(const Bundle& b) {
  eval::EvalDataset d{b.dataset, {}};
  std::map<std::pair<int, std::string>, std::size_t> where;
  for (std::size_t i = 0; i < b.data.size(); ++i) {
    const auto key = std::make_pair(b.subjects[i], b.sessions[i]);
    auto it = where.find(key);
    if (it == where.end()) {
      it = where.emplace(key, d.sessions.size()).first;
      d.sessions.push_back({b.subjects[i], b.sessions[i], dsp::Epochs{{}, {}, b.sfreq, b.tmin, b.class_names}});
    }
    auto& e = d.sessions[it->second].epochs;
    e.data.push_back(b.data[i]);
    e.labels.push_back(b.labels[i]);
  }
  return d;
}

inline void save_bundle(const Bundle& b, const fs::path& dir) {
  const std::size_t n = b.data.size();
  require(b.labels.size() == n && b.subjects.size() == n && b.sessions.size() == n, ErrorCode::DimensionMismatch,
          "per-trial arrays differ in length");
  const auto channels = Eigen::Index(b.channels.size());
  const Eigen::Index samples = n ? b.data.front().cols() : 0;
  for (const auto& t : b.data)
    require(t.rows() == channels && t.cols() == samples, ErrorCode::DimensionMismatch, "ragged trials");
  fs::create_directories(dir);

  Json meta;
  meta["schema_version"] = kBundleVersion;
  meta["dataset"] = b.dataset;
  meta["paradigm"] = std::string(to_string(b.paradigm));
  meta["sfreq"] = b.sfreq;
  meta["tmin"] = b.tmin;
  meta["n_trials"] = n;
  meta["n_samples"] = samples;
  meta["channels"] = b.channels;
  meta["class_names"] = b.class_names;
  Json labels = Json::array();
  for (int l : b.labels) {
    require(l >= 0 && std::size_t(l) < b.class_names.size(), ErrorCode::InvalidInput, "label without a class name");
    labels.push_back(b.class_names[std::size_t(l)]);
  }
  meta["labels"] = labels;
  meta["subjects"] = b.subjects;
  meta["sessions"] = b.sessions;
  std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';

  std::ofstream out(dir / "data.bin", std::ios::binary);
  std::vector<std::uint32_t> buf(std::size_t(channels * samples));
  for (const auto& t : b.data) {
    std::size_t k = 0;
    for (Eigen::Index c = 0; c < channels; ++c)
      for (Eigen::Index s = 0; s < samples; ++s) {
        const float f = float(t(c, s));
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        buf[k++] = detail::to_le(u);
      }
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * 4));
  }
  require(bool(out), ErrorCode::InvalidInput, "failed writing " + (dir / "data.bin").string());
}

inline Bundle load_bundle(const fs::path& dir) {
  const Json meta = detail::read_json(dir / "meta.json");
  Bundle b;
  std::size_t n = 0;
  Eigen::Index samples = 0;
  try {
    const int version = meta.at("schema_version").get<int>();
    require(version == kBundleVersion, ErrorCode::UnsupportedVersion,
            "bundle schema_version " + std::to_string(version) + " (supported: " + std::to_string(kBundleVersion) + ")");
    b.dataset = meta.value("dataset", dir.filename().string());
    b.paradigm = parse_paradigm(meta.at("paradigm").get<std::string>());
    b.sfreq = meta.at("sfreq").get<double>();
    b.tmin = meta.value("tmin", 0.0);
    b.channels = meta.at("channels").get<std::vector<std::string>>();
    b.class_names = meta.at("class_names").get<std::vector<std::string>>();
    n = meta.at("n_trials").get<std::size_t>();
    samples = meta.at("n_samples").get<Eigen::Index>();
    const auto names = meta.at("labels").get<std::vector<std::string>>();
    require(names.size() == n, ErrorCode::CorruptBundle,
            "labels has " + std::to_string(names.size()) + " entries for " + std::to_string(n) + " trials");
    for (const auto& name : names) {
      const auto it = std::find(b.class_names.begin(), b.class_names.end(), name);
      require(it != b.class_names.end(), ErrorCode::CorruptBundle, "label '" + name + "' not in class_names");
      b.labels.push_back(int(it - b.class_names.begin()));
    }
    b.subjects = meta.contains("subjects") ? meta.at("subjects").get<std::vector<int>>() : std::vector<int>(n, 1);
    b.sessions = meta.contains("sessions") ? meta.at("sessions").get<std::vector<std::string>>()
                                           : std::vector<std::string>(n, "0");
  } catch (const Json::exception& e) {
    fail(ErrorCode::CorruptBundle, "meta.json: " + std::string(e.what()));
  }
  require(b.subjects.size() == n && b.sessions.size() == n, ErrorCode::CorruptBundle,
          "subjects/sessions length differs from n_trials");
  require(b.sfreq > 0 && samples > 0 && !b.channels.empty(), ErrorCode::CorruptBundle, "empty dimensions");

  const auto channels = Eigen::Index(b.channels.size());
  const std::uintmax_t expected = std::uintmax_t(n) * std::uintmax_t(channels) * std::uintmax_t(samples) * 4;
  const fs::path bin = dir / "data.bin";
  require(fs::exists(bin), ErrorCode::CorruptBundle, "missing data.bin");
  const auto actual = fs::file_size(bin);
  require(actual == expected, ErrorCode::CorruptBundle,
          "data.bin has " + std::to_string(actual) + " bytes, expected " + std::to_string(expected));
  std::ifstream in(bin, std::ios::binary);
  std::vector<std::uint32_t> buf(std::size_t(channels * samples));
  for (std::size_t i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * 4));
    require(bool(in), ErrorCode::CorruptBundle, "short read in data.bin");
    Eigen::MatrixXd t(channels, samples);
    std::size_t k = 0;
    for (Eigen::Index c = 0; c < channels; ++c)
      for (Eigen::Index s = 0; s < samples; ++s) {
        const std::uint32_t u = detail::to_le(buf[k++]);
        float f;
        std::memcpy(&f, &u, 4);
        t(c, s) = f;
      }
    b.data.push_back(std::move(t));
  }
  return b;
}

}  // namespace eegbench::bench
