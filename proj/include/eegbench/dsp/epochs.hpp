#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eegbench/core/error.hpp"

namespace eegbench::dsp {

struct Event {
  long sample = 0;
  std::string label;
};

/// Continuous multichannel recording (one run).
struct Recording {
  Eigen::MatrixXd data;  // channels × samples
  double sfreq = 0;
  std::vector<Event> events;

  void validate() const {
    require(sfreq > 0, ErrorCode::InvalidInput, "sampling rate must be positive");
    for (const auto& e : events)
      require(e.sample >= 0 && e.sample < data.cols(), ErrorCode::InvalidInput,
              "event sample index outside the recording");
  }
};

/// Trials cut around event onsets. Each trial is channels × samples.
struct Epochs {
  std::vector<Eigen::MatrixXd> data;
  std::vector<int> labels;
  double sfreq = 0;
  double tmin = 0;
  std::vector<std::string> class_names;  // indexed by label id, may be empty

  std::size_t size() const { return data.size(); }
  Eigen::Index channels() const { return data.empty() ? 0 : data.front().rows(); }
  Eigen::Index samples() const { return data.empty() ? 0 : data.front().cols(); }

  std::vector<int> classes() const {
    std::set<int> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
  }

  Epochs subset(const std::vector<std::size_t>& idx) const {
    Epochs out{{}, {}, sfreq, tmin, class_names};
    out.data.reserve(idx.size());
    for (std::size_t i : idx) {
      out.data.push_back(data.at(i));
      out.labels.push_back(labels.at(i));
    }
    return out;
  }

  void validate() const {
    require(labels.size() == data.size(), ErrorCode::DimensionMismatch,
            "labels and trials differ in length");
    require(!data.empty(), ErrorCode::EmptyEpochs, "no trials");
    for (const auto& d : data)
      require(d.rows() == channels() && d.cols() == samples(), ErrorCode::DimensionMismatch,
              "ragged trials");
  }
};

struct EpochResult {
  Epochs epochs;
  std::size_t dropped = 0;
};

/// One trial per mapped event covering [onset + tmin·sfreq, onset + tmax·sfreq).
/// Events whose window leaves the recording are dropped and counted; events
/// with labels absent from label_map are ignored.
inline EpochResult epoch(const Recording& rec, double tmin_s, double tmax_s,
                         const std::map<std::string, int>& label_map) {
  require(tmin_s < tmax_s, ErrorCode::InvalidInput, "tmin must be below tmax");
  rec.validate();
  const long offset = std::lround(tmin_s * rec.sfreq);
  const long length = std::lround(tmax_s * rec.sfreq) - offset;
  require(length > 0, ErrorCode::InvalidInput, "epoch window shorter than one sample");

  EpochResult out;
  out.epochs.sfreq = rec.sfreq;
  out.epochs.tmin = tmin_s;
  for (const auto& ev : rec.events) {
    const auto it = label_map.find(ev.label);
    if (it == label_map.end()) continue;
    const long start = ev.sample + offset;
    if (start < 0 || start + length > rec.data.cols()) {
      ++out.dropped;
      continue;
    }
    out.epochs.data.push_back(rec.data.middleCols(start, length));
    out.epochs.labels.push_back(it->second);
  }
  require(!out.epochs.data.empty(), ErrorCode::EmptyEpochs, "no usable events");

  int max_label = 0;
  for (const auto& [name, id] : label_map) max_label = std::max(max_label, id);
  out.epochs.class_names.assign(static_cast<std::size_t>(max_label) + 1, "");
  for (const auto& [name, id] : label_map)
    if (id >= 0) out.epochs.class_names[static_cast<std::size_t>(id)] = name;
  return out;
}

}  // namespace eegbench::dsp
