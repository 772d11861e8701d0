#pragma once

#include <string>

#include "eegbench/eval/evaluate.hpp"
#include "eegbench/synth/synthgen.hpp"

namespace eegbench::eval {

/// Epochs every generated session under the dataset id `id`.
inline EvalDataset from_synth(const synth::SynthDataset& d, const std::string& id) {
  EvalDataset out{id, {}};
  for (const auto& s : d.sessions)
    out.sessions.push_back({s.subject, std::to_string(s.session), synth::session_epochs(d, s)});
  return out;
}

}  // namespace eegbench::eval
