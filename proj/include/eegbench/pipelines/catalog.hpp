#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eegbench/core/paradigm.hpp"
#include "eegbench/pipelines/model.hpp"

namespace eegbench::pipelines {

using Hyper = std::map<std::string, double>;

/// Ordered hyperparameter grid; the first key varies slowest.
using Grid = std::vector<std::pair<std::string, std::vector<double>>>;

struct CatalogEntry {
  std::string name;
  Paradigm paradigm;
  std::vector<std::string> keys;  // accepted hyperparameters
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"LogVar+LDA", Paradigm::MI, {}},
      {"LogVar+SVM", Paradigm::MI, {"svc_C"}},
      {"CSP+LDA", Paradigm::MI, {"csp_nfilter"}},
      {"CSP+SVM", Paradigm::MI, {"csp_nfilter", "svc_C"}},
      {"TRCSP+LDA", Paradigm::MI, {"csp_nfilter", "trcsp_alpha"}},
      {"DLCSPauto+shLDA", Paradigm::MI, {"csp_nfilter"}},
      {"FBCSP+SVM", Paradigm::MI, {"fbcsp_nfilter", "fbcsp_k", "svc_C"}},
      {"MDM", Paradigm::MI, {}},
      {"FgMDM", Paradigm::MI, {}},
      {"TS+LR", Paradigm::MI, {"logisticregression_C"}},
      {"TS+EL", Paradigm::MI, {"logisticregression_l1_ratio", "logisticregression_C"}},
      {"TS+SVM", Paradigm::MI, {"svc_C"}},
      {"ACM+TS+SVM", Paradigm::MI, {"augmenteddataset_order", "augmenteddataset_lag", "svc_C"}},
      {"XDAWN+LDA", Paradigm::ERP, {"xdawn_nfilter"}},
      {"XDAWNCov+MDM", Paradigm::ERP, {"xdawn_nfilter"}},
      {"XDAWNCov+TS+SVM", Paradigm::ERP, {"xdawn_nfilter", "svc_C"}},
      {"XDAWNCov+TS+LR", Paradigm::ERP, {"xdawn_nfilter", "logisticregression_C"}},
      {"ERPCov+MDM", Paradigm::ERP, {}},
      {"ERPCov(svd_n=4)+MDM", Paradigm::ERP, {"erpcov_svd_n"}},
      {"CCA", Paradigm::SSVEP, {"cca_harmonics"}},
      {"TRCA", Paradigm::SSVEP, {}},
      {"SSVEP MDM", Paradigm::SSVEP, {"ssvep_halfwidth"}},
      {"SSVEP TS+LR", Paradigm::SSVEP, {"ssvep_halfwidth", "logisticregression_C"}},
      {"SSVEP TS+SVM", Paradigm::SSVEP, {"ssvep_halfwidth", "svc_C"}},
  };
  return entries;
}

/// Catalog lookup key: case-insensitive, spaces and '-' ignored, so
/// "ts + el", "TS+EL" and "SSVEP-TS+LR" all resolve.
inline std::string normalize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == ' ' || c == '-') continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

inline const CatalogEntry& find_pipeline(std::string_view name) {
  const std::string key = normalize_name(name);
  for (const auto& e : catalog())
    if (normalize_name(e.name) == key) return e;
  fail(ErrorCode::NotFound, "unknown pipeline '" + std::string(name) + "'");
}

namespace detail {

inline std::vector<double> int_range(int lo, int hi) {
  std::vector<double> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

inline const std::vector<double> kSvcC = {0.5, 1.0, 1.5};

}  // namespace detail

/// Default search grid of a pipeline; empty when the pipeline is not tuned.
/// ACM order/lag shrink to 1–5 above 60 channels and 1–3 above 100.
inline Grid default_grid(std::string_view name, Eigen::Index n_channels) {
  const std::string& n = find_pipeline(name).name;
  if (n == "CSP+SVM") return {{"csp_nfilter", detail::int_range(2, 8)}, {"svc_C", detail::kSvcC}};
  if (n == "TS+EL") return {{"logisticregression_l1_ratio", {0.20, 0.30, 0.45, 0.65, 0.75}}};
  if (n == "LogVar+SVM") return {{"svc_C", {0.01, 0.05, 0.1, 0.5, 1, 5, 10, 50, 100}}};
  if (n == "TS+SVM" || n == "XDAWNCov+TS+SVM" || n == "SSVEP TS+SVM") return {{"svc_C", detail::kSvcC}};
  if (n == "ACM+TS+SVM") {
    const int top = n_channels > 100 ? 3 : n_channels > 60 ? 5 : 10;
    return {{"augmenteddataset_order", detail::int_range(1, top)},
            {"augmenteddataset_lag", detail::int_range(1, top)},
            {"svc_C", detail::kSvcC}};
  }
  return {};
}

/// Cartesian product of a grid, first key slowest.
inline std::vector<Hyper> expand_grid(const Grid& grid) {
  std::vector<Hyper> out{Hyper{}};
  for (const auto& [key, values] : grid) {
    require(!values.empty(), ErrorCode::InvalidHyper, "grid entry '" + key + "' has no values");
    std::vector<Hyper> next;
    for (const auto& h : out)
      for (double v : values) {
        Hyper g = h;
        g[key] = v;
        next.push_back(std::move(g));
      }
    out = std::move(next);
  }
  return out;
}

/// Reads hyperparameters with validation. Defaults that depend on the data
/// (filter counts) are capped by the channel count; explicit values are not.
class HyperReader {
 public:
  HyperReader(const CatalogEntry& entry, const Hyper& h) : h_(h) {
    for (const auto& [key, value] : h) {
      if (key == "svc_kernel")
        fail(ErrorCode::InvalidHyper, "only the linear kernel is supported; drop svc_kernel");
      require(std::find(entry.keys.begin(), entry.keys.end(), key) != entry.keys.end(), ErrorCode::InvalidHyper,
              "pipeline '" + entry.name + "' has no hyperparameter '" + key + "'");
      require(std::isfinite(value), ErrorCode::InvalidHyper, "hyperparameter '" + key + "' is not finite");
    }
  }

  double real(const std::string& key, double fallback) const {
    const auto it = h_.find(key);
    return it == h_.end() ? fallback : it->second;
  }

  int integer(const std::string& key, int fallback) const {
    const auto it = h_.find(key);
    if (it == h_.end()) return fallback;
    require(it->second == std::round(it->second), ErrorCode::InvalidHyper,
            "hyperparameter '" + key + "' must be an integer");
    return int(it->second);
  }

  bool has(const std::string& key) const { return h_.count(key) > 0; }

 private:
  const Hyper& h_;
};

/// Catalog factory. The returned model is untrained; Model::fit trains it.
/// `n_channels` is only used to cap data-dependent defaults.
inline std::unique_ptr<Model> make_model(std::string_view name, const Hyper& hyper, Eigen::Index n_channels) {
  const CatalogEntry& entry = find_pipeline(name);
  const HyperReader h(entry, hyper);
  const std::string& n = entry.name;
  const auto capped = [&](const std::string& key, int fallback) -> Eigen::Index {
    return h.integer(key, int(std::min<Eigen::Index>(fallback, n_channels)));
  };
  const auto svm = [&]() -> BinaryFactory {
    MarginOptions o;
    o.c = h.real("svc_C", 1.0);
    require(o.c > 0, ErrorCode::InvalidHyper, "svc_C must be positive");
    return [o] { return std::make_unique<LinearMargin>(o); };
  };
  const auto logistic = [&](double default_l1) -> BinaryFactory {
    const double l1 = h.real("logisticregression_l1_ratio", default_l1);
    const double c = h.real("logisticregression_C", 1.0);
    ElasticNetLogistic probe(l1, c);  // validates
    return [l1, c] { return std::make_unique<ElasticNetLogistic>(l1, c); };
  };
  const auto lda = [](bool shrink) -> BinaryFactory { return [shrink] { return std::make_unique<Lda>(shrink); }; };
  const auto tangent = [](std::unique_ptr<CovFeatures> cov) {
    return std::make_unique<TangentFeatures>(std::move(cov));
  };
  using dsp::CovEstimator;

  if (n == "LogVar+LDA") return std::make_unique<VecModel>(std::make_unique<LogVarFeatures>(), lda(false));
  if (n == "LogVar+SVM") return std::make_unique<VecModel>(std::make_unique<LogVarFeatures>(), svm());
  if (n == "CSP+LDA")
    return std::make_unique<VecModel>(std::make_unique<CspFeatures>(capped("csp_nfilter", 6), CovEstimator::Scm),
                                      lda(false));
  if (n == "CSP+SVM")
    return std::make_unique<VecModel>(std::make_unique<CspFeatures>(capped("csp_nfilter", 6), CovEstimator::Scm),
                                      svm());
  if (n == "TRCSP+LDA") {
    const double alpha = h.real("trcsp_alpha", 0.1);
    require(alpha >= 0, ErrorCode::InvalidHyper, "trcsp_alpha must be >= 0");
    return std::make_unique<VecModel>(
        std::make_unique<CspFeatures>(capped("csp_nfilter", 6), CovEstimator::Scm, CspKind::Tikhonov, alpha),
        lda(false));
  }
  if (n == "DLCSPauto+shLDA")
    return std::make_unique<VecModel>(
        std::make_unique<CspFeatures>(capped("csp_nfilter", 6), CovEstimator::Shrunk), lda(true));
  if (n == "FBCSP+SVM") {
    std::optional<Eigen::Index> k;
    if (h.has("fbcsp_k")) k = h.integer("fbcsp_k", 0);
    auto features = std::make_unique<FbcspFeatures>(default_filter_bank(), capped("fbcsp_nfilter", 4), k);
    return std::make_unique<VecModel>(std::move(features), svm());
  }
  if (n == "MDM") return std::make_unique<CovModel>(std::make_unique<PlainCov>(), false);
  if (n == "FgMDM") return std::make_unique<CovModel>(std::make_unique<PlainCov>(), true);
  if (n == "TS+LR") return std::make_unique<VecModel>(tangent(std::make_unique<PlainCov>()), logistic(0.0));
  if (n == "TS+EL") return std::make_unique<VecModel>(tangent(std::make_unique<PlainCov>()), logistic(0.7));
  if (n == "TS+SVM") return std::make_unique<VecModel>(tangent(std::make_unique<PlainCov>()), svm());
  if (n == "ACM+TS+SVM")
    return std::make_unique<VecModel>(
        tangent(std::make_unique<AugmentedCov>(h.integer("augmenteddataset_order", 3),
                                               h.integer("augmenteddataset_lag", 2))),
        svm());
  if (n == "XDAWN+LDA")
    return std::make_unique<VecModel>(std::make_unique<XdawnFeatures>(capped("xdawn_nfilter", 4)), lda(true));
  if (n == "XDAWNCov+MDM")
    return std::make_unique<CovModel>(std::make_unique<XdawnCov>(capped("xdawn_nfilter", 4)), false);
  if (n == "XDAWNCov+TS+SVM")
    return std::make_unique<VecModel>(tangent(std::make_unique<XdawnCov>(capped("xdawn_nfilter", 4))), svm());
  if (n == "XDAWNCov+TS+LR")
    return std::make_unique<VecModel>(tangent(std::make_unique<XdawnCov>(capped("xdawn_nfilter", 4))),
                                      logistic(0.0));
  if (n == "ERPCov+MDM") return std::make_unique<CovModel>(std::make_unique<ErpCov>(), false);
  if (n == "ERPCov(svd_n=4)+MDM")
    return std::make_unique<CovModel>(std::make_unique<ErpCov>(int(capped("erpcov_svd_n", 4))), false);
  if (n == "CCA") return std::make_unique<CcaModel>(h.integer("cca_harmonics", 3));
  if (n == "TRCA") return std::make_unique<TrcaModel>();
  const double halfwidth = h.real("ssvep_halfwidth", 0.5);
  if (n == "SSVEP MDM") return std::make_unique<CovModel>(std::make_unique<SsvepCov>(halfwidth), false);
  if (n == "SSVEP TS+LR")
    return std::make_unique<VecModel>(tangent(std::make_unique<SsvepCov>(halfwidth)), logistic(0.0));
  if (n == "SSVEP TS+SVM") return std::make_unique<VecModel>(tangent(std::make_unique<SsvepCov>(halfwidth)), svm());
  fail(ErrorCode::NotFound, "pipeline '" + n + "' has no factory");
}

/// Builds and trains a catalog pipeline.
inline std::unique_ptr<Model> fit(std::string_view name, const dsp::Epochs& train, const Hyper& hyper,
                                  std::uint64_t seed) {
  auto model = make_model(name, hyper, train.channels());
  model->fit(train, seed);
  return model;
}

}  // namespace eegbench::pipelines
