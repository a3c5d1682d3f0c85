#include "softpred/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "softpred/clustering.hpp"
#include "softpred/errors.hpp"
#include "softpred/regression.hpp"
#include "softpred/rng.hpp"
#include "softpred/swp.hpp"

namespace softpred {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// child-stream tags for per-trial seed derivation
constexpr std::uint64_t kSplitTag = 1;
constexpr std::uint64_t kLabelTag = 2;
constexpr std::uint64_t kMaskTag = 3;
constexpr std::uint64_t kKmeansTag = 4;

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Ols: return "ols";
    case Method::Lasso: return "lasso";
    case Method::Knn: return "knn";
    case Method::ClusterPredict: return "cluster_predict";
    case Method::Swp: return "swp";
    case Method::MissingSwp: return "missing_swp";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "ols") return Method::Ols;
  if (name == "lasso") return Method::Lasso;
  if (name == "knn") return Method::Knn;
  if (name == "cluster_predict") return Method::ClusterPredict;
  if (name == "swp") return Method::Swp;
  if (name == "missing_swp") return Method::MissingSwp;
  throw ValidationError("unknown method '" + name + "'");
}

std::string grid_param_name(GridParam p) {
  switch (p) {
    case GridParam::W: return "w";
    case GridParam::Lambda: return "lambda";
    case GridParam::K: return "k";
    case GridParam::MRate: return "m_rate";
    case GridParam::WCluster: return "w_cluster";
  }
  return "?";
}

GridParam grid_param_from_name(const std::string& name) {
  if (name == "w") return GridParam::W;
  if (name == "lambda") return GridParam::Lambda;
  if (name == "k") return GridParam::K;
  if (name == "m_rate") return GridParam::MRate;
  if (name == "w_cluster") return GridParam::WCluster;
  throw ValidationError("unknown grid parameter '" + name + "'");
}

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "plotdata") return ReportFormat::PlotData;
  throw ValidationError("unknown report format '" + name + "'");
}

int ExperimentSpec::resolved_cluster_k() const {
  if (defaults.cluster_k) return *defaults.cluster_k;
  if (synth) return synth->k_true;
  return 2;
}

// ---------------------------------------------------------------------------
// config document

namespace {

SynthSpec parse_synth(const json& j) {
  SynthSpec s;
  s.train_rows = j.value("train_rows", s.train_rows);
  s.test_rows = j.value("test_rows", s.test_rows);
  s.features = j.value("features", s.features);
  s.k_true = j.value("k_true", s.k_true);
  s.beta_per_cluster = j.value("beta_per_cluster", s.beta_per_cluster);
  s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
  if (j.contains("mu_range")) {
    s.mu_range = {j["mu_range"].at(0).get<double>(), j["mu_range"].at(1).get<double>()};
  }
  if (j.contains("sigma_range")) {
    s.sigma_range = {j["sigma_range"].at(0).get<double>(), j["sigma_range"].at(1).get<double>()};
  }
  s.cluster_shift = j.value("cluster_shift", s.cluster_shift);
  return s;
}

json synth_to_json(const SynthSpec& s) {
  return json{{"type", "synthetic"},
              {"train_rows", s.train_rows},
              {"test_rows", s.test_rows},
              {"features", s.features},
              {"k_true", s.k_true},
              {"beta_per_cluster", s.beta_per_cluster},
              {"noise_sigma", s.noise_sigma},
              {"mu_range", {s.mu_range.lo, s.mu_range.hi}},
              {"sigma_range", {s.sigma_range.lo, s.sigma_range.hi}},
              {"cluster_shift", s.cluster_shift}};
}

}  // namespace

ExperimentSpec parse_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config parse error: ") + e.what());
  }

  ExperimentSpec spec;
  try {
    if (!j.contains("data")) throw ValidationError("config needs a 'data' block");
    const json& data = j["data"];
    const std::string type = data.value("type", "synthetic");
    if (type == "synthetic") {
      spec.synth = parse_synth(data);
    } else if (type == "csv") {
      CsvSource src;
      src.path = data.at("path").get<std::string>();
      src.response_col = data.value("response_col", -1);
      src.test_fraction = data.value("test_fraction", 0.25);
      src.csv.missing_token = data.value("missing_token", std::string("NA"));
      src.csv.has_header = data.value("header", false);
      spec.csv = src;
    } else {
      throw ValidationError("data.type must be 'synthetic' or 'csv'");
    }

    if (j.contains("mask")) {
      MaskSpec m;
      m.m_rate = j["mask"].value("m_rate", 0.0);
      m.noise_flip_rate = j["mask"].value("noise_flip_rate", 0.02);
      spec.mask = m;
    }

    if (j.contains("methods")) {
      if (!j["methods"].is_array() || j["methods"].empty()) {
        throw ValidationError("'methods' must be a non-empty list");
      }
      for (const auto& name : j["methods"]) {
        spec.methods.push_back(method_from_name(name.get<std::string>()));
      }
    }

    if (j.contains("grid")) {
      spec.grid_param = grid_param_from_name(j["grid"].value("param", std::string("w")));
      for (const auto& v : j["grid"].at("values")) spec.grid.push_back(v.get<double>());
    }

    spec.trials = j.value("trials", 1);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.out_dir = j.value("out", std::string("results"));
    if (spec.synth) spec.synth->seed = spec.seed;

    if (j.contains("defaults")) {
      const json& d = j["defaults"];
      AlgoDefaults& a = spec.defaults;
      a.epsilon = d.value("epsilon", a.epsilon);
      a.allow_pseudo_inverse = d.value("allow_pseudo_inverse", a.allow_pseudo_inverse);
      a.swp_w = d.value("swp_w", a.swp_w);
      a.lasso_lambda = d.value("lasso_lambda", a.lasso_lambda);
      a.lasso_tol = d.value("lasso_tol", a.lasso_tol);
      a.lasso_max_iter = d.value("lasso_max_iter", a.lasso_max_iter);
      a.knn_k = d.value("knn_k", a.knn_k);
      if (d.contains("cluster_k")) a.cluster_k = d["cluster_k"].get<int>();
      a.kmeans_replicates = d.value("kmeans_replicates", a.kmeans_replicates);
      a.kmeans_max_iter = d.value("kmeans_max_iter", a.kmeans_max_iter);
      a.kmeans_tol = d.value("kmeans_tol", a.kmeans_tol);
      if (d.contains("penalty_scale") && !d["penalty_scale"].is_null()) {
        a.penalty_scale = d["penalty_scale"].get<double>();
      }
      a.w_cluster = d.value("w_cluster", a.w_cluster);
      a.paper_literal = d.value("paper_literal", a.paper_literal);
      if (d.contains("completion")) {
        const std::string c = d["completion"].get<std::string>();
        if (c == "mean") {
          a.completion = Completion::Mean;
        } else if (c == "soft_impute") {
          a.completion = Completion::SoftImpute;
        } else {
          throw ValidationError("completion must be 'mean' or 'soft_impute'");
        }
      }
      if (d.contains("soft_impute")) {
        const json& si = d["soft_impute"];
        a.soft_impute.lambda = si.value("lambda", a.soft_impute.lambda);
        a.soft_impute.tol = si.value("tol", a.soft_impute.tol);
        a.soft_impute.max_iter = si.value("max_iter", a.soft_impute.max_iter);
        if (si.contains("rank_cap") && !si["rank_cap"].is_null()) {
          a.soft_impute.rank_cap = si["rank_cap"].get<int>();
        }
      }
      a.silhouette_on_imputed = d.value("silhouette_on_imputed", a.silhouette_on_imputed);
    }

    if (spec.trials < 1) throw ValidationError("trials must be at least 1");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what());
  }
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string spec_to_json(const ExperimentSpec& spec) {
  json j;
  if (spec.synth) {
    j["data"] = synth_to_json(*spec.synth);
  } else if (spec.csv) {
    j["data"] = json{{"type", "csv"},
                     {"path", spec.csv->path},
                     {"response_col", spec.csv->response_col},
                     {"test_fraction", spec.csv->test_fraction},
                     {"missing_token", spec.csv->csv.missing_token},
                     {"header", spec.csv->csv.has_header}};
  }
  if (spec.mask) {
    j["mask"] = json{{"m_rate", spec.mask->m_rate},
                     {"noise_flip_rate", spec.mask->noise_flip_rate}};
  }
  json methods = json::array();
  for (Method m : spec.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["grid"] = json{{"param", grid_param_name(spec.grid_param)}, {"values", spec.grid}};
  j["trials"] = spec.trials;
  j["seed"] = spec.seed;
  j["out"] = spec.out_dir;

  const AlgoDefaults& a = spec.defaults;
  json d{{"epsilon", a.epsilon},
         {"allow_pseudo_inverse", a.allow_pseudo_inverse},
         {"swp_w", a.swp_w},
         {"lasso_lambda", a.lasso_lambda},
         {"lasso_tol", a.lasso_tol},
         {"lasso_max_iter", a.lasso_max_iter},
         {"knn_k", a.knn_k},
         {"cluster_k", a.cluster_k ? json(*a.cluster_k) : json(nullptr)},
         {"kmeans_replicates", a.kmeans_replicates},
         {"kmeans_max_iter", a.kmeans_max_iter},
         {"kmeans_tol", a.kmeans_tol},
         {"penalty_scale", a.penalty_scale ? json(*a.penalty_scale) : json(nullptr)},
         {"w_cluster", a.w_cluster},
         {"paper_literal", a.paper_literal},
         {"completion", a.completion == Completion::Mean ? "mean" : "soft_impute"},
         {"soft_impute",
          json{{"lambda", a.soft_impute.lambda},
               {"tol", a.soft_impute.tol},
               {"max_iter", a.soft_impute.max_iter},
               {"rank_cap", a.soft_impute.rank_cap ? json(*a.soft_impute.rank_cap) : json(nullptr)}}},
         {"silhouette_on_imputed", a.silhouette_on_imputed}};
  j["defaults"] = d;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// sweep execution

namespace {

struct TrialBase {
  Dataset ds;               // x_train complete (synthetic) or as loaded (csv)
  std::vector<int> labels;  // latent clusters / kmeans labels, for masking
  bool labels_ready = false;
};

KmeansConfig make_kmeans_cfg(const ExperimentSpec& spec, int k, std::uint64_t seed) {
  KmeansConfig c;
  c.k = k;
  c.replicates = spec.defaults.kmeans_replicates;
  c.max_iter = spec.defaults.kmeans_max_iter;
  c.seed = seed;
  c.tol = spec.defaults.kmeans_tol;
  return c;
}

MissingScopConfig make_missing_scop_cfg(const ExperimentSpec& spec, int k, double w_cluster,
                                        std::uint64_t seed) {
  MissingScopConfig c;
  c.scop.base = make_kmeans_cfg(spec, k, seed);
  c.scop.penalty_scale = spec.defaults.penalty_scale;
  c.w = w_cluster;
  c.paper_literal = spec.defaults.paper_literal;
  return c;
}

class DataFactory {
 public:
  explicit DataFactory(const ExperimentSpec& spec) : spec_(spec) {
    if (spec_.csv) raw_ = load_csv(spec_.csv->path, spec_.csv->csv);
  }

  TrialBase base(std::uint64_t trial_seed) const {
    TrialBase out;
    if (spec_.synth) {
      SynthSpec s = *spec_.synth;
      s.seed = trial_seed;
      SynthData d = gen_linear(s);
      out.ds = std::move(d.dataset);
      out.labels = std::move(d.train_clusters);
      out.labels_ready = true;
    } else {
      Index rc = spec_.csv->response_col;
      if (rc < 0) rc = raw_->cols() - 1;
      out.ds = split(*raw_, rc, spec_.csv->test_fraction, derive_seed(trial_seed, kSplitTag));
    }
    return out;
  }

  const MaskedMatrix& raw() const { return *raw_; }

 private:
  const ExperimentSpec& spec_;
  std::optional<MaskedMatrix> raw_;
};

void ensure_labels(TrialBase& base, const ExperimentSpec& spec, std::uint64_t trial_seed) {
  if (base.labels_ready) return;
  const Matrix completed = mean_impute(base.ds.x_train);
  Clustering c = kmeans(completed, make_kmeans_cfg(spec, spec.resolved_cluster_k(),
                                                   derive_seed(trial_seed, kLabelTag)));
  base.labels = std::move(c.idx);
  base.labels_ready = true;
}

Matrix complete_train(const MaskedMatrix& x, const AlgoDefaults& defaults) {
  if (defaults.completion == Completion::SoftImpute) {
    return soft_impute(x, defaults.soft_impute).completed;
  }
  return mean_impute(x);
}

Vector run_method(Method m, const Dataset& ds_fit, const Dataset& ds_masked, GridParam gp,
                  double g, const ExperimentSpec& spec, std::uint64_t trial_seed) {
  const AlgoDefaults& d = spec.defaults;
  LeastSquaresOptions solve{d.allow_pseudo_inverse};
  switch (m) {
    case Method::Ols:
      return predict(ols_fit(ds_fit.x_train.data, ds_fit.y_train, solve), ds_fit.x_test.data);
    case Method::Lasso: {
      const double lam = gp == GridParam::Lambda ? g : d.lasso_lambda;
      return predict(lasso_fit(ds_fit.x_train.data, ds_fit.y_train, lam, d.lasso_tol,
                               d.lasso_max_iter),
                     ds_fit.x_test.data);
    }
    case Method::Knn: {
      const int k = gp == GridParam::K ? static_cast<int>(g) : d.knn_k;
      return knn_predict(ds_fit, k);
    }
    case Method::ClusterPredict: {
      const int k = gp == GridParam::K ? static_cast<int>(g) : spec.resolved_cluster_k();
      const Clustering c =
          kmeans(ds_fit.x_train.data, make_kmeans_cfg(spec, k, derive_seed(trial_seed, kKmeansTag)));
      return cluster_predict(ds_fit, c, solve);
    }
    case Method::Swp: {
      SwpConfig cfg;
      cfg.w = gp == GridParam::W ? g : d.swp_w;
      cfg.epsilon = d.epsilon;
      cfg.solve = solve;
      return swp_predict(ds_fit, cfg);
    }
    case Method::MissingSwp: {
      const int k = gp == GridParam::K ? static_cast<int>(g) : spec.resolved_cluster_k();
      const double w_cluster = gp == GridParam::WCluster ? g : d.w_cluster;
      MissingSwpConfig cfg;
      cfg.cluster = make_missing_scop_cfg(spec, k, w_cluster, derive_seed(trial_seed, kKmeansTag));
      cfg.w = gp == GridParam::W ? g : d.swp_w;
      cfg.completion = d.completion;
      cfg.soft_impute = d.soft_impute;
      cfg.epsilon = d.epsilon;
      cfg.solve = solve;
      return missing_swp_predict(ds_masked, cfg);
    }
  }
  throw ValidationError("unhandled method");
}

double mse_of(const Vector& pred, const Vector& truth) {
  return (pred - truth).squaredNorm() / static_cast<double>(truth.size());
}

}  // namespace

ExperimentResult run_sweep(const ExperimentSpec& spec) {
  if (!spec.synth && !spec.csv) throw ValidationError("no data source configured");
  if (spec.methods.empty()) throw ValidationError("'methods' must be a non-empty list");
  if (spec.grid.empty()) throw ValidationError("sweep grid must be non-empty");

  fs::create_directories(spec.out_dir);

  ExperimentResult res;
  res.spec_json = spec_to_json(spec);
  DataFactory factory(spec);
  const bool want_mask = spec.mask.has_value() || spec.grid_param == GridParam::MRate;
  const double base_flip = spec.mask ? spec.mask->noise_flip_rate : MaskSpec{}.noise_flip_rate;

  for (int t = 0; t < spec.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(t));
    TrialBase base = factory.base(trial_seed);
    if (want_mask) ensure_labels(base, spec, trial_seed);

    auto materialize = [&](double rate) {
      Dataset ds = base.ds;
      if (want_mask) {
        MaskSpec ms;
        ms.m_rate = rate;
        ms.noise_flip_rate = base_flip;
        ms.seed = derive_seed(trial_seed, kMaskTag);
        ds.x_train.mask = gen_cluster_mask(base.labels, ds.x_train.cols(), ms);
      }
      Dataset ds_fit = ds;
      if (!ds.x_train.is_fully_observed()) {
        ds_fit.x_train = MaskedMatrix::fully_observed(complete_train(ds.x_train, spec.defaults));
      }
      return std::pair<Dataset, Dataset>(std::move(ds), std::move(ds_fit));
    };

    std::optional<std::pair<Dataset, Dataset>> shared;
    if (spec.grid_param != GridParam::MRate) {
      shared = materialize(spec.mask ? spec.mask->m_rate : 0.0);
    }

    for (double g : spec.grid) {
      if (spec.grid_param == GridParam::MRate) shared = materialize(g);
      const auto& [ds, ds_fit] = *shared;
      for (Method m : spec.methods) {
        MetricRecord rec;
        rec.kind = "sweep";
        rec.method = method_name(m);
        rec.grid_param = grid_param_name(spec.grid_param);
        rec.grid_value = g;
        rec.trial = t;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const Vector pred = run_method(m, ds_fit, ds, spec.grid_param, g, spec, trial_seed);
          if (!ds.y_test) throw ValidationError("no test responses available for MSE");
          rec.mse = mse_of(pred, *ds.y_test);
          rec.status = "ok";
        } catch (const Error& e) {
          rec.status = "failed: " + sanitize(e.what());
          ++res.failures;
        }
        rec.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        res.records.push_back(std::move(rec));
      }
    }
  }

  write_result_json(res, (fs::path(spec.out_dir) / "result.json").string());
  emit_report(res, {ReportFormat::Csv}, spec.out_dir);
  return res;
}

ExperimentResult compare_clustering(const ExperimentSpec& spec) {
  if (!spec.synth && !spec.csv) throw ValidationError("no data source configured");
  if (!spec.mask) throw ValidationError("cluster-bench requires a 'mask' block");
  if (spec.trials < 1) throw ValidationError("trials must be at least 1");

  fs::create_directories(spec.out_dir);

  std::vector<double> w_grid = spec.grid;
  if (w_grid.empty()) {
    for (int i = 0; i <= 10; ++i) w_grid.push_back(0.1 * i);
  }
  const int k = spec.resolved_cluster_k();

  ExperimentResult res;
  res.spec_json = spec_to_json(spec);
  DataFactory factory(spec);

  for (int t = 0; t < spec.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(t));

    Matrix x;
    std::vector<int> labels;
    if (spec.synth) {
      SynthSpec s = *spec.synth;
      s.seed = trial_seed;
      SynthData d = gen_linear(s);
      x = std::move(d.dataset.x_train.data);
      labels = std::move(d.train_clusters);
    } else {
      const MaskedMatrix& raw = factory.raw();
      if (!raw.is_fully_observed()) {
        throw ValidationError("cluster-bench needs a complete CSV as ground truth");
      }
      x = raw.data;
      labels = kmeans(x, make_kmeans_cfg(spec, k, derive_seed(trial_seed, kLabelTag))).idx;
    }

    MaskSpec ms = *spec.mask;
    ms.seed = derive_seed(trial_seed, kMaskTag);
    const MaskedMatrix masked(x, gen_cluster_mask(labels, x.cols(), ms));
    const std::uint64_t km_seed = derive_seed(trial_seed, kKmeansTag);

    auto bench = [&](const std::string& name, auto&& run) {
      MetricRecord rec;
      rec.kind = "bench";
      rec.method = name;
      rec.trial = t;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        rec.silhouette = run();
        rec.status = "ok";
      } catch (const Error& e) {
        rec.status = "failed: " + sanitize(e.what());
        ++res.failures;
      }
      rec.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      res.records.push_back(std::move(rec));
    };

    bench("impute", [&] {
      const SoftImputeResult si = soft_impute(masked, spec.defaults.soft_impute);
      const Clustering c = kmeans(si.completed, make_kmeans_cfg(spec, k, km_seed));
      return silhouette(spec.defaults.silhouette_on_imputed ? si.completed : x, c.idx).mean;
    });
    bench("non_impute", [&] {
      const Clustering c =
          missing_scop(masked, make_missing_scop_cfg(spec, k, spec.defaults.w_cluster, km_seed));
      if (spec.defaults.silhouette_on_imputed) {
        return silhouette(mean_impute(masked), c.idx).mean;
      }
      return silhouette(x, c.idx).mean;
    });
    bench("no_missing", [&] {
      const Clustering c = kmeans(x, make_kmeans_cfg(spec, k, km_seed));
      return silhouette(x, c.idx).mean;
    });

    for (double w : w_grid) {
      MetricRecord rec;
      rec.kind = "curve";
      rec.method = "missing_scop";
      rec.grid_param = "w_cluster";
      rec.grid_value = w;
      rec.trial = t;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Clustering c = missing_scop(masked, make_missing_scop_cfg(spec, k, w, km_seed));
        rec.silhouette =
            silhouette(spec.defaults.silhouette_on_imputed ? mean_impute(masked) : x, c.idx).mean;
        rec.status = "ok";
      } catch (const Error& e) {
        rec.status = "failed: " + sanitize(e.what());
        ++res.failures;
      }
      rec.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      res.records.push_back(std::move(rec));
    }
  }

  write_result_json(res, (fs::path(spec.out_dir) / "result.json").string());
  emit_report(res, {ReportFormat::Csv}, spec.out_dir);
  return res;
}

// ---------------------------------------------------------------------------
// reports

namespace {

struct AggKey {
  std::string kind, method, grid_param;
  double grid_value;
  bool operator<(const AggKey& o) const {
    return std::tie(kind, method, grid_param, grid_value) <
           std::tie(o.kind, o.method, o.grid_param, o.grid_value);
  }
};

struct AggVal {
  std::vector<double> mse, sil;
  int ok = 0, failed = 0;
};

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::map<AggKey, AggVal> aggregate(const ExperimentResult& result) {
  std::map<AggKey, AggVal> agg;
  for (const auto& r : result.records) {
    AggVal& v = agg[AggKey{r.kind, r.method, r.grid_param, r.grid_value}];
    if (r.ok()) {
      ++v.ok;
      if (r.mse) v.mse.push_back(*r.mse);
      if (r.silhouette) v.sil.push_back(*r.silhouette);
    } else {
      ++v.failed;
    }
  }
  return agg;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

std::string opt_field(const std::optional<double>& v) { return v ? fmt_g17(*v) : ""; }

void emit_csv(const ExperimentResult& result, const fs::path& dir) {
  {
    auto out = open_out(dir / "records.csv");
    out << "kind,method,grid_param,grid_value,trial,status,mse,silhouette\n";
    for (const auto& r : result.records) {
      out << r.kind << ',' << r.method << ',' << r.grid_param << ',' << fmt_g17(r.grid_value)
          << ',' << r.trial << ',' << r.status << ',' << opt_field(r.mse) << ','
          << opt_field(r.silhouette) << '\n';
    }
  }
  {
    auto out = open_out(dir / "aggregates.csv");
    out << "kind,method,grid_param,grid_value,n_ok,n_failed,mean_mse,std_mse,mean_silhouette,"
           "std_silhouette\n";
    for (const auto& [key, val] : aggregate(result)) {
      out << key.kind << ',' << key.method << ',' << key.grid_param << ','
          << fmt_g17(key.grid_value) << ',' << val.ok << ',' << val.failed << ','
          << (val.mse.empty() ? "" : fmt_g17(mean_of(val.mse))) << ','
          << (val.mse.empty() ? "" : fmt_g17(std_of(val.mse))) << ','
          << (val.sil.empty() ? "" : fmt_g17(mean_of(val.sil))) << ','
          << (val.sil.empty() ? "" : fmt_g17(std_of(val.sil))) << '\n';
    }
  }
  {
    // wall-clock column kept out of the deterministic files
    auto out = open_out(dir / "timings.csv");
    out << "kind,method,grid_param,grid_value,trial,runtime_ms\n";
    for (const auto& r : result.records) {
      out << r.kind << ',' << r.method << ',' << r.grid_param << ',' << fmt_g17(r.grid_value)
          << ',' << r.trial << ',' << fmt_g17(r.runtime_ms) << '\n';
    }
  }
}

void emit_plotdata(const ExperimentResult& result, const fs::path& dir) {
  const auto agg = aggregate(result);
  // one file per (kind, method) pair that carries a grid
  std::map<std::pair<std::string, std::string>, std::vector<const AggKey*>> figures;
  for (const auto& [key, val] : agg) {
    if (key.kind == "sweep" || key.kind == "curve") {
      figures[{key.kind, key.method}].push_back(&key);
    }
  }
  for (const auto& [fig, keys] : figures) {
    const std::string metric = fig.first == "sweep" ? "mse" : "silhouette";
    const std::string param = keys.front()->grid_param;
    auto out = open_out(dir / ("plot_" + metric + "_vs_" + param + "__" + fig.second + ".csv"));
    out << param << ",mean_" << metric << ",std_" << metric << '\n';
    for (const AggKey* key : keys) {
      const AggVal& val = agg.at(*key);
      const auto& vals = fig.first == "sweep" ? val.mse : val.sil;
      out << fmt_g17(key->grid_value) << ',' << (vals.empty() ? "" : fmt_g17(mean_of(vals)))
          << ',' << (vals.empty() ? "" : fmt_g17(std_of(vals))) << '\n';
    }
  }
  // silhouette table for bench runs
  bool any_bench = false;
  for (const auto& entry : agg) {
    if (entry.first.kind == "bench") any_bench = true;
  }
  if (any_bench) {
    auto out = open_out(dir / "table_silhouette.csv");
    out << "algorithm,mean_silhouette,std_silhouette,n_ok,n_failed\n";
    for (const auto& [key, val] : agg) {
      if (key.kind != "bench") continue;
      out << key.method << ',' << (val.sil.empty() ? "" : fmt_g17(mean_of(val.sil))) << ','
          << (val.sil.empty() ? "" : fmt_g17(std_of(val.sil))) << ',' << val.ok << ','
          << val.failed << '\n';
    }
  }
}

json record_to_json(const MetricRecord& r) {
  json j{{"kind", r.kind},         {"method", r.method}, {"grid_param", r.grid_param},
         {"grid_value", r.grid_value}, {"trial", r.trial},   {"status", r.status}};
  if (r.mse) j["mse"] = *r.mse;
  if (r.silhouette) j["silhouette"] = *r.silhouette;
  return j;
}

}  // namespace

void emit_report(const ExperimentResult& result, const std::vector<ReportFormat>& formats,
                 const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir);
  }
  for (ReportFormat f : formats) {
    switch (f) {
      case ReportFormat::Csv:
        emit_csv(result, out_dir);
        break;
      case ReportFormat::Json:
        write_result_json(result, (fs::path(out_dir) / "result.json").string());
        break;
      case ReportFormat::PlotData:
        emit_plotdata(result, out_dir);
        break;
    }
  }
}

void write_result_json(const ExperimentResult& result, const std::string& path) {
  json j;
  j["spec"] = json::parse(result.spec_json);
  j["failures"] = result.failures;
  json records = json::array();
  for (const auto& r : result.records) records.push_back(record_to_json(r));
  j["records"] = records;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

ExperimentResult read_result_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  ExperimentResult res;
  res.spec_json = j.value("spec", json::object()).dump(2);
  res.failures = j.value("failures", 0);
  for (const auto& rj : j.value("records", json::array())) {
    MetricRecord r;
    r.kind = rj.value("kind", "");
    r.method = rj.value("method", "");
    r.grid_param = rj.value("grid_param", "");
    r.grid_value = rj.value("grid_value", 0.0);
    r.trial = rj.value("trial", 0);
    r.status = rj.value("status", "");
    if (rj.contains("mse")) r.mse = rj["mse"].get<double>();
    if (rj.contains("silhouette")) r.silhouette = rj["silhouette"].get<double>();
    res.records.push_back(std::move(r));
  }
  return res;
}

void generate_dataset(const SynthSpec& spec, const std::optional<MaskSpec>& mask,
                      const std::string& out_dir) {
  SynthData d = gen_linear(spec);
  if (mask) {
    MaskSpec ms = *mask;
    ms.seed = derive_seed(spec.seed, kMaskTag);
    d.dataset.x_train.mask =
        gen_cluster_mask(d.train_clusters, d.dataset.x_train.cols(), ms);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir);
  }

  auto write_side = [&](const MaskedMatrix& x, const Vector& y, const std::string& name) {
    const Index m = x.rows();
    const Index n = x.cols();
    Matrix data(m, n + 1);
    Mask msk(m, n + 1);
    data.leftCols(n) = x.data;
    data.col(n) = y;
    msk.leftCols(n) = x.mask;
    msk.col(n).setConstant(true);
    CsvOptions opts;
    opts.has_header = true;
    for (Index f = 0; f < n; ++f) opts.header.push_back("x" + std::to_string(f + 1));
    opts.header.push_back("y");
    save_csv((fs::path(out_dir) / name).string(), MaskedMatrix(data, msk), opts);
  };
  write_side(d.dataset.x_train, d.dataset.y_train, "train.csv");
  write_side(d.dataset.x_test, *d.dataset.y_test, "test.csv");

  json meta;
  meta["data"] = synth_to_json(spec);
  meta["data"]["seed"] = spec.seed;
  if (mask) {
    meta["mask"] = json{{"m_rate", mask->m_rate}, {"noise_flip_rate", mask->noise_flip_rate}};
  }
  meta["files"] = json{{"train", "train.csv"}, {"test", "test.csv"}};
  meta["response_col"] = spec.features;  // 0-based column of y
  auto out = open_out(fs::path(out_dir) / "meta.json");
  out << meta.dump(2) << '\n';
}

}  // namespace softpred
