#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "softpred/core.hpp"
#include "softpred/csv.hpp"
#include "softpred/datagen.hpp"
#include "softpred/imputation.hpp"
#include "softpred/missing_swp.hpp"

namespace softpred {

enum class Method { Ols, Lasso, Knn, ClusterPredict, Swp, MissingSwp };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Which parameter the sweep grid varies.
enum class GridParam { W, Lambda, K, MRate, WCluster };

std::string grid_param_name(GridParam p);
GridParam grid_param_from_name(const std::string& name);

struct CsvSource {
  std::string path;
  Index response_col = -1;  ///< -1 selects the last column
  double test_fraction = 0.25;
  CsvOptions csv;
};

/// Algorithm defaults, all overridable from the config document and echoed
/// into the result metadata.
struct AlgoDefaults {
  double epsilon = 1e-12;
  bool allow_pseudo_inverse = false;
  double swp_w = 6.0;
  double lasso_lambda = 0.1;
  double lasso_tol = 1e-10;
  int lasso_max_iter = 10000;
  int knn_k = 5;
  std::optional<int> cluster_k;  ///< defaults to k_true for synthetic data, else 2
  int kmeans_replicates = 5;
  int kmeans_max_iter = 100;
  double kmeans_tol = 1e-9;
  std::optional<double> penalty_scale;
  double w_cluster = 0.5;
  bool paper_literal = false;
  Completion completion = Completion::Mean;
  SoftImputeConfig soft_impute{0.5, 1e-5, 300, std::nullopt};
  bool silhouette_on_imputed = false;
};

struct ExperimentSpec {
  std::optional<SynthSpec> synth;  ///< exactly one of synth/csv
  std::optional<CsvSource> csv;
  std::optional<MaskSpec> mask;    ///< cluster-correlated mask applied per trial
  std::vector<Method> methods;
  GridParam grid_param = GridParam::W;
  std::vector<double> grid;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "results";
  AlgoDefaults defaults;

  int resolved_cluster_k() const;
};

ExperimentSpec parse_spec(const std::string& json_text);
ExperimentSpec load_spec(const std::string& path);
std::string spec_to_json(const ExperimentSpec& spec);

struct MetricRecord {
  std::string kind;        ///< "sweep" | "bench" | "curve"
  std::string method;
  std::string grid_param;  ///< empty for bench rows
  double grid_value = 0.0;
  int trial = 0;
  std::string status;      ///< "ok" or "failed: reason"
  std::optional<double> mse;
  std::optional<double> silhouette;
  double runtime_ms = 0.0;

  bool ok() const { return status == "ok"; }
};

struct ExperimentResult {
  std::string spec_json;  ///< resolved config, for provenance
  std::vector<MetricRecord> records;
  int failures = 0;
};

/// Per-trial data generation/loading, masking, and every method at every
/// grid point. Failures are recorded per cell; the sweep continues.
/// Results are written (records, aggregates, result.json) before return.
ExperimentResult run_sweep(const ExperimentSpec& spec);

/// Impute-vs-non-impute-vs-no-missing silhouette comparison plus the
/// silhouette-vs-w curve for the mask-constrained clustering.
ExperimentResult compare_clustering(const ExperimentSpec& spec);

enum class ReportFormat { Csv, Json, PlotData };

ReportFormat report_format_from_name(const std::string& name);

/// Aggregate tables / raw dumps. plotdata = one CSV per figure with
/// columns (grid value, mean metric, std). Runtimes go to a separate
/// timings file; every other emitted byte is deterministic for a fixed
/// spec and seed.
void emit_report(const ExperimentResult& result, const std::vector<ReportFormat>& formats,
                 const std::string& out_dir);

void write_result_json(const ExperimentResult& result, const std::string& path);
ExperimentResult read_result_json(const std::string& path);

/// `generate` verb: synthetic dataset (optionally masked) to train/test
/// CSVs plus a JSON sidecar recording the spec and seed.
void generate_dataset(const SynthSpec& spec, const std::optional<MaskSpec>& mask,
                      const std::string& out_dir);

}  // namespace softpred
