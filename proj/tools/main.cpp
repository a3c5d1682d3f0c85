#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "softpred/errors.hpp"
#include "softpred/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitPartialFailure = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool paper_literal = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON experiment config")->required();
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("--out", flags.out, "override the output directory");
  cmd->add_flag("--paper-literal", flags.paper_literal,
                "blend raw mask/distance scales in the constraint construction");
}

softpred::ExperimentSpec resolve(const CommonFlags& flags) {
  softpred::ExperimentSpec spec = softpred::load_spec(flags.config);
  if (flags.seed) {
    spec.seed = *flags.seed;
    if (spec.synth) spec.synth->seed = *flags.seed;
  }
  if (flags.out) spec.out_dir = *flags.out;
  if (flags.paper_literal) spec.defaults.paper_literal = true;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soft weighted prediction experiment harness"};
  app.require_subcommand(1);

  CommonFlags gen_flags, sweep_flags, bench_flags;
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset to CSV");
  add_common(gen, gen_flags);
  auto* sweep = app.add_subcommand("sweep", "run methods over a parameter grid");
  add_common(sweep, sweep_flags);
  auto* bench =
      app.add_subcommand("cluster-bench", "impute vs non-impute vs no-missing silhouettes");
  add_common(bench, bench_flags);

  std::string report_in, report_out = "results";
  std::vector<std::string> report_formats{"csv"};
  auto* report = app.add_subcommand("report", "re-emit a persisted result");
  report->add_option("--in", report_in, "result.json produced by sweep/cluster-bench")->required();
  report->add_option("--out", report_out, "output directory");
  report->add_option("--format", report_formats, "csv, json, plotdata")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const softpred::ExperimentSpec spec = resolve(gen_flags);
      if (!spec.synth) {
        throw softpred::ValidationError("generate needs a synthetic data block");
      }
      softpred::generate_dataset(*spec.synth, spec.mask, spec.out_dir);
      std::cout << "wrote " << spec.out_dir << "/{train.csv,test.csv,meta.json}\n";
      return kExitOk;
    }
    if (sweep->parsed()) {
      const softpred::ExperimentSpec spec = resolve(sweep_flags);
      const softpred::ExperimentResult res = softpred::run_sweep(spec);
      std::cout << res.records.size() << " records, " << res.failures << " failed cells -> "
                << spec.out_dir << '\n';
      return res.failures > 0 ? kExitPartialFailure : kExitOk;
    }
    if (bench->parsed()) {
      const softpred::ExperimentSpec spec = resolve(bench_flags);
      const softpred::ExperimentResult res = softpred::compare_clustering(spec);
      std::cout << res.records.size() << " records, " << res.failures << " failed cells -> "
                << spec.out_dir << '\n';
      return res.failures > 0 ? kExitPartialFailure : kExitOk;
    }
    if (report->parsed()) {
      std::vector<softpred::ReportFormat> formats;
      for (const auto& f : report_formats) {
        formats.push_back(softpred::report_format_from_name(f));
      }
      const softpred::ExperimentResult res = softpred::read_result_json(report_in);
      softpred::emit_report(res, formats, report_out);
      std::cout << "report written to " << report_out << '\n';
      return kExitOk;
    }
  } catch (const softpred::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const softpred::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const softpred::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
