#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fcnet/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string pair = "SYNTH_A:SYNTH_B";
  fcnet::CliOverrides overrides;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool needs_pair) {
  cmd->add_option("--config", args->config_path, "pipeline config INI")
      ->required();
  if (needs_pair) {
    cmd->add_option("--pair", args->pair, "group pair as A:B");
  }
  auto opt = [&](const char* name, auto& slot, const char* help) {
    using T = typename std::decay_t<decltype(slot)>::value_type;
    cmd->add_option_function<T>(
        name, [&slot](const T& v) { slot = v; }, help);
  };
  opt("--seed", args->overrides.seed, "master seed override");
  opt("--method", args->overrides.method,
      "fcn method: pearson|fisher|pca|tsne|umap");
  opt("--out", args->overrides.out, "output directory override");
  opt("--k", args->overrides.k, "rois kept per group");
  opt("--tau", args->overrides.tau, "correlation threshold");
  opt("--jobs", args->overrides.jobs, "accepted; execution is sequential");
}

fcnet::PipelineConfig load_config(const CommonArgs& args) {
  fcnet::PipelineConfig config =
      fcnet::pipeline_config_from_ini(fcnet::load_ini(args.config_path));
  fcnet::apply_overrides(&config, args.overrides);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional connectivity pipeline"};
  app.require_subcommand(1);

  std::string synth_spec, synth_out = "fcnet_data";
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic cohort");
  synth->add_option("--spec", synth_spec, "cohort spec INI")->required();
  synth->add_option("--out", synth_out, "output directory");

  CommonArgs ingest_args, fcn_args, classify_args, select_args, lsirm_args,
      report_args;
  CLI::App* ingest =
      app.add_subcommand("ingest", "validate the cohort recordings");
  add_common(ingest, &ingest_args, false);
  CLI::App* fcn =
      app.add_subcommand("fcn", "build per-subject connectivity graphs");
  add_common(fcn, &fcn_args, false);
  CLI::App* classify =
      app.add_subcommand("classify", "cross-validated group classifier");
  add_common(classify, &classify_args, true);
  CLI::App* select =
      app.add_subcommand("select", "rank and select discriminative rois");
  add_common(select, &select_args, true);
  CLI::App* lsirm =
      app.add_subcommand("lsirm", "latent space posterior per group");
  add_common(lsirm, &lsirm_args, true);
  CLI::App* report =
      app.add_subcommand("report", "assemble the deterministic bundle");
  add_common(report, &report_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      return fcnet::cmd_synth(synth_spec, synth_out);
    }
    if (ingest->parsed()) {
      return fcnet::cmd_ingest(load_config(ingest_args));
    }
    if (fcn->parsed()) {
      return fcnet::cmd_fcn(load_config(fcn_args));
    }
    if (classify->parsed()) {
      return fcnet::cmd_classify(load_config(classify_args),
                                 fcnet::parse_pair(classify_args.pair));
    }
    if (select->parsed()) {
      return fcnet::cmd_select(load_config(select_args),
                               fcnet::parse_pair(select_args.pair));
    }
    if (lsirm->parsed()) {
      return fcnet::cmd_lsirm(load_config(lsirm_args),
                              fcnet::parse_pair(lsirm_args.pair));
    }
    if (report->parsed()) {
      return fcnet::cmd_report(load_config(report_args),
                               fcnet::parse_pair(report_args.pair));
    }
  } catch (const fcnet::FcnetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fcnet::kExitHardFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fcnet::kExitHardFailure;
  }
  return fcnet::kExitHardFailure;
}
