#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcnet/atlas.hpp"
#include "fcnet/attention.hpp"
#include "fcnet/common.hpp"
#include "fcnet/embedding.hpp"
#include "fcnet/fcn.hpp"
#include "fcnet/lsirm.hpp"

namespace fcnet {

// INI-style sections of key=value pairs; '#'/';' lines are comments.
using IniSections = std::map<std::string, std::map<std::string, std::string>>;

IniSections parse_ini(const std::string& text);
IniSections load_ini(const std::filesystem::path& path);

struct FcnStageConfig {
  FcnMethod method = FcnMethod::MAPPER_TSNE;
  double tau = 0.5;
  TsneParams tsne;
  UmapParams umap;
  MapperParams mapper;
  bool pca_allow_rank_deficient = false;
  std::uint64_t seed = 1;
};

struct FeatselConfig {
  int k = 29;
  double epsilon = 1e-10;
  bool symmetric_kld = true;
};

struct PipelineConfig {
  std::string dataset_manifest;  // cohort manifest path
  std::string atlas = "builtin";
  bool standardize = true;
  FcnStageConfig fcn;
  ModelConfig classifier;
  FeatselConfig featsel;
  SamplerConfig lsirm;
  std::string output_dir;
};

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<std::string> pair;
  std::optional<std::string> out;
  std::optional<int> k;
  std::optional<double> tau;
  std::optional<int> jobs;
};

PipelineConfig pipeline_config_from_ini(const IniSections& ini);
void apply_overrides(PipelineConfig* config, const CliOverrides& overrides);

// Canonical section.key=value serialization; its checksum is the run id.
std::string canonical_config(const PipelineConfig& config);
std::string run_id(const PipelineConfig& config);

struct CohortEntry {
  std::string subject_id;
  Group group = Group::SYNTH_A;
  std::string csv_path;  // relative to the cohort manifest's directory
};

std::vector<CohortEntry> load_cohort_manifest(
    const std::filesystem::path& path);

struct GroupPair {
  Group a = Group::SYNTH_A, b = Group::SYNTH_B;
  std::string dir_name() const {
    return group_name(a) + "_vs_" + group_name(b);
  }
};

GroupPair parse_pair(const std::string& text);

// Exit codes shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitHardFailure = 1;
constexpr int kExitPartialFailure = 2;

int cmd_synth(const std::filesystem::path& spec_file,
              const std::filesystem::path& out_dir);
int cmd_ingest(const PipelineConfig& config);
int cmd_fcn(const PipelineConfig& config);
int cmd_classify(const PipelineConfig& config, const GroupPair& pair);
int cmd_select(const PipelineConfig& config, const GroupPair& pair);
int cmd_lsirm(const PipelineConfig& config, const GroupPair& pair);
int cmd_report(const PipelineConfig& config, const GroupPair& pair);

}  // namespace fcnet
