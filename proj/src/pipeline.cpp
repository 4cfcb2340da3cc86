#include "fcnet/pipeline.hpp"

#include <charconv>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fcnet/featsel.hpp"
#include "fcnet/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fcnet {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& s) {
  long long v = 0;
  auto t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  require(ec == std::errc{} && ptr == t.data() + t.size(), ErrorCode::Config,
          "not an integer: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  require(ec == std::errc{} && ptr == t.data() + t.size(), ErrorCode::Config,
          "not an unsigned integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  auto t = trim(s);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  fail(ErrorCode::Config, "not a boolean: '" + s + "'");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t state = base ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
  return splitmix64(state);
}

// CLI vocabulary: short method names, distinct from the canonical tags.
FcnMethod parse_cli_method(const std::string& text) {
  std::string m = trim(text);
  if (m == "pearson") return FcnMethod::PEARSON;
  if (m == "fisher") return FcnMethod::FISHER_Z;
  if (m == "pca") return FcnMethod::MAPPER_PCA;
  if (m == "tsne") return FcnMethod::MAPPER_TSNE;
  if (m == "umap") return FcnMethod::MAPPER_UMAP;
  fail(ErrorCode::Config, "unknown fcn method: " + m);
}

}  // namespace

IniSections parse_ini(const std::string& text) {
  IniSections out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      require(t.back() == ']' && t.size() > 2, ErrorCode::Config,
              "malformed section at line " + std::to_string(lineno));
      section = trim(t.substr(1, t.size() - 2));
      out[section];
      continue;
    }
    auto eq = t.find('=');
    require(eq != std::string::npos, ErrorCode::Config,
            "expected key=value at line " + std::to_string(lineno));
    require(!section.empty(), ErrorCode::Config,
            "key outside any section at line " + std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    require(!key.empty(), ErrorCode::Config,
            "empty key at line " + std::to_string(lineno));
    require(!out[section].count(key), ErrorCode::Config,
            "duplicate key '" + key + "' in [" + section + "]");
    out[section][key] = value;
  }
  return out;
}

IniSections load_ini(const fs::path& path) {
  return parse_ini(read_text_file(path));
}

namespace {

// Pulls a key out of a section copy so leftovers can be flagged as unknown.
std::optional<std::string> take(std::map<std::string, std::string>& section,
                                const std::string& key) {
  auto it = section.find(key);
  if (it == section.end()) return std::nullopt;
  std::string v = it->second;
  section.erase(it);
  return v;
}

void expect_empty(const std::map<std::string, std::string>& section,
                  const std::string& name) {
  if (!section.empty()) {
    fail(ErrorCode::Config,
         "unknown key '" + section.begin()->first + "' in [" + name + "]");
  }
}

}  // namespace

PipelineConfig pipeline_config_from_ini(const IniSections& ini) {
  PipelineConfig c;
  IniSections sections = ini;
  static const std::set<std::string> known = {"dataset", "fcn", "classifier",
                                              "featsel", "lsirm", "output"};
  for (const auto& [name, _] : sections) {
    require(known.count(name), ErrorCode::Config,
            "unknown config section [" + name + "]");
  }

  auto ds = sections["dataset"];
  if (auto v = take(ds, "manifest")) c.dataset_manifest = *v;
  if (auto v = take(ds, "atlas")) c.atlas = *v;
  if (auto v = take(ds, "standardize")) c.standardize = parse_bool(*v);
  expect_empty(ds, "dataset");

  auto fc = sections["fcn"];
  if (auto v = take(fc, "method")) c.fcn.method = parse_cli_method(*v);
  if (auto v = take(fc, "tau")) c.fcn.tau = parse_double(*v);
  if (auto v = take(fc, "tsne_perplexity")) c.fcn.tsne.perplexity = parse_double(*v);
  if (auto v = take(fc, "tsne_iterations")) c.fcn.tsne.iterations = static_cast<int>(parse_int(*v));
  if (auto v = take(fc, "tsne_learning_rate")) c.fcn.tsne.learning_rate = parse_double(*v);
  if (auto v = take(fc, "tsne_early_exaggeration")) c.fcn.tsne.early_exaggeration = parse_double(*v);
  if (auto v = take(fc, "umap_n_neighbors")) c.fcn.umap.n_neighbors = static_cast<int>(parse_int(*v));
  if (auto v = take(fc, "umap_min_dist")) c.fcn.umap.min_dist = parse_double(*v);
  if (auto v = take(fc, "umap_epochs")) c.fcn.umap.epochs = static_cast<int>(parse_int(*v));
  if (auto v = take(fc, "umap_negative_sample_rate")) c.fcn.umap.negative_sample_rate = static_cast<int>(parse_int(*v));
  if (auto v = take(fc, "mapper_intervals_x")) c.fcn.mapper.n_intervals_x = static_cast<int>(parse_int(*v));
  if (auto v = take(fc, "mapper_intervals_y")) c.fcn.mapper.n_intervals_y = static_cast<int>(parse_int(*v));
  if (auto v = take(fc, "mapper_overlap")) c.fcn.mapper.overlap = parse_double(*v);
  if (auto v = take(fc, "mapper_cluster_eps")) c.fcn.mapper.cluster_eps = parse_double(*v);
  if (auto v = take(fc, "mapper_eps_percentile")) c.fcn.mapper.auto_eps_percentile = parse_double(*v);
  if (auto v = take(fc, "pca_allow_rank_deficient")) c.fcn.pca_allow_rank_deficient = parse_bool(*v);
  if (auto v = take(fc, "seed")) c.fcn.seed = parse_u64(*v);
  expect_empty(fc, "fcn");

  auto cl = sections["classifier"];
  if (auto v = take(cl, "n_heads")) c.classifier.n_heads = static_cast<int>(parse_int(*v));
  if (auto v = take(cl, "d_model")) c.classifier.d_model = static_cast<int>(parse_int(*v));
  if (auto v = take(cl, "d_head")) c.classifier.d_head = static_cast<int>(parse_int(*v));
  if (auto v = take(cl, "learning_rate")) c.classifier.learning_rate = parse_double(*v);
  if (auto v = take(cl, "batch_size")) c.classifier.batch_size = static_cast<int>(parse_int(*v));
  if (auto v = take(cl, "folds")) c.classifier.folds = static_cast<int>(parse_int(*v));
  if (auto v = take(cl, "epochs")) c.classifier.epochs = static_cast<int>(parse_int(*v));
  if (auto v = take(cl, "seed")) c.classifier.seed = parse_u64(*v);
  expect_empty(cl, "classifier");

  auto fsx = sections["featsel"];
  if (auto v = take(fsx, "k")) c.featsel.k = static_cast<int>(parse_int(*v));
  if (auto v = take(fsx, "epsilon")) c.featsel.epsilon = parse_double(*v);
  if (auto v = take(fsx, "symmetric_kld")) c.featsel.symmetric_kld = parse_bool(*v);
  expect_empty(fsx, "featsel");

  auto ls = sections["lsirm"];
  if (auto v = take(ls, "n_iter")) c.lsirm.n_iter = static_cast<int>(parse_int(*v));
  if (auto v = take(ls, "burn_in")) c.lsirm.burn_in = static_cast<int>(parse_int(*v));
  if (auto v = take(ls, "thin")) c.lsirm.thin = static_cast<int>(parse_int(*v));
  if (auto v = take(ls, "sd_theta")) c.lsirm.sd_theta = parse_double(*v);
  if (auto v = take(ls, "sd_beta")) c.lsirm.sd_beta = parse_double(*v);
  if (auto v = take(ls, "sd_u")) c.lsirm.sd_u = parse_double(*v);
  if (auto v = take(ls, "sd_v")) c.lsirm.sd_v = parse_double(*v);
  if (auto v = take(ls, "tau2_beta")) c.lsirm.tau2_beta = parse_double(*v);
  if (auto v = take(ls, "a")) c.lsirm.a = parse_double(*v);
  if (auto v = take(ls, "b")) c.lsirm.b = parse_double(*v);
  if (auto v = take(ls, "a_sigma")) c.lsirm.a_sigma = parse_double(*v);
  if (auto v = take(ls, "b_sigma")) c.lsirm.b_sigma = parse_double(*v);
  if (auto v = take(ls, "seed")) c.lsirm.seed = parse_u64(*v);
  expect_empty(ls, "lsirm");

  auto mout = sections["output"];
  if (auto v = take(mout, "dir")) c.output_dir = *v;
  expect_empty(mout, "output");

  if (c.output_dir.empty()) {
    const char* root = std::getenv("FCNET_OUT_ROOT");
    c.output_dir = root ? std::string(root) : "fcnet_out";
  }
  return c;
}

void apply_overrides(PipelineConfig* config, const CliOverrides& overrides) {
  if (overrides.seed) {
    config->fcn.seed = derive_seed(*overrides.seed, 1);
    config->classifier.seed = derive_seed(*overrides.seed, 2);
    config->lsirm.seed = derive_seed(*overrides.seed, 3);
  }
  if (overrides.method) config->fcn.method = parse_cli_method(*overrides.method);
  if (overrides.out) config->output_dir = *overrides.out;
  if (overrides.k) config->featsel.k = *overrides.k;
  if (overrides.tau) config->fcn.tau = *overrides.tau;
  // jobs is accepted for interface compatibility; execution is sequential so
  // results are bitwise reproducible.
  (void)overrides.jobs;
}

std::string canonical_config(const PipelineConfig& c) {
  std::map<std::string, std::string> kv;
  kv["dataset.manifest"] = c.dataset_manifest;
  kv["dataset.atlas"] = c.atlas;
  kv["dataset.standardize"] = c.standardize ? "true" : "false";
  kv["fcn.method"] = fcn_method_name(c.fcn.method);
  kv["fcn.tau"] = format_double(c.fcn.tau);
  kv["fcn.tsne_perplexity"] = format_double(c.fcn.tsne.perplexity);
  kv["fcn.tsne_iterations"] = std::to_string(c.fcn.tsne.iterations);
  kv["fcn.tsne_learning_rate"] = format_double(c.fcn.tsne.learning_rate);
  kv["fcn.tsne_early_exaggeration"] =
      format_double(c.fcn.tsne.early_exaggeration);
  kv["fcn.umap_n_neighbors"] = std::to_string(c.fcn.umap.n_neighbors);
  kv["fcn.umap_min_dist"] = format_double(c.fcn.umap.min_dist);
  kv["fcn.umap_epochs"] = std::to_string(c.fcn.umap.epochs);
  kv["fcn.umap_negative_sample_rate"] =
      std::to_string(c.fcn.umap.negative_sample_rate);
  kv["fcn.mapper_intervals_x"] = std::to_string(c.fcn.mapper.n_intervals_x);
  kv["fcn.mapper_intervals_y"] = std::to_string(c.fcn.mapper.n_intervals_y);
  kv["fcn.mapper_overlap"] = format_double(c.fcn.mapper.overlap);
  kv["fcn.mapper_cluster_eps"] = format_double(c.fcn.mapper.cluster_eps);
  kv["fcn.mapper_eps_percentile"] =
      format_double(c.fcn.mapper.auto_eps_percentile);
  kv["fcn.pca_allow_rank_deficient"] =
      c.fcn.pca_allow_rank_deficient ? "true" : "false";
  kv["fcn.seed"] = std::to_string(c.fcn.seed);
  kv["classifier.n_heads"] = std::to_string(c.classifier.n_heads);
  kv["classifier.d_model"] = std::to_string(c.classifier.d_model);
  kv["classifier.d_head"] = std::to_string(c.classifier.d_head);
  kv["classifier.learning_rate"] = format_double(c.classifier.learning_rate);
  kv["classifier.batch_size"] = std::to_string(c.classifier.batch_size);
  kv["classifier.folds"] = std::to_string(c.classifier.folds);
  kv["classifier.epochs"] = std::to_string(c.classifier.epochs);
  kv["classifier.seed"] = std::to_string(c.classifier.seed);
  kv["featsel.k"] = std::to_string(c.featsel.k);
  kv["featsel.epsilon"] = format_double(c.featsel.epsilon);
  kv["featsel.symmetric_kld"] = c.featsel.symmetric_kld ? "true" : "false";
  kv["lsirm.n_iter"] = std::to_string(c.lsirm.n_iter);
  kv["lsirm.burn_in"] = std::to_string(c.lsirm.burn_in);
  kv["lsirm.thin"] = std::to_string(c.lsirm.thin);
  kv["lsirm.sd_theta"] = format_double(c.lsirm.sd_theta);
  kv["lsirm.sd_beta"] = format_double(c.lsirm.sd_beta);
  kv["lsirm.sd_u"] = format_double(c.lsirm.sd_u);
  kv["lsirm.sd_v"] = format_double(c.lsirm.sd_v);
  kv["lsirm.tau2_beta"] = format_double(c.lsirm.tau2_beta);
  kv["lsirm.a"] = format_double(c.lsirm.a);
  kv["lsirm.b"] = format_double(c.lsirm.b);
  kv["lsirm.a_sigma"] = format_double(c.lsirm.a_sigma);
  kv["lsirm.b_sigma"] = format_double(c.lsirm.b_sigma);
  kv["lsirm.seed"] = std::to_string(c.lsirm.seed);
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
  return out.str();
}

std::string run_id(const PipelineConfig& config) {
  return hex64(fnv1a64(canonical_config(config)));
}

std::vector<CohortEntry> load_cohort_manifest(const fs::path& path) {
  json j = json::parse(read_text_file(path), nullptr, true, false);
  require(j.is_array(), ErrorCode::Io,
          "cohort manifest must be a JSON array: " + path.string());
  std::vector<CohortEntry> out;
  for (const auto& e : j) {
    require(e.contains("subject_id") && e.contains("group") &&
                e.contains("csv_path"),
            ErrorCode::Io, "cohort entry missing required fields");
    out.push_back(CohortEntry{e["subject_id"].get<std::string>(),
                              group_from_name(e["group"].get<std::string>()),
                              e["csv_path"].get<std::string>()});
  }
  require(!out.empty(), ErrorCode::Io, "cohort manifest is empty");
  return out;
}

GroupPair parse_pair(const std::string& text) {
  auto colon = text.find(':');
  require(colon != std::string::npos, ErrorCode::InvalidArgument,
          "pair must be GROUP_A:GROUP_B");
  GroupPair p;
  p.a = group_from_name(trim(text.substr(0, colon)));
  p.b = group_from_name(trim(text.substr(colon + 1)));
  require(p.a != p.b, ErrorCode::InvalidArgument,
          "pair groups must be distinct");
  return p;
}

namespace {

std::string checksum_hex(const fs::path& p) { return hex64(checksum_file(p)); }

json config_as_json(const PipelineConfig& c) {
  json j;
  std::istringstream in(canonical_config(c));
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq != std::string::npos) {
      j[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  return j;
}

fs::path manifest_file(const PipelineConfig& c) {
  return fs::path(c.output_dir) / "manifest.json";
}

json load_or_init_manifest(const PipelineConfig& c) {
  fs::path mf = manifest_file(c);
  std::string id = run_id(c);
  if (fs::exists(mf)) {
    json m = json::parse(read_text_file(mf), nullptr, true, false);
    require(m.value("run_id", "") == id, ErrorCode::Config,
            "output dir " + c.output_dir +
                " belongs to a different run configuration");
    return m;
  }
  json m;
  m["run_id"] = id;
  m["config_checksum"] = hex64(fnv1a64(canonical_config(c)));
  m["config"] = config_as_json(c);
  m["created_unix"] = static_cast<long long>(std::time(nullptr));
  m["seeds"] = {{"fcn", c.fcn.seed},
                {"classifier", c.classifier.seed},
                {"lsirm", c.lsirm.seed}};
  m["stages"] = json::object();
  return m;
}

void save_manifest(const PipelineConfig& c, json& m) {
  m["updated_unix"] = static_cast<long long>(std::time(nullptr));
  fs::create_directories(c.output_dir);
  write_text_file(manifest_file(c), m.dump(2) + "\n");
  write_text_file(fs::path(c.output_dir) / "config.snapshot.ini",
                  canonical_config(c));
}

const json& require_stage(const json& manifest, const std::string& stage) {
  const auto& stages = manifest.at("stages");
  require(stages.contains(stage), ErrorCode::InvalidArgument,
          "stage '" + stage + "' has not run yet; run it first");
  return stages.at(stage);
}

// Recomputes a file checksum and compares against the manifest record.
void verify_checksum(const fs::path& file, const std::string& expected,
                     const std::string& what) {
  std::string got = checksum_hex(file);
  require(got == expected, ErrorCode::Verification,
          what + " checksum mismatch for " + file.string() +
              " (artifact modified since it was recorded)");
}

RoiAtlas load_config_atlas(const PipelineConfig& c) {
  return load_atlas(c.atlas);
}

BoldRecording load_subject(const PipelineConfig& c, const RoiAtlas& atlas,
                           const fs::path& manifest_dir,
                           const CohortEntry& entry) {
  fs::path csv = manifest_dir / entry.csv_path;
  BoldRecording rec = ingest_bold(csv, atlas, entry.subject_id, entry.group);
  if (c.standardize) rec = standardize(rec, &atlas);
  return rec;
}

FcnGraph build_graph(const PipelineConfig& c, const BoldRecording& rec,
                     const RoiAtlas& atlas, std::uint64_t seed) {
  switch (c.fcn.method) {
    case FcnMethod::PEARSON:
      return threshold_graph(pearson_matrix(rec, &atlas), c.fcn.tau);
    case FcnMethod::FISHER_Z:
      return threshold_graph(fisher_z(pearson_matrix(rec, &atlas)), c.fcn.tau);
    case FcnMethod::MAPPER_PCA: {
      Embedding e = pca_embed(rec.signal, c.fcn.pca_allow_rank_deficient);
      return mapper_graph(e, c.fcn.mapper);
    }
    case FcnMethod::MAPPER_TSNE: {
      Embedding e = tsne_embed(rec.signal, c.fcn.tsne, seed);
      return mapper_graph(e, c.fcn.mapper);
    }
    case FcnMethod::MAPPER_UMAP: {
      Embedding e = umap_embed(rec.signal, c.fcn.umap, seed);
      return mapper_graph(e, c.fcn.mapper);
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown fcn method");
}

std::vector<CohortEntry> cohort_for_pair(const std::vector<CohortEntry>& all,
                                         const GroupPair& pair) {
  std::vector<CohortEntry> out;
  for (const auto& e : all) {
    if (e.group == pair.a || e.group == pair.b) out.push_back(e);
  }
  return out;
}

void write_matrix_with_ids(const fs::path& path, const Matrix& m,
                           const std::vector<std::string>& row_ids,
                           const std::vector<std::string>& col_labels,
                           const std::string& corner) {
  std::ostringstream out;
  out << corner;
  for (const auto& l : col_labels) out << ',' << l;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << row_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << ',' << format_double(m(i, j));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

Matrix read_matrix_with_ids(const fs::path& path,
                            std::vector<std::string>* row_ids,
                            std::vector<std::string>* col_labels) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open: " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::Io,
          "empty matrix file: " + path.string());
  std::vector<std::vector<double>> rows;
  {
    std::istringstream hdr(line);
    std::string cell;
    bool first = true;
    while (std::getline(hdr, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      if (first) {
        first = false;
      } else if (col_labels) {
        col_labels->push_back(cell);
      }
    }
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string cell;
    bool first = true;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      if (first) {
        if (row_ids) row_ids->push_back(cell);
        first = false;
      } else {
        row.push_back(parse_double(cell));
      }
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::Io, "no data rows in " + path.string());
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == rows.front().size(), ErrorCode::Io,
            "ragged matrix file: " + path.string());
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

}  // namespace

int cmd_synth(const fs::path& spec_file, const fs::path& out_dir) {
  IniSections ini = load_ini(spec_file);
  require(ini.count("cohort"), ErrorCode::Config,
          "cohort spec needs a [cohort] section");
  auto sec = ini["cohort"];

  std::string atlas_name = "builtin";
  if (auto v = take(sec, "atlas")) atlas_name = *v;
  RoiAtlas atlas = load_atlas(atlas_name);

  CohortSpec spec;
  spec.r_count = atlas.size();
  if (auto v = take(sec, "groups")) {
    std::istringstream gs(*v);
    std::string item;
    while (std::getline(gs, item, ',')) {
      auto colon = item.find(':');
      require(colon != std::string::npos, ErrorCode::Config,
              "groups entries must be NAME:COUNT");
      Group g = group_from_name(trim(item.substr(0, colon)));
      int n = static_cast<int>(parse_int(item.substr(colon + 1)));
      require(!spec.group_sizes.count(g), ErrorCode::Config,
              "group listed twice: " + group_name(g));
      spec.group_sizes[g] = n;
    }
  }
  if (auto v = take(sec, "t_count")) spec.t_count = static_cast<int>(parse_int(*v));
  if (auto v = take(sec, "n_blocks")) spec.n_blocks = static_cast<int>(parse_int(*v));
  if (auto v = take(sec, "noise_sd")) spec.noise_sd = parse_double(*v);
  if (auto v = take(sec, "seed")) spec.seed = parse_u64(*v);
  if (auto v = take(sec, "block_assignments")) {
    if (!trim(*v).empty()) {
      std::istringstream bs(*v);
      std::string item;
      while (std::getline(bs, item, ',')) {
        spec.block_assignments.push_back(static_cast<int>(parse_int(item)));
      }
    }
  }
  expect_empty(sec, "cohort");

  std::vector<BoldRecording> cohort = synth_cohort(spec);

  fs::create_directories(out_dir / "data");
  json manifest = json::array();
  for (const BoldRecording& rec : cohort) {
    std::string rel = "data/" + rec.subject_id + ".csv";
    export_bold(rec, atlas, out_dir / rel);
    manifest.push_back({{"subject_id", rec.subject_id},
                        {"group", group_name(rec.group)},
                        {"csv_path", rel}});
  }
  write_text_file(out_dir / "cohort.json", manifest.dump(2) + "\n");
  std::cout << "synth: wrote " << cohort.size() << " recordings under "
            << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_ingest(const PipelineConfig& config) {
  RoiAtlas atlas = load_config_atlas(config);
  fs::path manifest_path(config.dataset_manifest);
  std::vector<CohortEntry> cohort = load_cohort_manifest(manifest_path);
  fs::path dir = manifest_path.parent_path();

  json artifacts = json::array();
  for (const CohortEntry& e : cohort) {
    fs::path csv = dir / e.csv_path;
    ingest_bold(csv, atlas, e.subject_id, e.group);  // validation
    artifacts.push_back({{"subject_id", e.subject_id},
                         {"group", group_name(e.group)},
                         {"path", e.csv_path},
                         {"checksum", checksum_hex(csv)}});
  }
  json m = load_or_init_manifest(config);
  m["stages"]["ingest"] = {
      {"artifacts", artifacts},
      {"completed_unix", static_cast<long long>(std::time(nullptr))}};
  save_manifest(config, m);
  std::cout << "ingest: validated " << cohort.size() << " recordings\n";
  return kExitOk;
}

int cmd_fcn(const PipelineConfig& config) {
  RoiAtlas atlas = load_config_atlas(config);
  fs::path manifest_path(config.dataset_manifest);
  std::vector<CohortEntry> cohort = load_cohort_manifest(manifest_path);
  fs::path dir = manifest_path.parent_path();
  fs::path out(config.output_dir);
  fs::create_directories(out / "fcn");

  json artifacts = json::array();
  json failures = json::array();
  for (std::size_t idx = 0; idx < cohort.size(); ++idx) {
    const CohortEntry& e = cohort[idx];
    try {
      fs::path csv = dir / e.csv_path;
      std::string input_checksum = checksum_hex(csv);
      BoldRecording rec = load_subject(config, atlas, dir, e);
      std::uint64_t seed = derive_seed(config.fcn.seed, idx);
      FcnGraph g = build_graph(config, rec, atlas, seed);

      std::string base = "fcn/" + e.subject_id;
      write_text_file(out / (base + ".graph.json"), graph_to_json(g));
      write_text_file(out / (base + ".graph.dot"), graph_to_dot(g, atlas));
      write_csv(out / (base + ".adj.csv"), adjacency(g));
      artifacts.push_back(
          {{"subject_id", e.subject_id},
           {"group", group_name(e.group)},
           {"graph_json", base + ".graph.json"},
           {"graph_dot", base + ".graph.dot"},
           {"adj_csv", base + ".adj.csv"},
           {"checksum_graph", checksum_hex(out / (base + ".graph.json"))},
           {"checksum_adj", checksum_hex(out / (base + ".adj.csv"))},
           {"input_checksum", input_checksum},
           {"seed", seed},
           {"edges", static_cast<long long>(g.edges.size())}});
    } catch (const FcnetError& err) {
      failures.push_back(
          {{"subject_id", e.subject_id}, {"error", err.what()}});
      std::cerr << "fcn: subject " << e.subject_id << " failed: " << err.what()
                << "\n";
    }
  }
  json m = load_or_init_manifest(config);
  m["stages"]["fcn"] = {
      {"method", fcn_method_name(config.fcn.method)},
      {"artifacts", artifacts},
      {"failures", failures},
      {"completed_unix", static_cast<long long>(std::time(nullptr))}};
  save_manifest(config, m);
  std::cout << "fcn: built " << artifacts.size() << " graphs, "
            << failures.size() << " failures\n";
  return failures.empty() ? kExitOk : kExitPartialFailure;
}

namespace {

struct FcnArtifactIndex {
  std::map<std::string, json> by_subject;
};

FcnArtifactIndex fcn_index(const json& manifest) {
  const json& stage = require_stage(manifest, "fcn");
  require(stage.at("failures").empty(), ErrorCode::InvalidArgument,
          "fcn stage has failed subjects; later stages need complete inputs");
  FcnArtifactIndex idx;
  for (const auto& a : stage.at("artifacts")) {
    idx.by_subject[a.at("subject_id").get<std::string>()] = a;
  }
  return idx;
}

}  // namespace

int cmd_classify(const PipelineConfig& config, const GroupPair& pair) {
  fs::path out(config.output_dir);
  json m = load_or_init_manifest(config);
  FcnArtifactIndex idx = fcn_index(m);
  std::vector<CohortEntry> cohort = cohort_for_pair(
      load_cohort_manifest(config.dataset_manifest), pair);
  require(!cohort.empty(), ErrorCode::InvalidArgument,
          "no subjects in the requested pair");

  std::vector<SubjectGraphInput> dataset;
  json input_checksums = json::array();
  for (const CohortEntry& e : cohort) {
    auto it = idx.by_subject.find(e.subject_id);
    require(it != idx.by_subject.end(), ErrorCode::InvalidArgument,
            "no fcn artifact for subject " + e.subject_id);
    fs::path adj_path = out / it->second.at("adj_csv").get<std::string>();
    std::string expected = it->second.at("checksum_adj").get<std::string>();
    verify_checksum(adj_path, expected, "adjacency");
    input_checksums.push_back(expected);
    dataset.push_back(SubjectGraphInput{read_csv(adj_path, false),
                                        e.subject_id, e.group});
  }

  ModelConfig mc = config.classifier;
  CvResult res = train_cv(dataset, pair.a, pair.b, mc);

  std::string base = "classify/" + pair.dir_name();
  fs::create_directories(out / base / "attention");
  write_text_file(out / base / "cv_report.json",
                  cv_report_to_json(res.report));

  json attn_manifest = json::array();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    int fold = res.fold_of_subject[i];
    AttentionDistribution attn = extract_attention(
        res.fold_params[static_cast<std::size_t>(fold)], mc, dataset[i].adj,
        dataset[i].subject_id, dataset[i].group);
    std::string rel = base + "/attention/" + dataset[i].subject_id + ".csv";
    write_csv(out / rel, attn.values);
    attn_manifest.push_back({{"subject_id", dataset[i].subject_id},
                             {"group", group_name(dataset[i].group)},
                             {"fold", fold},
                             {"path", rel},
                             {"checksum", checksum_hex(out / rel)}});
  }
  write_text_file(out / base / "attention_manifest.json",
                  attn_manifest.dump(2) + "\n");

  m["stages"]["classify:" + pair.dir_name()] = {
      {"cv_report", base + "/cv_report.json"},
      {"attention_manifest", base + "/attention_manifest.json"},
      {"attention", attn_manifest},
      {"input_checksums", input_checksums},
      {"mean_accuracy", res.report.mean_accuracy},
      {"completed_unix", static_cast<long long>(std::time(nullptr))}};
  save_manifest(config, m);
  std::cout << "classify: mean cv accuracy " << res.report.mean_accuracy
            << " over " << mc.folds << " folds\n";
  return kExitOk;
}

namespace {

// Attention artifacts for one pair, grouped and order-preserving.
void load_attention(const PipelineConfig& config, const json& manifest,
                    const GroupPair& pair,
                    std::vector<AttentionDistribution>* subjects_a,
                    std::vector<AttentionDistribution>* subjects_b,
                    json* input_checksums) {
  fs::path out(config.output_dir);
  const json& stage = require_stage(manifest, "classify:" + pair.dir_name());
  for (const auto& a : stage.at("attention")) {
    fs::path p = out / a.at("path").get<std::string>();
    std::string expected = a.at("checksum").get<std::string>();
    verify_checksum(p, expected, "attention");
    if (input_checksums) input_checksums->push_back(expected);
    AttentionDistribution d{read_csv(p, false),
                            a.at("subject_id").get<std::string>(),
                            group_from_name(a.at("group").get<std::string>())};
    if (d.group == pair.a) {
      subjects_a->push_back(std::move(d));
    } else {
      subjects_b->push_back(std::move(d));
    }
  }
  require(!subjects_a->empty() && !subjects_b->empty(),
          ErrorCode::InvalidArgument, "attention artifacts missing a group");
}

}  // namespace

int cmd_select(const PipelineConfig& config, const GroupPair& pair) {
  fs::path out(config.output_dir);
  RoiAtlas atlas = load_config_atlas(config);
  json m = load_or_init_manifest(config);

  std::vector<AttentionDistribution> subjects_a, subjects_b;
  json input_checksums = json::array();
  load_attention(config, m, pair, &subjects_a, &subjects_b, &input_checksums);

  GroupAttention ga = group_mean_attention(subjects_a);
  GroupAttention gb = group_mean_attention(subjects_b);
  KldRanking ranking = rank_rois_kld(ga, gb, config.featsel.symmetric_kld,
                                     config.featsel.epsilon);
  SelectedRoiSet sel =
      select_rois(ga, gb, subjects_a, subjects_b, config.featsel.k);

  std::string base = "select/" + pair.dir_name();
  fs::create_directories(out / base);

  std::ostringstream rank_csv;
  rank_csv << "roi_index,roi_label,kld\n";
  for (const auto& [roi, score] : ranking.entries) {
    rank_csv << roi << ',' << atlas.label(roi) << ',' << format_double(score)
             << '\n';
  }
  write_text_file(out / base / "kld_ranking.csv", rank_csv.str());

  auto labels_for = [&](const std::vector<int>& rois) {
    json l = json::array();
    for (int roi : rois) l.push_back(atlas.label(roi));
    return l;
  };
  json sel_json = {{"group_a", group_name(pair.a)},
                   {"group_b", group_name(pair.b)},
                   {"k", sel.k},
                   {"rois_a", sel.rois_a},
                   {"labels_a", labels_for(sel.rois_a)},
                   {"rois_b", sel.rois_b},
                   {"labels_b", labels_for(sel.rois_b)}};
  write_text_file(out / base / "selected_rois.json", sel_json.dump(2) + "\n");

  PatientRoiMatrix ma = build_patient_roi_matrix(subjects_a, sel.rois_a, pair.a);
  PatientRoiMatrix mb = build_patient_roi_matrix(subjects_b, sel.rois_b, pair.b);
  auto write_m = [&](const PatientRoiMatrix& pm, Group g) {
    std::vector<std::string> labels;
    for (int roi : pm.roi_indices) labels.push_back(atlas.label(roi));
    write_matrix_with_ids(out / base / ("m_" + group_name(g) + ".csv"),
                          pm.values, pm.subject_ids, labels, "subject_id");
  };
  write_m(ma, pair.a);
  write_m(mb, pair.b);

  m["stages"]["select:" + pair.dir_name()] = {
      {"kld_ranking", base + "/kld_ranking.csv"},
      {"selected_rois", base + "/selected_rois.json"},
      {"m_a", base + "/m_" + group_name(pair.a) + ".csv"},
      {"m_b", base + "/m_" + group_name(pair.b) + ".csv"},
      {"checksum_kld", checksum_hex(out / base / "kld_ranking.csv")},
      {"checksum_selected", checksum_hex(out / base / "selected_rois.json")},
      {"checksum_m_a",
       checksum_hex(out / base / ("m_" + group_name(pair.a) + ".csv"))},
      {"checksum_m_b",
       checksum_hex(out / base / ("m_" + group_name(pair.b) + ".csv"))},
      {"input_checksums", input_checksums},
      {"completed_unix", static_cast<long long>(std::time(nullptr))}};
  save_manifest(config, m);
  std::cout << "select: top " << sel.k << " rois per group written under "
            << (out / base).string() << "\n";
  return kExitOk;
}

namespace {

void export_chains(const fs::path& dir, const LsirmPosterior& post) {
  fs::create_directories(dir);
  const auto& samples = post.samples;
  int jj = static_cast<int>(samples.front().theta.size());
  int n = static_cast<int>(samples.front().beta.size());
  auto iter_of = [&](std::size_t s) {
    return post.config.burn_in +
           static_cast<long long>(s + 1) * post.config.thin;
  };

  std::ostringstream theta, beta, u, v, variances;
  theta << "iter";
  for (int a = 1; a <= jj; ++a) theta << ",theta_" << a;
  theta << '\n';
  beta << "iter";
  for (int a = 1; a <= n; ++a) beta << ",beta_" << a;
  beta << '\n';
  u << "iter";
  for (int a = 1; a <= jj; ++a) u << ",u_" << a << "_x,u_" << a << "_y";
  u << '\n';
  v << "iter";
  for (int a = 1; a <= n; ++a) v << ",v_" << a << "_x,v_" << a << "_y";
  v << '\n';
  variances << "iter,sigma2,sigma_theta2\n";

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const LsirmState& st = samples[s];
    theta << iter_of(s);
    for (int a = 0; a < jj; ++a) theta << ',' << format_double(st.theta(a));
    theta << '\n';
    beta << iter_of(s);
    for (int a = 0; a < n; ++a) beta << ',' << format_double(st.beta(a));
    beta << '\n';
    u << iter_of(s);
    for (int a = 0; a < jj; ++a) {
      u << ',' << format_double(st.u(a, 0)) << ','
        << format_double(st.u(a, 1));
    }
    u << '\n';
    v << iter_of(s);
    for (int a = 0; a < n; ++a) {
      v << ',' << format_double(st.v(a, 0)) << ','
        << format_double(st.v(a, 1));
    }
    v << '\n';
    variances << iter_of(s) << ',' << format_double(st.sigma2) << ','
              << format_double(st.sigma_theta2) << '\n';
  }
  write_text_file(dir / "theta.csv", theta.str());
  write_text_file(dir / "beta.csv", beta.str());
  write_text_file(dir / "u.csv", u.str());
  write_text_file(dir / "v.csv", v.str());
  write_text_file(dir / "variances.csv", variances.str());
}

json summary_to_json(const LsirmSummary& s, const std::vector<int>& rois,
                     const RoiAtlas& atlas,
                     const std::vector<std::string>& subject_ids) {
  json j;
  j["rois"] = rois;
  json labels = json::array();
  for (int roi : rois) labels.push_back(atlas.label(roi));
  j["labels"] = labels;
  j["subject_ids"] = subject_ids;
  j["theta"] = std::vector<double>(s.theta_mean.data(),
                                   s.theta_mean.data() + s.theta_mean.size());
  j["theta_sd"] = std::vector<double>(s.theta_sd.data(),
                                      s.theta_sd.data() + s.theta_sd.size());
  j["beta"] = std::vector<double>(s.beta_mean.data(),
                                  s.beta_mean.data() + s.beta_mean.size());
  auto mat_to_json = [](const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      rows.push_back({m(i, 0), m(i, 1)});
    }
    return rows;
  };
  j["u"] = mat_to_json(s.u_mean);
  j["v"] = mat_to_json(s.v_mean);
  j["sigma2"] = s.sigma2_mean;
  j["sigma_theta2"] = s.sigma_theta2_mean;
  j["roi_centrality"] = std::vector<double>(
      s.roi_centrality.data(),
      s.roi_centrality.data() + s.roi_centrality.size());
  j["acceptance_rates"] = s.acceptance_rates;
  return j;
}

void write_latent_positions_csv(const fs::path& path, const LsirmSummary& s,
                                const std::vector<int>& rois,
                                const RoiAtlas& atlas,
                                const std::vector<std::string>& subject_ids) {
  std::ostringstream out;
  out << "kind,id,label,x,y\n";
  for (Eigen::Index a = 0; a < s.u_mean.rows(); ++a) {
    int roi = rois[static_cast<std::size_t>(a)];
    out << "roi," << roi << ',' << atlas.label(roi) << ','
        << format_double(s.u_mean(a, 0)) << ','
        << format_double(s.u_mean(a, 1)) << '\n';
  }
  for (Eigen::Index a = 0; a < s.v_mean.rows(); ++a) {
    out << "patient," << subject_ids[static_cast<std::size_t>(a)] << ','
        << subject_ids[static_cast<std::size_t>(a)] << ','
        << format_double(s.v_mean(a, 0)) << ','
        << format_double(s.v_mean(a, 1)) << '\n';
  }
  write_text_file(path, out.str());
}

// Edge present in at least half of the group's subject graphs. Keeps the
// per-subject method as its tag.
FcnGraph consensus_graph(const PipelineConfig& config, const json& manifest,
                         Group group) {
  fs::path out(config.output_dir);
  const json& stage = require_stage(manifest, "fcn");
  Matrix sum;
  int count = 0;
  for (const auto& a : stage.at("artifacts")) {
    if (group_from_name(a.at("group").get<std::string>()) != group) continue;
    fs::path p = out / a.at("adj_csv").get<std::string>();
    verify_checksum(p, a.at("checksum_adj").get<std::string>(), "adjacency");
    Matrix adj = read_csv(p, false);
    if (count == 0) {
      sum = adj;
    } else {
      sum += adj;
    }
    ++count;
  }
  require(count > 0, ErrorCode::InvalidArgument,
          "no fcn artifacts for group " + group_name(group));
  Matrix mean = sum / static_cast<double>(count);
  Matrix consensus = (mean.array() >= 0.5).cast<double>().matrix();
  consensus.diagonal().setZero();
  return graph_from_adjacency(consensus, config.fcn.method,
                              "consensus>=0.5 n=" + std::to_string(count));
}

}  // namespace

int cmd_lsirm(const PipelineConfig& config, const GroupPair& pair) {
  fs::path out(config.output_dir);
  RoiAtlas atlas = load_config_atlas(config);
  json m = load_or_init_manifest(config);
  const json& sel_stage = require_stage(m, "select:" + pair.dir_name());

  json sel_json = json::parse(
      read_text_file(out / sel_stage.at("selected_rois").get<std::string>()),
      nullptr, true, false);
  std::vector<int> rois_a = sel_json.at("rois_a").get<std::vector<int>>();
  std::vector<int> rois_b = sel_json.at("rois_b").get<std::vector<int>>();

  json input_checksums = json::array();
  input_checksums.push_back(sel_stage.at("checksum_m_a"));
  input_checksums.push_back(sel_stage.at("checksum_m_b"));

  std::string base = "lsirm/" + pair.dir_name();
  fs::create_directories(out / base);

  struct SideResult {
    LsirmSummary summary;
    std::vector<std::string> subject_ids;
  };
  auto run_side = [&](Group g, const std::string& m_key,
                      const std::string& checksum_key,
                      const std::vector<int>& rois,
                      std::uint64_t seed_tag) -> SideResult {
    fs::path m_path = out / sel_stage.at(m_key).get<std::string>();
    verify_checksum(m_path, sel_stage.at(checksum_key).get<std::string>(),
                    "patient-roi matrix");
    std::vector<std::string> ids;
    Matrix y = read_matrix_with_ids(m_path, &ids, nullptr);
    LsirmData data{y};
    SamplerConfig sc = config.lsirm;
    sc.seed = derive_seed(config.lsirm.seed, seed_tag);
    LsirmPosterior post = mcmc_run(data, sc);
    LsirmSummary summary = posterior_summary(post);

    fs::path gdir = out / base / group_name(g);
    export_chains(gdir / "chains", post);
    write_text_file(gdir / "summary.json",
                    summary_to_json(summary, rois, atlas, ids).dump(2) + "\n");
    write_latent_positions_csv(gdir / "latent_positions.csv", summary, rois,
                               atlas, ids);
    return SideResult{std::move(summary), std::move(ids)};
  };

  SideResult side_a = run_side(pair.a, "m_a", "checksum_m_a", rois_a, 1);
  SideResult side_b = run_side(pair.b, "m_b", "checksum_m_b", rois_b, 2);

  std::map<int, RoiCategory> categories =
      significant_rois(side_a.summary, side_b.summary, rois_a, rois_b);
  json cat_json;
  cat_json["group_a"] = group_name(pair.a);
  cat_json["group_b"] = group_name(pair.b);
  json cats = json::object();
  for (const auto& [roi, cat] : categories) {
    cats[std::to_string(roi)] = {{"label", atlas.label(roi)},
                                 {"category", roi_category_name(cat)}};
  }
  cat_json["categories"] = cats;
  write_text_file(out / base / "categories.json", cat_json.dump(2) + "\n");

  auto write_overlay = [&](Group g) {
    FcnGraph cons = consensus_graph(config, m, g);
    json overlay;
    overlay["group"] = group_name(g);
    overlay["pair"] = pair.dir_name();
    json nodes = json::array();
    for (int roi = 1; roi <= atlas.size(); ++roi) {
      json node = {{"roi", roi}, {"label", atlas.label(roi)}};
      auto it = categories.find(roi);
      node["category"] =
          it == categories.end() ? json(nullptr) : json(roi_category_name(it->second));
      nodes.push_back(node);
    }
    overlay["nodes"] = nodes;
    json edges = json::array();
    for (const auto& [i, jn] : cons.edges) edges.push_back({i, jn});
    overlay["edges"] = edges;
    write_text_file(out / base / ("overlay_" + group_name(g) + ".json"),
                    overlay.dump(2) + "\n");
  };
  write_overlay(pair.a);
  write_overlay(pair.b);

  m["stages"]["lsirm:" + pair.dir_name()] = {
      {"categories", base + "/categories.json"},
      {"checksum_categories", checksum_hex(out / base / "categories.json")},
      {"summary_a", base + "/" + group_name(pair.a) + "/summary.json"},
      {"summary_b", base + "/" + group_name(pair.b) + "/summary.json"},
      {"latent_a", base + "/" + group_name(pair.a) + "/latent_positions.csv"},
      {"latent_b", base + "/" + group_name(pair.b) + "/latent_positions.csv"},
      {"overlay_a", base + "/overlay_" + group_name(pair.a) + ".json"},
      {"overlay_b", base + "/overlay_" + group_name(pair.b) + ".json"},
      {"input_checksums", input_checksums},
      {"completed_unix", static_cast<long long>(std::time(nullptr))}};
  save_manifest(config, m);
  std::cout << "lsirm: posteriors and categories written under "
            << (out / base).string() << "\n";
  return kExitOk;
}

int cmd_report(const PipelineConfig& config, const GroupPair& pair) {
  fs::path out(config.output_dir);
  json m = load_or_init_manifest(config);
  const json& fcn_stage = require_stage(m, "fcn");
  const json& classify_stage =
      require_stage(m, "classify:" + pair.dir_name());
  const json& select_stage = require_stage(m, "select:" + pair.dir_name());
  const json& lsirm_stage = require_stage(m, "lsirm:" + pair.dir_name());
  require(fcn_stage.at("failures").empty(), ErrorCode::InvalidArgument,
          "fcn stage has failures; report needs complete inputs");

  fs::path report = out / "report";
  fs::remove_all(report);
  json kinds;
  auto add = [&](const std::string& kind, const std::string& rel_src,
                 const std::string& dst_name) {
    fs::path src = out / rel_src;
    std::string content = read_text_file(src);
    fs::path dst_rel = fs::path(kind) / dst_name;
    fs::create_directories(report / kind);
    write_text_file(report / dst_rel, content);
    kinds[kind].push_back({{"path", dst_rel.string()},
                           {"checksum", hex64(fnv1a64(content))}});
  };

  for (const auto& a : fcn_stage.at("artifacts")) {
    std::string sid = a.at("subject_id").get<std::string>();
    add("fcn_graphs", a.at("graph_json").get<std::string>(), sid + ".json");
    add("adjacency_matrices", a.at("adj_csv").get<std::string>(),
        sid + ".csv");
  }
  for (const auto& a : classify_stage.at("attention")) {
    std::string sid = a.at("subject_id").get<std::string>();
    add("attention_matrices", a.at("path").get<std::string>(), sid + ".csv");
  }
  add("kld_rankings", select_stage.at("kld_ranking").get<std::string>(),
      pair.dir_name() + ".csv");
  add("latent_positions", lsirm_stage.at("latent_a").get<std::string>(),
      pair.dir_name() + "_" + group_name(pair.a) + ".csv");
  add("latent_positions", lsirm_stage.at("latent_b").get<std::string>(),
      pair.dir_name() + "_" + group_name(pair.b) + ".csv");
  add("roi_categories", lsirm_stage.at("categories").get<std::string>(),
      pair.dir_name() + ".json");

  // Bundle checksum spans every file in a fixed order.
  std::string acc;
  for (const auto& [kind, files] : kinds.items()) {
    for (const auto& f : files) {
      acc += f.at("path").get<std::string>() + ":" +
             f.at("checksum").get<std::string>() + "\n";
    }
  }
  json bundle;
  bundle["run_id"] = m.at("run_id");
  bundle["pair"] = pair.dir_name();
  bundle["kinds"] = kinds;
  bundle["bundle_checksum"] = hex64(fnv1a64(acc));
  write_text_file(report / "bundle.json", bundle.dump(2) + "\n");

  std::cout << "report: bundle " << bundle["bundle_checksum"].get<std::string>()
            << " with 6 artifact kinds under " << report.string() << "\n";
  return kExitOk;
}

}  // namespace fcnet
