#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcnet/io.hpp"
#include "fcnet/pipeline.hpp"

using namespace fcnet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fresh scratch directory per test binary run; removed up front so stale
// state from an aborted run cannot leak into assertions.
fs::path scratch_root() {
  static fs::path root = [] {
    fs::path p = fs::temp_directory_path() / "fcnet_pipeline_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  write_text_file(path, content);
  return path;
}

fs::path small_atlas() {
  static fs::path p = [] {
    std::string labels;
    for (int i = 1; i <= 12; ++i) labels += "Region_" + std::to_string(i) + "\n";
    return write_file(scratch_root() / "atlas12.txt", labels);
  }();
  return p;
}

std::string synth_spec_text() {
  return "# cohort spec\n"
         "[cohort]\n"
         "atlas = " + small_atlas().string() + "\n"
         "groups = SYNTH_A:6, SYNTH_B:6\n"
         "t_count = 48\n"
         "n_blocks = 3\n"
         "noise_sd = 0.6\n"
         "seed = 11\n";
}

// Shared synthetic dataset; generated once and reused read-only.
fs::path dataset_dir() {
  static fs::path dir = [] {
    fs::path spec = write_file(scratch_root() / "cohort.ini", synth_spec_text());
    fs::path out = scratch_root() / "dataset";
    REQUIRE(cmd_synth(spec, out) == kExitOk);
    return out;
  }();
  return dir;
}

PipelineConfig e2e_config(const std::string& out_name) {
  PipelineConfig c;
  c.dataset_manifest = (dataset_dir() / "cohort.json").string();
  c.atlas = small_atlas().string();
  c.standardize = true;
  c.fcn.method = FcnMethod::PEARSON;
  c.fcn.tau = 0.3;
  c.fcn.seed = 5;
  c.classifier.n_heads = 2;
  c.classifier.d_model = 8;
  c.classifier.d_head = 4;
  c.classifier.learning_rate = 0.01;
  c.classifier.batch_size = 4;
  c.classifier.folds = 2;
  c.classifier.epochs = 2;
  c.classifier.seed = 17;
  c.featsel.k = 3;
  c.lsirm.n_iter = 220;
  c.lsirm.burn_in = 100;
  c.lsirm.thin = 10;
  c.lsirm.seed = 23;
  c.output_dir = (scratch_root() / out_name).string();
  return c;
}

GroupPair ab_pair() {
  GroupPair p;
  p.a = Group::SYNTH_A;
  p.b = Group::SYNTH_B;
  return p;
}

json load_manifest(const PipelineConfig& c) {
  return json::parse(read_text_file(fs::path(c.output_dir) / "manifest.json"));
}

}  // namespace

TEST_CASE("parse_ini handles sections, comments, and trimming") {
  IniSections ini = parse_ini(
      "# leading comment\n"
      "; alt comment\n"
      "[alpha]\n"
      "  key = some value  \n"
      "empty =\n"
      "[beta]\r\n"
      "x=1\n"
      "\n"
      "[gamma]\n");
  REQUIRE(ini.size() == 3);
  CHECK(ini["alpha"]["key"] == "some value");
  CHECK(ini["alpha"]["empty"] == "");
  CHECK(ini["beta"]["x"] == "1");
  CHECK(ini["gamma"].empty());
}

TEST_CASE("parse_ini rejects malformed input") {
  CHECK_THROWS_AS(parse_ini("[a]\nk=1\nk=2\n"), FcnetError);
  CHECK_THROWS_AS(parse_ini("orphan = 1\n"), FcnetError);
  CHECK_THROWS_AS(parse_ini("[a]\nno_equals_here\n"), FcnetError);
  CHECK_THROWS_AS(parse_ini("[]\n"), FcnetError);
  CHECK_THROWS_AS(parse_ini("[open\nk=1\n"), FcnetError);
  CHECK_THROWS_AS(parse_ini("[a]\n= value\n"), FcnetError);
}

TEST_CASE("pipeline_config_from_ini applies defaults") {
  unsetenv("FCNET_OUT_ROOT");
  PipelineConfig c = pipeline_config_from_ini(parse_ini(""));
  CHECK(c.atlas == "builtin");
  CHECK(c.standardize);
  CHECK(c.fcn.method == FcnMethod::MAPPER_TSNE);
  CHECK(c.fcn.tau == 0.5);
  CHECK(c.featsel.k == 29);
  CHECK(c.featsel.epsilon == 1e-10);
  CHECK(c.featsel.symmetric_kld);
  CHECK(c.output_dir == "fcnet_out");
}

TEST_CASE("pipeline_config_from_ini parses every section") {
  IniSections ini = parse_ini(
      "[dataset]\n"
      "manifest = /tmp/cohort.json\n"
      "atlas = /tmp/atlas.txt\n"
      "standardize = false\n"
      "[fcn]\n"
      "method = umap\n"
      "tau = 0.25\n"
      "tsne_perplexity = 12\n"
      "tsne_iterations = 400\n"
      "umap_n_neighbors = 7\n"
      "umap_min_dist = 0.2\n"
      "umap_epochs = 120\n"
      "mapper_intervals_x = 4\n"
      "mapper_intervals_y = 3\n"
      "mapper_overlap = 0.4\n"
      "mapper_cluster_eps = 0.9\n"
      "seed = 77\n"
      "[classifier]\n"
      "n_heads = 4\n"
      "d_model = 16\n"
      "d_head = 4\n"
      "learning_rate = 0.005\n"
      "batch_size = 6\n"
      "folds = 5\n"
      "epochs = 9\n"
      "seed = 99\n"
      "[featsel]\n"
      "k = 10\n"
      "epsilon = 1e-8\n"
      "symmetric_kld = false\n"
      "[lsirm]\n"
      "n_iter = 1000\n"
      "burn_in = 200\n"
      "thin = 4\n"
      "sd_theta = 0.2\n"
      "sd_beta = 0.3\n"
      "sd_u = 0.4\n"
      "sd_v = 0.5\n"
      "tau2_beta = 2\n"
      "a = 1.5\n"
      "b = 2.5\n"
      "a_sigma = 3.5\n"
      "b_sigma = 4.5\n"
      "seed = 55\n"
      "[output]\n"
      "dir = /tmp/run\n");
  PipelineConfig c = pipeline_config_from_ini(ini);
  CHECK(c.dataset_manifest == "/tmp/cohort.json");
  CHECK(c.atlas == "/tmp/atlas.txt");
  CHECK_FALSE(c.standardize);
  CHECK(c.fcn.method == FcnMethod::MAPPER_UMAP);
  CHECK(c.fcn.tau == 0.25);
  CHECK(c.fcn.tsne.perplexity == 12.0);
  CHECK(c.fcn.tsne.iterations == 400);
  CHECK(c.fcn.umap.n_neighbors == 7);
  CHECK(c.fcn.umap.min_dist == 0.2);
  CHECK(c.fcn.umap.epochs == 120);
  CHECK(c.fcn.mapper.n_intervals_x == 4);
  CHECK(c.fcn.mapper.n_intervals_y == 3);
  CHECK(c.fcn.mapper.overlap == 0.4);
  CHECK(c.fcn.mapper.cluster_eps == 0.9);
  CHECK(c.fcn.seed == 77);
  CHECK(c.classifier.n_heads == 4);
  CHECK(c.classifier.d_model == 16);
  CHECK(c.classifier.d_head == 4);
  CHECK(c.classifier.learning_rate == 0.005);
  CHECK(c.classifier.batch_size == 6);
  CHECK(c.classifier.folds == 5);
  CHECK(c.classifier.epochs == 9);
  CHECK(c.classifier.seed == 99);
  CHECK(c.featsel.k == 10);
  CHECK(c.featsel.epsilon == 1e-8);
  CHECK_FALSE(c.featsel.symmetric_kld);
  CHECK(c.lsirm.n_iter == 1000);
  CHECK(c.lsirm.burn_in == 200);
  CHECK(c.lsirm.thin == 4);
  CHECK(c.lsirm.sd_theta == 0.2);
  CHECK(c.lsirm.sd_beta == 0.3);
  CHECK(c.lsirm.sd_u == 0.4);
  CHECK(c.lsirm.sd_v == 0.5);
  CHECK(c.lsirm.tau2_beta == 2.0);
  CHECK(c.lsirm.a == 1.5);
  CHECK(c.lsirm.b == 2.5);
  CHECK(c.lsirm.a_sigma == 3.5);
  CHECK(c.lsirm.b_sigma == 4.5);
  CHECK(c.lsirm.seed == 55);
  CHECK(c.output_dir == "/tmp/run");
}

TEST_CASE("pipeline_config_from_ini rejects unknown names and bad values") {
  CHECK_THROWS_WITH_AS(
      pipeline_config_from_ini(parse_ini("[nonsense]\nk=1\n")),
      doctest::Contains("unknown config section"), FcnetError);
  CHECK_THROWS_WITH_AS(
      pipeline_config_from_ini(parse_ini("[fcn]\ntypo_key=1\n")),
      doctest::Contains("unknown key"), FcnetError);
  CHECK_THROWS_AS(pipeline_config_from_ini(parse_ini("[fcn]\ntau=abc\n")),
                  FcnetError);
  CHECK_THROWS_AS(
      pipeline_config_from_ini(parse_ini("[dataset]\nstandardize=maybe\n")),
      FcnetError);
  CHECK_THROWS_AS(
      pipeline_config_from_ini(parse_ini("[fcn]\nmethod=wavelet\n")),
      FcnetError);
  CHECK_THROWS_AS(
      pipeline_config_from_ini(parse_ini("[classifier]\nfolds=3.5\n")),
      FcnetError);
}

TEST_CASE("canonical_config is sorted key=value lines") {
  PipelineConfig c = pipeline_config_from_ini(parse_ini(""));
  std::string text = canonical_config(c);
  std::istringstream in(text);
  std::string line, prev;
  int lines = 0;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    REQUIRE(eq != std::string::npos);
    std::string key = line.substr(0, eq);
    if (lines > 0) CHECK(prev < key);
    prev = key;
    ++lines;
  }
  CHECK(lines >= 30);
  CHECK(text.find("fcn.method=mapper_tsne\n") != std::string::npos);
  CHECK(text.find("featsel.k=29\n") != std::string::npos);
  CHECK(text.find("dataset.standardize=true\n") != std::string::npos);
}

TEST_CASE("run_id is config-determined") {
  PipelineConfig a = pipeline_config_from_ini(parse_ini(""));
  PipelineConfig b = pipeline_config_from_ini(parse_ini(""));
  CHECK(run_id(a) == run_id(b));
  CHECK(run_id(a).size() == 16);
  b.classifier.seed += 1;
  CHECK(run_id(a) != run_id(b));
  b = a;
  b.fcn.tau = 0.51;
  CHECK(run_id(a) != run_id(b));
  b = a;
  b.output_dir = "elsewhere";
  // Where outputs land is not part of the run identity.
  CHECK(run_id(a) == run_id(b));
}

TEST_CASE("apply_overrides derives stage seeds and replaces fields") {
  PipelineConfig c = pipeline_config_from_ini(parse_ini(""));
  CliOverrides o;
  o.seed = 42;
  o.method = "pearson";
  o.out = "/tmp/other";
  o.k = 7;
  o.tau = 0.9;
  apply_overrides(&c, o);
  CHECK(c.fcn.method == FcnMethod::PEARSON);
  CHECK(c.output_dir == "/tmp/other");
  CHECK(c.featsel.k == 7);
  CHECK(c.fcn.tau == 0.9);
  CHECK(c.fcn.seed != c.classifier.seed);
  CHECK(c.fcn.seed != c.lsirm.seed);
  CHECK(c.classifier.seed != c.lsirm.seed);

  PipelineConfig c2 = pipeline_config_from_ini(parse_ini(""));
  apply_overrides(&c2, o);
  CHECK(c2.fcn.seed == c.fcn.seed);
  CHECK(c2.classifier.seed == c.classifier.seed);
  CHECK(c2.lsirm.seed == c.lsirm.seed);

  CliOverrides other;
  other.seed = 43;
  PipelineConfig c3 = pipeline_config_from_ini(parse_ini(""));
  apply_overrides(&c3, other);
  CHECK(c3.fcn.seed != c.fcn.seed);

  CliOverrides none;
  PipelineConfig c4 = pipeline_config_from_ini(parse_ini(""));
  PipelineConfig before = c4;
  apply_overrides(&c4, none);
  CHECK(c4.fcn.seed == before.fcn.seed);
  CHECK(canonical_config(c4) == canonical_config(before));
}

TEST_CASE("parse_pair validates the GROUP_A:GROUP_B form") {
  GroupPair p = parse_pair("SYNTH_A:SYNTH_B");
  CHECK(p.a == Group::SYNTH_A);
  CHECK(p.b == Group::SYNTH_B);
  CHECK(p.dir_name() == "SYNTH_A_vs_SYNTH_B");
  GroupPair q = parse_pair(" AD : CN ");
  CHECK(q.a == Group::AD);
  CHECK(q.b == Group::CN);
  CHECK_THROWS_AS(parse_pair("SYNTH_A"), FcnetError);
  CHECK_THROWS_AS(parse_pair("SYNTH_A:SYNTH_A"), FcnetError);
  CHECK_THROWS_AS(parse_pair("SYNTH_A:NOPE"), FcnetError);
}

TEST_CASE("load_cohort_manifest validates shape and fields") {
  fs::path dir = scratch_root() / "manifests";
  fs::path good = write_file(dir / "good.json",
                             R"([{"subject_id":"s1","group":"SYNTH_A","csv_path":"s1.csv"}])");
  auto entries = load_cohort_manifest(good);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].subject_id == "s1");
  CHECK(entries[0].group == Group::SYNTH_A);
  CHECK(entries[0].csv_path == "s1.csv");

  CHECK_THROWS_AS(
      load_cohort_manifest(write_file(dir / "obj.json", R"({"a":1})")),
      FcnetError);
  CHECK_THROWS_AS(
      load_cohort_manifest(write_file(dir / "empty.json", "[]")), FcnetError);
  CHECK_THROWS_AS(
      load_cohort_manifest(write_file(
          dir / "missing.json", R"([{"subject_id":"s1","group":"SYNTH_A"}])")),
      FcnetError);
}

TEST_CASE("cmd_synth writes a cohort and is deterministic") {
  fs::path out = dataset_dir();
  REQUIRE(fs::exists(out / "cohort.json"));
  auto entries = load_cohort_manifest(out / "cohort.json");
  REQUIRE(entries.size() == 12);
  int n_a = 0;
  for (const auto& e : entries) {
    if (e.group == Group::SYNTH_A) ++n_a;
    CHECK(fs::exists(out / e.csv_path));
  }
  CHECK(n_a == 6);
  CHECK(entries[0].subject_id == "SYNTH_A_000");

  fs::path spec = scratch_root() / "cohort.ini";
  fs::path again = scratch_root() / "dataset_again";
  REQUIRE(cmd_synth(spec, again) == kExitOk);
  CHECK(read_text_file(again / "cohort.json") ==
        read_text_file(out / "cohort.json"));
  for (const auto& e : entries) {
    CHECK(read_text_file(again / e.csv_path) == read_text_file(out / e.csv_path));
  }
}

TEST_CASE("cmd_synth rejects malformed specs") {
  fs::path dir = scratch_root() / "bad_specs";
  CHECK_THROWS_AS(cmd_synth(write_file(dir / "nosec.ini", "[other]\nx=1\n"),
                            dir / "out1"),
                  FcnetError);
  CHECK_THROWS_AS(
      cmd_synth(write_file(dir / "nocolon.ini",
                           "[cohort]\ngroups = SYNTH_A\nnoise_sd=0.5\n"),
                dir / "out2"),
      FcnetError);
  CHECK_THROWS_AS(
      cmd_synth(write_file(dir / "dup.ini",
                           "[cohort]\ngroups = SYNTH_A:2,SYNTH_A:3\n"),
                dir / "out3"),
      FcnetError);
  CHECK_THROWS_AS(
      cmd_synth(write_file(dir / "unknown.ini",
                           "[cohort]\ngroups = SYNTH_A:2\nwhat = 1\n"),
                dir / "out4"),
      FcnetError);
}

TEST_CASE("pipeline end to end") {
  PipelineConfig config = e2e_config("run1");
  GroupPair pair = ab_pair();
  fs::path out(config.output_dir);
  std::string pdir = pair.dir_name();

  REQUIRE(cmd_ingest(config) == kExitOk);
  REQUIRE(fs::exists(out / "manifest.json"));
  CHECK(read_text_file(out / "config.snapshot.ini") == canonical_config(config));
  {
    json m = load_manifest(config);
    CHECK(m.at("run_id") == run_id(config));
    CHECK(m.at("stages").contains("ingest"));
    CHECK(m.at("stages").at("ingest").at("artifacts").size() == 12);
  }

  REQUIRE(cmd_fcn(config) == kExitOk);
  {
    json m = load_manifest(config);
    const json& stage = m.at("stages").at("fcn");
    CHECK(stage.at("method") == "pearson");
    CHECK(stage.at("artifacts").size() == 12);
    CHECK(stage.at("failures").empty());
    CHECK(fs::exists(out / "fcn/SYNTH_A_000.graph.json"));
    CHECK(fs::exists(out / "fcn/SYNTH_A_000.graph.dot"));
    Matrix adj = read_csv(out / "fcn/SYNTH_A_000.adj.csv", false);
    REQUIRE(adj.rows() == 12);
    REQUIRE(adj.cols() == 12);
    CHECK(adj.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK((adj - Matrix(adj.transpose())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(((adj.array() == 0.0) || (adj.array() == 1.0)).all());
  }

  // Later stages refuse to run before their inputs exist.
  CHECK_THROWS_WITH_AS(cmd_select(config, pair),
                       doctest::Contains("has not run yet"), FcnetError);
  CHECK_THROWS_WITH_AS(cmd_report(config, pair),
                       doctest::Contains("has not run yet"), FcnetError);

  REQUIRE(cmd_classify(config, pair) == kExitOk);
  {
    json m = load_manifest(config);
    const json& stage = m.at("stages").at("classify:" + pdir);
    CHECK(stage.at("attention").size() == 12);
    CHECK(fs::exists(out / "classify" / pdir / "cv_report.json"));
    CHECK(fs::exists(out / "classify" / pdir / "attention_manifest.json"));
    json report = json::parse(
        read_text_file(out / "classify" / pdir / "cv_report.json"));
    CHECK(report.at("fold_accuracy").size() == 2);
    Matrix attn = read_csv(
        out / "classify" / pdir / "attention/SYNTH_B_003.csv", false);
    REQUIRE(attn.rows() == 12);
    REQUIRE(attn.cols() == 12);
    for (Eigen::Index i = 0; i < attn.rows(); ++i) {
      CHECK(attn.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  REQUIRE(cmd_select(config, pair) == kExitOk);
  {
    fs::path base = out / "select" / pdir;
    std::string ranking = read_text_file(base / "kld_ranking.csv");
    CHECK(ranking.rfind("roi_index,roi_label,kld\n", 0) == 0);
    CHECK(std::count(ranking.begin(), ranking.end(), '\n') == 13);
    json sel = json::parse(read_text_file(base / "selected_rois.json"));
    CHECK(sel.at("k") == 3);
    REQUIRE(sel.at("rois_a").size() == 3);
    REQUIRE(sel.at("rois_b").size() == 3);
    for (int roi : sel.at("rois_a").get<std::vector<int>>()) {
      CHECK(roi >= 1);
      CHECK(roi <= 12);
    }
    std::string ma = read_text_file(base / "m_SYNTH_A.csv");
    CHECK(ma.rfind("subject_id,", 0) == 0);
    CHECK(std::count(ma.begin(), ma.end(), '\n') == 7);
    CHECK(std::count(ma.begin(), ma.begin() + ma.find('\n'), ',') == 3);
    CHECK(ma.find("SYNTH_A_000,") != std::string::npos);
  }

  REQUIRE(cmd_lsirm(config, pair) == kExitOk);
  {
    fs::path base = out / "lsirm" / pdir;
    for (const char* g : {"SYNTH_A", "SYNTH_B"}) {
      for (const char* f :
           {"theta.csv", "beta.csv", "u.csv", "v.csv", "variances.csv"}) {
        std::string chain = read_text_file(base / g / "chains" / f);
        // burn_in 100, thin 10 of 220 iterations retains 12 samples
        CHECK(std::count(chain.begin(), chain.end(), '\n') == 13);
      }
      json summary = json::parse(read_text_file(base / g / "summary.json"));
      CHECK(summary.at("theta").size() == 3);
      CHECK(summary.at("beta").size() == 6);
      CHECK(summary.at("u").size() == 3);
      CHECK(summary.at("v").size() == 6);
      CHECK(summary.at("sigma2").get<double>() > 0.0);
      CHECK(fs::exists(base / g / "latent_positions.csv"));
    }
    json cats = json::parse(read_text_file(base / "categories.json"));
    json sel = json::parse(
        read_text_file(out / "select" / pdir / "selected_rois.json"));
    std::set<int> selected;
    for (int roi : sel.at("rois_a").get<std::vector<int>>()) selected.insert(roi);
    for (int roi : sel.at("rois_b").get<std::vector<int>>()) selected.insert(roi);
    CHECK(cats.at("categories").size() == selected.size());
    for (const auto& [key, value] : cats.at("categories").items()) {
      CHECK(selected.count(std::stoi(key)) == 1);
      std::string cat = value.at("category").get<std::string>();
      CHECK((cat == "only_a" || cat == "only_b" || cat == "both" ||
             cat == "stronger_a" || cat == "stronger_b"));
    }
    CHECK(fs::exists(base / "overlay_SYNTH_A.json"));
    CHECK(fs::exists(base / "overlay_SYNTH_B.json"));
  }

  REQUIRE(cmd_report(config, pair) == kExitOk);
  fs::path bundle = out / "report" / "bundle.json";
  REQUIRE(fs::exists(bundle));
  std::string first = read_text_file(bundle);
  {
    json b = json::parse(first);
    CHECK(b.at("run_id") == run_id(config));
    CHECK(b.at("kinds").size() == 6);
    CHECK(b.at("kinds").at("fcn_graphs").size() == 12);
    CHECK(b.at("kinds").at("attention_matrices").size() == 12);
    CHECK(b.at("kinds").at("latent_positions").size() == 2);
    for (const auto& [kind, files] : b.at("kinds").items()) {
      for (const auto& f : files) {
        CHECK(fs::exists(out / "report" / f.at("path").get<std::string>()));
      }
    }
  }
  REQUIRE(cmd_report(config, pair) == kExitOk);
  CHECK(read_text_file(bundle) == first);

  // Tampered artifacts are refused, untouched ones keep working.
  fs::path adj_path = out / "fcn/SYNTH_B_002.adj.csv";
  std::string original = read_text_file(adj_path);
  write_text_file(adj_path, original + "0,0,0,0,0,0,0,0,0,0,0,0\n");
  CHECK_THROWS_WITH_AS(cmd_classify(config, pair),
                       doctest::Contains("artifact modified"), FcnetError);
  write_text_file(adj_path, original);
  CHECK(cmd_classify(config, pair) == kExitOk);

  fs::path attn_path = out / "classify" / pdir / "attention/SYNTH_A_001.csv";
  std::string attn_orig = read_text_file(attn_path);
  write_text_file(attn_path, attn_orig + "\n");
  CHECK_THROWS_WITH_AS(cmd_select(config, pair),
                       doctest::Contains("artifact modified"), FcnetError);
  write_text_file(attn_path, attn_orig);

  // The output dir is bound to one configuration.
  PipelineConfig other = config;
  other.lsirm.seed += 1;
  CHECK_THROWS_WITH_AS(cmd_ingest(other),
                       doctest::Contains("different run configuration"),
                       FcnetError);
}

TEST_CASE("cmd_fcn records per-subject failures and blocks classify") {
  // Clone the dataset, then corrupt one subject's csv.
  fs::path src = dataset_dir();
  fs::path bad = scratch_root() / "dataset_bad";
  fs::remove_all(bad);
  fs::create_directories(bad / "data");
  fs::copy(src / "cohort.json", bad / "cohort.json");
  for (const auto& e : load_cohort_manifest(src / "cohort.json")) {
    fs::copy(src / e.csv_path, bad / e.csv_path);
  }
  write_text_file(bad / "data/SYNTH_A_002.csv", "not,a,recording\n");

  PipelineConfig config = e2e_config("run_bad");
  config.dataset_manifest = (bad / "cohort.json").string();
  fs::remove_all(config.output_dir);

  CHECK(cmd_fcn(config) == kExitPartialFailure);
  json m = load_manifest(config);
  const json& stage = m.at("stages").at("fcn");
  CHECK(stage.at("artifacts").size() == 11);
  REQUIRE(stage.at("failures").size() == 1);
  CHECK(stage.at("failures")[0].at("subject_id") == "SYNTH_A_002");

  CHECK_THROWS_WITH_AS(cmd_classify(config, ab_pair()),
                       doctest::Contains("failed subjects"), FcnetError);
}

TEST_CASE("full rerun in a fresh directory reproduces the report bundle") {
  PipelineConfig config = e2e_config("run2");
  GroupPair pair = ab_pair();
  REQUIRE(cmd_fcn(config) == kExitOk);
  REQUIRE(cmd_classify(config, pair) == kExitOk);
  REQUIRE(cmd_select(config, pair) == kExitOk);
  REQUIRE(cmd_lsirm(config, pair) == kExitOk);
  REQUIRE(cmd_report(config, pair) == kExitOk);

  fs::path first = scratch_root() / "run1/report/bundle.json";
  fs::path second = fs::path(config.output_dir) / "report/bundle.json";
  REQUIRE(fs::exists(first));
  CHECK(read_text_file(second) == read_text_file(first));
}
