#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fcnet/featsel.hpp"
#include "fcnet/lsirm.hpp"
#include "fcnet/pipeline.hpp"

namespace py = pybind11;
using namespace fcnet;

namespace {

FcnGraph graph_for_signal(const Matrix& signal, const std::string& method,
                          double tau, std::uint64_t seed) {
  BoldRecording rec{"py", Group::SYNTH_A, signal};
  FcnMethod m = fcn_method_from_name(method);
  switch (m) {
    case FcnMethod::PEARSON:
      return threshold_graph(pearson_matrix(rec), tau);
    case FcnMethod::FISHER_Z:
      return threshold_graph(fisher_z(pearson_matrix(rec)), tau);
    case FcnMethod::MAPPER_PCA:
      return mapper_graph(pca_embed(signal), MapperParams{});
    case FcnMethod::MAPPER_TSNE:
      return mapper_graph(tsne_embed(signal, TsneParams{}, seed),
                          MapperParams{});
    case FcnMethod::MAPPER_UMAP:
      return mapper_graph(umap_embed(signal, UmapParams{}, seed),
                          MapperParams{});
  }
  fail(ErrorCode::InvalidArgument, "unknown method");
}

}  // namespace

PYBIND11_MODULE(_fcnet, m) {
  m.doc() = "functional connectivity pipeline core";

  py::register_exception<FcnetError>(m, "FcnetError");

  m.def("atlas_labels", [] {
    return builtin_atlas().labels();
  });

  m.def(
      "pearson",
      [](const Matrix& signal) {
        return pearson_matrix(BoldRecording{"py", Group::SYNTH_A, signal})
            .values;
      },
      py::arg("signal"));

  m.def(
      "fisher_z",
      [](const Matrix& signal) {
        return fisher_z(
                   pearson_matrix(BoldRecording{"py", Group::SYNTH_A, signal}))
            .values;
      },
      py::arg("signal"));

  m.def(
      "pca_embed",
      [](const Matrix& signal, bool allow_rank_deficient) {
        return pca_embed(signal, allow_rank_deficient).coords;
      },
      py::arg("signal"), py::arg("allow_rank_deficient") = false);

  m.def(
      "tsne_embed",
      [](const Matrix& signal, double perplexity, int iterations,
         std::uint64_t seed) {
        TsneParams p;
        p.perplexity = perplexity;
        p.iterations = iterations;
        return tsne_embed(signal, p, seed).coords;
      },
      py::arg("signal"), py::arg("perplexity") = 10.0,
      py::arg("iterations") = 1000, py::arg("seed") = 0);

  m.def(
      "umap_embed",
      [](const Matrix& signal, int n_neighbors, double min_dist, int epochs,
         std::uint64_t seed) {
        UmapParams p;
        p.n_neighbors = n_neighbors;
        p.min_dist = min_dist;
        p.epochs = epochs;
        return umap_embed(signal, p, seed).coords;
      },
      py::arg("signal"), py::arg("n_neighbors") = 15,
      py::arg("min_dist") = 0.1, py::arg("epochs") = 500, py::arg("seed") = 0);

  m.def(
      "fcn_adjacency",
      [](const Matrix& signal, const std::string& method, double tau,
         std::uint64_t seed) {
        return adjacency(graph_for_signal(signal, method, tau, seed));
      },
      py::arg("signal"), py::arg("method") = "pearson", py::arg("tau") = 0.5,
      py::arg("seed") = 0,
      "T x R signal -> R x R binary adjacency; method is one of pearson, "
      "fisher_z, mapper_pca, mapper_tsne, mapper_umap");

  m.def(
      "mapper_adjacency",
      [](const Matrix& coords, int intervals_x, int intervals_y,
         double overlap, double cluster_eps) {
        Embedding e{coords, EmbedMethod::PCA, "py", 0};
        MapperParams p;
        p.n_intervals_x = intervals_x;
        p.n_intervals_y = intervals_y;
        p.overlap = overlap;
        p.cluster_eps = cluster_eps;
        return adjacency(mapper_graph(e, p));
      },
      py::arg("coords"), py::arg("intervals_x") = 4, py::arg("intervals_y") = 4,
      py::arg("overlap") = 0.3, py::arg("cluster_eps") = 0.0);

  m.def(
      "attention_rows",
      [](const Matrix& adj, int n_heads, int d_model, int d_head,
         std::uint64_t seed) {
        ModelConfig c;
        c.n_heads = n_heads;
        c.d_model = d_model;
        c.d_head = d_head;
        c.seed = seed;
        validate_config(c);
        Rng rng(seed);
        ModelParams p = init_params(c, static_cast<int>(adj.rows()), rng);
        return extract_attention(p, c, adj, "py", Group::SYNTH_A).values;
      },
      py::arg("adj"), py::arg("n_heads") = 8, py::arg("d_model") = 16,
      py::arg("d_head") = 4, py::arg("seed") = 0,
      "head-averaged row-stochastic attention of an untrained model");

  m.def(
      "train_cv",
      [](const std::vector<Matrix>& adjs_a, const std::vector<Matrix>& adjs_b,
         int n_heads, int d_model, int d_head, int folds, int epochs,
         double learning_rate, int batch_size, std::uint64_t seed) {
        ModelConfig c;
        c.n_heads = n_heads;
        c.d_model = d_model;
        c.d_head = d_head;
        c.folds = folds;
        c.epochs = epochs;
        c.learning_rate = learning_rate;
        c.batch_size = batch_size;
        c.seed = seed;
        std::vector<SubjectGraphInput> dataset;
        int i = 0;
        for (const auto& a : adjs_a) {
          dataset.push_back({a, "a" + std::to_string(i++), Group::SYNTH_A});
        }
        i = 0;
        for (const auto& b : adjs_b) {
          dataset.push_back({b, "b" + std::to_string(i++), Group::SYNTH_B});
        }
        CvResult res = train_cv(dataset, Group::SYNTH_A, Group::SYNTH_B, c);
        py::dict out;
        out["fold_accuracy"] = res.report.fold_accuracy;
        out["mean_accuracy"] = res.report.mean_accuracy;
        std::vector<Matrix> attn;
        for (std::size_t s = 0; s < dataset.size(); ++s) {
          attn.push_back(
              extract_attention(
                  res.fold_params[static_cast<std::size_t>(
                      res.fold_of_subject[s])],
                  c, dataset[s].adj, dataset[s].subject_id, dataset[s].group)
                  .values);
        }
        out["attention"] = attn;
        return out;
      },
      py::arg("adjs_a"), py::arg("adjs_b"), py::arg("n_heads") = 8,
      py::arg("d_model") = 16, py::arg("d_head") = 4, py::arg("folds") = 5,
      py::arg("epochs") = 10, py::arg("learning_rate") = 0.01,
      py::arg("batch_size") = 8, py::arg("seed") = 0);

  m.def(
      "kld", [](const Vector& p, const Vector& q,
                double epsilon) { return kld(p, q, epsilon); },
      py::arg("p"), py::arg("q"), py::arg("epsilon") = 1e-10);

  m.def(
      "rank_rois",
      [](const Matrix& mean_a, const Matrix& mean_b, bool symmetric,
         double epsilon) {
        GroupAttention ga{Group::SYNTH_A, mean_a, 1};
        GroupAttention gb{Group::SYNTH_B, mean_b, 1};
        return rank_rois_kld(ga, gb, symmetric, epsilon).entries;
      },
      py::arg("mean_attention_a"), py::arg("mean_attention_b"),
      py::arg("symmetric") = true, py::arg("epsilon") = 1e-10,
      "list of (1-based roi, score), sorted non-increasing");

  m.def(
      "lsirm_fit",
      [](const Matrix& y, int n_iter, int burn_in, int thin, double sd_theta,
         double sd_beta, double sd_u, double sd_v, std::uint64_t seed) {
        SamplerConfig c;
        c.n_iter = n_iter;
        c.burn_in = burn_in;
        c.thin = thin;
        c.sd_theta = sd_theta;
        c.sd_beta = sd_beta;
        c.sd_u = sd_u;
        c.sd_v = sd_v;
        c.seed = seed;
        LsirmPosterior post = mcmc_run(LsirmData{y}, c);
        LsirmSummary s = posterior_summary(post);
        py::dict out;
        out["theta"] = s.theta_mean;
        out["theta_sd"] = s.theta_sd;
        out["beta"] = s.beta_mean;
        out["u"] = s.u_mean;
        out["v"] = s.v_mean;
        out["sigma2"] = s.sigma2_mean;
        out["sigma_theta2"] = s.sigma_theta2_mean;
        out["acceptance_rates"] = s.acceptance_rates;
        return out;
      },
      py::arg("y"), py::arg("n_iter") = 55000, py::arg("burn_in") = 5000,
      py::arg("thin") = 10, py::arg("sd_theta") = 0.1, py::arg("sd_beta") = 0.1,
      py::arg("sd_u") = 0.1, py::arg("sd_v") = 0.1, py::arg("seed") = 0,
      "posterior means of a continuous latent space item response fit");

  m.def("run_id", [](const std::string& ini_text) {
    return run_id(pipeline_config_from_ini(parse_ini(ini_text)));
  });
}
