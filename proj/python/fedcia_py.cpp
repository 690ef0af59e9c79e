// Copyright 2026 The fedcia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Configs and reports cross the boundary as JSON text; the
// Python package turns them into dicts.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fedcia/backbones.hpp"
#include "fedcia/collab.hpp"
#include "fedcia/config_io.hpp"
#include "fedcia/dataset.hpp"
#include "fedcia/error.hpp"
#include "fedcia/eval.hpp"
#include "fedcia/matrixkit.hpp"
#include "fedcia/orchestrator.hpp"

namespace py = pybind11;
using namespace fedcia;

namespace {

RatingFormat parse_format(const std::string& name) {
  if (name == "tab_separated") return RatingFormat::kTabSeparated;
  if (name == "double_colon_separated") return RatingFormat::kDoubleColonSeparated;
  throw ConfigError("unknown dataset format '" + name + "'");
}

SparseInteractionMatrix binary(const DenseMatrix& a) { return SparseInteractionMatrix::from_dense(a); }

std::vector<ItemSimilarityMatrix> as_similarities(const std::vector<DenseMatrix>& ms) {
  return {ms.begin(), ms.end()};
}

}  // namespace

PYBIND11_MODULE(_fedcia, m) {
  m.doc() = "Federated recommendation with collaborative information aggregation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  py::class_<InteractionDataset>(m, "InteractionDataset")
      .def_readonly("num_users", &InteractionDataset::num_users)
      .def_readonly("num_items", &InteractionDataset::num_items)
      .def_property_readonly("num_interactions",
                             [](const InteractionDataset& d) { return d.interactions.size(); })
      .def("pairs",
           [](const InteractionDataset& d) {
             Eigen::Matrix<std::int32_t, Eigen::Dynamic, 2, Eigen::RowMajor> out(
                 static_cast<Eigen::Index>(d.interactions.size()), 2);
             for (std::size_t k = 0; k < d.interactions.size(); ++k) {
               out(static_cast<Eigen::Index>(k), 0) = d.interactions[k].user;
               out(static_cast<Eigen::Index>(k), 1) = d.interactions[k].item;
             }
             return out;
           })
      .def("items_by_user", &InteractionDataset::items_by_user);

  m.def(
      "load_interactions",
      [](const std::filesystem::path& path, const std::string& format,
         std::optional<double> threshold) { return load_interactions(path, parse_format(format), threshold); },
      py::arg("path"), py::arg("format") = "tab_separated", py::arg("rating_threshold") = py::none());

  m.def("gram", &gram, py::arg("embeddings"));
  m.def(
      "normalize_bipartite", [](const DenseMatrix& a) { return normalize_bipartite(binary(a)); },
      py::arg("interactions"));
  m.def(
      "truncated_svd",
      [](const DenseMatrix& c, std::int32_t rank) {
        const auto svd = truncated_svd(c, rank);
        return py::make_tuple(svd.left_vectors, svd.signed_values);
      },
      py::arg("matrix"), py::arg("rank"));
  m.def(
      "reconstruct",
      [](const DenseMatrix& left, const Vector& values) {
        return reconstruct(TruncatedSVD{left, values});
      },
      py::arg("left_vectors"), py::arg("signed_values"));

  m.def(
      "build_linear_filter", [](const DenseMatrix& a) { return build_linear_filter(binary(a)).values; },
      py::arg("interactions"));
  m.def(
      "ideal_global_filter",
      [](const DenseMatrix& a, bool equal_popularity) {
        return ideal_global_filter(binary(a), equal_popularity).values;
      },
      py::arg("interactions"), py::arg("equal_popularity") = true);
  m.def(
      "aggregate_cia",
      [](const std::vector<DenseMatrix>& ms) { return aggregate_cia(as_similarities(ms)).values; },
      py::arg("matrices"));
  m.def(
      "aggregate_wsa",
      [](const std::vector<DenseMatrix>& es, const std::vector<double>& w) {
        return aggregate_wsa(es, w);
      },
      py::arg("embeddings"), py::arg("weights"));
  m.def(
      "add_laplace_noise",
      [](const DenseMatrix& c, double delta, std::uint64_t seed, std::optional<double> clip_bound,
         std::optional<double> epsilon) {
        LdpConfig cfg{delta, clip_bound, epsilon};
        cfg.validate();
        auto rng = make_rng(seed);
        return add_symmetric_laplace_noise(c, cfg, rng);
      },
      py::arg("matrix"), py::arg("delta"), py::arg("seed") = 0, py::arg("clip_bound") = py::none(),
      py::arg("epsilon") = py::none());
  m.def(
      "l1_information_gap",
      [](const DenseMatrix& a, const DenseMatrix& b, std::int32_t i, std::int32_t j) {
        const auto g = l1_information_gap(a, b, i, j);
        return py::make_tuple(g.collaborative, g.weighted_sum);
      },
      py::arg("embeddings_a"), py::arg("embeddings_b"), py::arg("item_i"), py::arg("item_j"));

  m.def(
      "rank_items",
      [](const std::vector<double>& scores, const std::vector<std::int32_t>& excluded,
         std::int32_t cutoff) { return rank_items(scores, excluded, cutoff); },
      py::arg("scores"), py::arg("excluded") = std::vector<std::int32_t>{},
      py::arg("cutoff") = kDefaultEvalCutoff);
  m.def(
      "user_metrics",
      [](const std::vector<std::int32_t>& ranked, const std::vector<std::int32_t>& relevant,
         std::int32_t cutoff) {
        py::dict d;
        d["f1"] = f1_for_user(ranked, relevant, cutoff);
        d["mrr"] = reciprocal_rank_for_user(ranked, relevant, cutoff);
        d["ndcg"] = ndcg_for_user(ranked, relevant, cutoff);
        return d;
      },
      py::arg("ranked"), py::arg("relevant"), py::arg("cutoff") = kDefaultEvalCutoff);

  m.def(
      "expand_manifest_json",
      [](const std::string& text) {
        std::vector<std::string> out;
        for (const auto& cfg : expand_manifest(json::parse(text))) out.push_back(config_to_json(cfg).dump());
        return out;
      },
      py::arg("manifest_json"));
  m.def(
      "config_hash_json",
      [](const std::string& text) { return config_hash(config_from_json(json::parse(text))); },
      py::arg("config_json"));
  m.def(
      "run_experiment_json",
      [](const std::string& text, std::int32_t threads) {
        const auto cfg = config_from_json(json::parse(text));
        RunOptions options;
        options.threads = threads;
        ExperimentReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(cfg, options);
        }
        return report_to_string(report);
      },
      py::arg("config_json"), py::arg("threads") = 1);
}
