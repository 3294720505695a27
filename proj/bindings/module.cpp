/*
 * Copyright 2026 The sparsefed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsefed/config.hpp"
#include "sparsefed/report.hpp"

namespace py = pybind11;

namespace {

using sparsefed::ClientGradient;
using sparsefed::Vec;

std::vector<ClientGradient> to_gradients(const std::vector<Vec>& rows) {
  std::vector<ClientGradient> gradients;
  gradients.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    gradients.push_back(ClientGradient{static_cast<std::uint32_t>(i), rows[i]});
  return gradients;
}

py::dict report_to_dict(const sparsefed::EpochReport& r) {
  py::dict d;
  d["epoch"] = r.epoch;
  d["hr5"] = r.hr5;
  d["ndcg5"] = r.ndcg5;
  d["hr10"] = r.hr10;
  d["ndcg10"] = r.ndcg10;
  d["evaluated_users"] = r.evaluated_users;
  d["diverged"] = r.diverged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Federated recommendation simulator: BPR matrix factorization, "
            "per-item robust aggregation, poisoning attacks and power-law "
            "breakdown analysis";

  py::class_<sparsefed::Dataset>(m, "Dataset")
      .def_readonly("n_users", &sparsefed::Dataset::n_users)
      .def_readonly("n_items", &sparsefed::Dataset::n_items)
      .def_readonly("degrees", &sparsefed::Dataset::degrees)
      .def_property_readonly("train_size", &sparsefed::Dataset::train_size)
      .def_property_readonly("test_size", &sparsefed::Dataset::test_size)
      .def_property_readonly("sparsity", &sparsefed::Dataset::sparsity);

  m.def(
      "load_movielens",
      [](const std::string& path) {
        return sparsefed::leave_one_out_split(sparsefed::load_movielens(path));
      },
      py::arg("path"),
      "Load a MovieLens-style interaction file and apply the leave-one-out "
      "split.");

  m.def(
      "generate_synthetic",
      [](std::size_t users, std::size_t items, std::size_t interactions_per_user,
         double exponent, std::uint64_t seed) {
        return sparsefed::generate_synthetic(
            {users, items, interactions_per_user, exponent, seed});
      },
      py::arg("users"), py::arg("items"), py::arg("interactions_per_user"),
      py::arg("exponent") = 2.5, py::arg("seed") = 0,
      "Power-law popularity dataset with leave-one-out split applied.");

  m.def("predict_score",
        [](const Vec& u, const Vec& v) { return sparsefed::predict_score(u, v); });
  m.def("bpr_pair_loss", [](const Vec& u, const Vec& vp, const Vec& vn) {
    return sparsefed::bpr_pair_loss(u, vp, vn);
  });
  m.def("bpr_pair_gradient", [](const Vec& u, const Vec& vp, const Vec& vn) {
    auto g = sparsefed::bpr_pair_gradient(u, vp, vn);
    return py::make_tuple(g.user, g.pos_item, g.neg_item);
  });

  m.def("aggregate_mean", [](const std::vector<Vec>& rows) {
    return sparsefed::aggregate_item_mean(to_gradients(rows));
  });
  m.def("aggregate_median", [](const std::vector<Vec>& rows) {
    return sparsefed::aggregate_item_median(to_gradients(rows));
  });
  m.def("aggregate_trimmed_mean",
        [](const std::vector<Vec>& rows, std::size_t trim_count) {
          return sparsefed::aggregate_item_trimmed_mean(to_gradients(rows),
                                                        trim_count);
        });
  m.def("aggregate_krum", [](const std::vector<Vec>& rows, std::size_t f) {
    return sparsefed::aggregate_item_krum(to_gradients(rows), f);
  });
  m.def("aggregate_norm_clip", [](const std::vector<Vec>& rows, double tau) {
    return sparsefed::aggregate_item_norm_clip(to_gradients(rows), tau);
  });

  m.def("plan_malicious_count", &sparsefed::plan_malicious_count,
        py::arg("n_benign"), py::arg("rho"));

  m.def(
      "fit_power_law",
      [](const std::vector<double>& degrees, double x_min) {
        auto fit = sparsefed::fit_power_law(
            std::span<const double>(degrees), x_min);
        return py::make_tuple(fit.exponent, fit.normalization, fit.x_min);
      },
      py::arg("degrees"), py::arg("x_min") = 1.0,
      "Continuous MLE fit; returns (exponent, normalization, x_min).");
  m.def(
      "predicted_breakdown_fraction",
      [](double exponent, double normalization, double x_min, double alpha,
         std::size_t malicious_count) {
        sparsefed::PowerLawFit fit{exponent, normalization, x_min};
        return sparsefed::predicted_breakdown_fraction(
            fit, {alpha, malicious_count});
      },
      py::arg("exponent"), py::arg("normalization"), py::arg("x_min"),
      py::arg("alpha"), py::arg("malicious_count"));
  m.def(
      "empirical_breakdown_fraction",
      [](const std::vector<double>& degrees, double alpha,
         std::size_t malicious_count) {
        return sparsefed::empirical_breakdown_fraction(
            std::span<const double>(degrees), {alpha, malicious_count});
      },
      py::arg("degrees"), py::arg("alpha"), py::arg("malicious_count"));

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        auto cfg = sparsefed::parse_config(nlohmann::json::parse(config_json));
        sparsefed::Dataset dataset = sparsefed::load_dataset(cfg.dataset);
        sparsefed::Federation federation(dataset, cfg.federation);
        auto result = federation.run_experiment();
        py::list reports;
        for (const auto& r : result.reports) reports.append(report_to_dict(r));
        py::dict out;
        out["reports"] = reports;
        out["summary"] = py::module_::import("json").attr("loads")(
            sparsefed::summary_json(cfg, result, std::nullopt).dump());
        return out;
      },
      py::arg("config_json"),
      "Run a full experiment from a JSON config string; returns per-epoch "
      "reports and the summary.");

  m.def("epoch_csv", [](const std::string& config_json) {
    auto cfg = sparsefed::parse_config(nlohmann::json::parse(config_json));
    sparsefed::Dataset dataset = sparsefed::load_dataset(cfg.dataset);
    sparsefed::Federation federation(dataset, cfg.federation);
    return sparsefed::epoch_csv(federation.run_experiment().reports);
  });
}
