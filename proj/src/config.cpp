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

#include "sparsefed/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace sparsefed {

namespace {

using nlohmann::json;

/// Checked accessor for one JSON object level; records which keys were read
/// and rejects the rest, so typos fail loudly with their full path.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object())
      throw ConfigError(path_ + ": expected an object");
  }

  ~Section() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer() ||
        (v.is_number_integer() && !v.is_number_unsigned() &&
         v.get<std::int64_t>() < 0))
      throw ConfigError(where(key) + ": expected a non-negative integer");
    return v.get<std::size_t>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    return count(key, fallback);
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected a boolean");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::optional<std::string> maybe_text(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return text(key, "");
  }

  std::optional<std::size_t> maybe_count(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return count(key, 0);
  }

  std::optional<std::uint64_t> maybe_seed(const std::string& key) {
    return maybe_count(key);
  }

  /// Must run after all reads of this section.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.contains(it.key()))
        throw ConfigError("unknown key: " + where(it.key()));
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

const json kEmptyObject = json::object();

const json& child(Section& parent, const std::string& key) {
  if (!parent.has(key)) return kEmptyObject;
  const json& v = parent.raw(key);
  if (!v.is_object()) throw ConfigError(parent.where(key) + ": expected an object");
  return v;
}

AggregatorKind parse_aggregator_kind(const std::string& name,
                                     const std::string& path) {
  if (name == "mean") return AggregatorKind::Mean;
  if (name == "median") return AggregatorKind::Median;
  if (name == "trimmed_mean") return AggregatorKind::TrimmedMean;
  if (name == "krum") return AggregatorKind::Krum;
  if (name == "norm_clip") return AggregatorKind::NormClip;
  throw ConfigError(path + ": unknown aggregator \"" + name + "\"");
}

}  // namespace

ExperimentConfig parse_config(const json& root) {
  ExperimentConfig cfg;
  Section top(root, "");

  {
    Section s(child(top, "dataset"), "dataset");
    std::string kind = s.text("kind", "synthetic");
    if (kind == "movielens") {
      cfg.dataset.kind = DatasetConfig::Kind::Movielens;
      cfg.dataset.path = s.text("path", "");
      if (cfg.dataset.path.empty())
        throw ConfigError("dataset.path: required for movielens datasets");
    } else if (kind == "synthetic") {
      cfg.dataset.kind = DatasetConfig::Kind::Synthetic;
      cfg.dataset.path = s.text("path", "");
    } else {
      throw ConfigError("dataset.kind: unknown dataset kind \"" + kind + "\"");
    }
    auto& syn = cfg.dataset.synthetic;
    syn.n_users = s.count("users", syn.n_users);
    syn.n_items = s.count("items", syn.n_items);
    syn.interactions_per_user =
        s.count("interactions_per_user", syn.interactions_per_user);
    syn.exponent = s.number("exponent", syn.exponent);
    syn.seed = s.seed("seed", syn.seed);
    if (cfg.dataset.kind == DatasetConfig::Kind::Synthetic) {
      if (syn.exponent <= 1.0)
        throw ConfigError("dataset.exponent: must be > 1");
      if (syn.interactions_per_user == 0 || syn.interactions_per_user >= syn.n_items)
        throw ConfigError(
            "dataset.interactions_per_user: must be in [1, items)");
    }
    s.finish();
  }

  {
    Section s(child(top, "model"), "model");
    auto& m = cfg.federation.model;
    m.dim = s.count("dim", 32);
    m.learning_rate = s.number("learning_rate", 0.01);
    m.negatives_per_positive = s.count("negatives_per_positive", 1);
    if (m.dim == 0) throw ConfigError("model.dim: must be >= 1");
    if (m.learning_rate <= 0.0)
      throw ConfigError("model.learning_rate: must be > 0");
    if (m.negatives_per_positive == 0)
      throw ConfigError("model.negatives_per_positive: must be >= 1");
    s.finish();
  }

  {
    Section s(child(top, "federation"), "federation");
    auto& f = cfg.federation;
    f.epochs = s.count("epochs", 200);
    f.eval_every = s.count("eval_every", 1);
    f.seed = s.seed("seed", 42);
    f.workers = s.count("workers", 1);
    if (f.epochs == 0) throw ConfigError("federation.epochs: must be >= 1");
    if (f.eval_every == 0) throw ConfigError("federation.eval_every: must be >= 1");
    if (f.workers == 0) throw ConfigError("federation.workers: must be >= 1");
    s.finish();
  }

  {
    Section s(child(top, "aggregator"), "aggregator");
    auto& a = cfg.federation.aggregator;
    a.kind = parse_aggregator_kind(s.text("kind", "mean"), "aggregator.kind");
    a.trim_count = s.count("trim_count", 1);
    a.assumed_byzantine = s.count("assumed_byzantine", 1);
    a.clip_threshold = s.number("clip_threshold", 0.5);
    if (a.clip_threshold <= 0.0)
      throw ConfigError("aggregator.clip_threshold: must be > 0");
    s.finish();
  }

  {
    Section s(child(top, "attack"), "attack");
    auto& a = cfg.federation.attack;
    std::string kind = s.text("kind", "none");
    auto parsed = attack_from_name(kind);
    if (!parsed.has_value())
      throw ConfigError("attack.kind: unknown attack \"" + kind + "\"");
    a.kind = *parsed;
    a.malicious_ratio = s.number("malicious_ratio", 0.0);
    a.malicious_count = s.maybe_count("malicious_count");
    a.start_epoch = s.count("start_epoch", 0);
    a.max_poisoned_items = s.maybe_count("max_poisoned_items");
    a.noise_std = s.number("noise_std", 1.0);
    a.lie_scale = s.number("lie_scale", 0.1);
    a.lie_direction = s.number("lie_direction", 1.0);
    if (s.has("fang_scale_range")) {
      const json& r = s.raw("fang_scale_range");
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        throw ConfigError("attack.fang_scale_range: expected [lo, hi]");
      a.fang_scale_range = {r[0].get<double>(), r[1].get<double>()};
    }
    std::string norm = s.text("os_normalization", "per_item");
    if (norm == "per_item") {
      a.os_normalization = OsNormalization::PerItem;
    } else if (norm == "global") {
      a.os_normalization = OsNormalization::Global;
    } else {
      throw ConfigError("attack.os_normalization: expected per_item or global");
    }
    a.seed = s.maybe_seed("seed");
    if (a.malicious_ratio < 0.0 || a.malicious_ratio >= 1.0)
      throw ConfigError("attack.malicious_ratio: must be in [0, 1)");
    if (a.noise_std < 0.0) throw ConfigError("attack.noise_std: must be >= 0");
    if (a.lie_scale < 0.0) throw ConfigError("attack.lie_scale: must be >= 0");
    if (a.fang_scale_range[0] > a.fang_scale_range[1])
      throw ConfigError("attack.fang_scale_range: lo must be <= hi");
    if (a.max_poisoned_items.has_value() && *a.max_poisoned_items == 0)
      throw ConfigError("attack.max_poisoned_items: must be >= 1");
    if (a.kind != AttackKind::None && !a.malicious_count.has_value() &&
        a.malicious_ratio == 0.0)
      throw ConfigError(
          "attack.malicious_ratio: attack enabled but no malicious clients "
          "(set malicious_ratio or malicious_count)");
    s.finish();
  }

  {
    Section s(child(top, "evaluation"), "evaluation");
    cfg.federation.eval_seed = s.maybe_seed("seed");
    cfg.federation.eval_resample_per_epoch = s.flag("resample_per_epoch", false);
    cfg.federation.eval_pessimistic_ties = s.flag("pessimistic_ties", true);
    s.finish();
  }

  {
    Section s(child(top, "analysis"), "analysis");
    if (s.has("alphas")) {
      const json& arr = s.raw("alphas");
      if (!arr.is_array() || arr.empty())
        throw ConfigError("analysis.alphas: expected a nonempty array");
      cfg.analysis.alphas.clear();
      for (const auto& v : arr) {
        if (!v.is_number()) throw ConfigError("analysis.alphas: expected numbers");
        double alpha = v.get<double>();
        if (alpha <= 0.0 || alpha > 0.5)
          throw ConfigError("analysis.alphas: entries must be in (0, 0.5]");
        cfg.analysis.alphas.push_back(alpha);
      }
    }
    if (s.has("malicious_counts")) {
      const json& arr = s.raw("malicious_counts");
      if (!arr.is_array() || arr.empty())
        throw ConfigError("analysis.malicious_counts: expected a nonempty array");
      cfg.analysis.malicious_counts.clear();
      for (const auto& v : arr) {
        if (!v.is_number_integer() || (!v.is_number_unsigned() &&
                                       v.get<std::int64_t>() < 0))
          throw ConfigError("analysis.malicious_counts: expected non-negative integers");
        cfg.analysis.malicious_counts.push_back(v.get<std::size_t>());
      }
    }
    cfg.analysis.x_min = s.number("x_min", 1.0);
    if (cfg.analysis.x_min <= 0.0)
      throw ConfigError("analysis.x_min: must be > 0");
    s.finish();
  }

  {
    Section s(child(top, "output"), "output");
    cfg.output.epoch_csv = s.maybe_text("epoch_csv");
    cfg.output.summary_json = s.maybe_text("summary_json");
    cfg.output.round_log = s.maybe_text("round_log");
    cfg.output.plot_csv = s.maybe_text("plot_csv");
    cfg.output.run_label = s.text("run_label", "run");
    s.finish();
  }

  top.finish();
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(root);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  json root;
  json dataset;
  dataset["kind"] = cfg.dataset.kind == DatasetConfig::Kind::Movielens
                        ? "movielens"
                        : "synthetic";
  dataset["path"] = cfg.dataset.path;
  dataset["users"] = cfg.dataset.synthetic.n_users;
  dataset["items"] = cfg.dataset.synthetic.n_items;
  dataset["interactions_per_user"] = cfg.dataset.synthetic.interactions_per_user;
  dataset["exponent"] = cfg.dataset.synthetic.exponent;
  dataset["seed"] = cfg.dataset.synthetic.seed;
  root["dataset"] = dataset;

  const auto& f = cfg.federation;
  root["model"] = {{"dim", f.model.dim},
                   {"learning_rate", f.model.learning_rate},
                   {"negatives_per_positive", f.model.negatives_per_positive}};
  root["federation"] = {{"epochs", f.epochs},
                        {"eval_every", f.eval_every},
                        {"seed", f.seed},
                        {"workers", f.workers}};
  root["aggregator"] = {{"kind", aggregator_name(f.aggregator.kind)},
                        {"trim_count", f.aggregator.trim_count},
                        {"assumed_byzantine", f.aggregator.assumed_byzantine},
                        {"clip_threshold", f.aggregator.clip_threshold}};
  json attack;
  attack["kind"] = attack_name(f.attack.kind);
  attack["malicious_ratio"] = f.attack.malicious_ratio;
  attack["malicious_count"] =
      f.attack.malicious_count.has_value() ? json(*f.attack.malicious_count) : json();
  attack["start_epoch"] = f.attack.start_epoch;
  attack["max_poisoned_items"] = f.attack.max_poisoned_items.has_value()
                                     ? json(*f.attack.max_poisoned_items)
                                     : json();
  attack["noise_std"] = f.attack.noise_std;
  attack["lie_scale"] = f.attack.lie_scale;
  attack["lie_direction"] = f.attack.lie_direction;
  attack["fang_scale_range"] = {f.attack.fang_scale_range[0],
                                f.attack.fang_scale_range[1]};
  attack["os_normalization"] =
      f.attack.os_normalization == OsNormalization::PerItem ? "per_item" : "global";
  attack["seed"] = f.attack.seed.has_value() ? json(*f.attack.seed) : json();
  root["attack"] = attack;

  root["evaluation"] = {
      {"seed", f.eval_seed.has_value() ? json(*f.eval_seed) : json()},
      {"resample_per_epoch", f.eval_resample_per_epoch},
      {"pessimistic_ties", f.eval_pessimistic_ties}};
  root["analysis"] = {{"alphas", cfg.analysis.alphas},
                      {"malicious_counts", cfg.analysis.malicious_counts},
                      {"x_min", cfg.analysis.x_min}};
  auto text_or_null = [](const std::optional<std::string>& v) {
    return v.has_value() ? json(*v) : json();
  };
  root["output"] = {{"epoch_csv", text_or_null(cfg.output.epoch_csv)},
                    {"summary_json", text_or_null(cfg.output.summary_json)},
                    {"round_log", text_or_null(cfg.output.round_log)},
                    {"plot_csv", text_or_null(cfg.output.plot_csv)},
                    {"run_label", cfg.output.run_label}};
  return root;
}

std::filesystem::path resolve_data_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || std::filesystem::exists(p)) return p;
  if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir != '\0') {
    std::filesystem::path candidate = std::filesystem::path(dir) / p;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  return p;
}

Dataset load_dataset(const DatasetConfig& config) {
  if (config.kind == DatasetConfig::Kind::Movielens) {
    RawDataset raw = load_movielens(resolve_data_path(config.path));
    return leave_one_out_split(raw);
  }
  return generate_synthetic(config.synthetic);
}

}  // namespace sparsefed
