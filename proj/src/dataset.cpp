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

#include "sparsefed/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>

namespace sparsefed {

std::size_t Dataset::train_size() const {
  std::size_t total = 0;
  for (const auto& list : train) total += list.size();
  return total;
}

std::size_t Dataset::test_size() const {
  std::size_t total = 0;
  for (const auto& t : test)
    if (t.has_value()) ++total;
  return total;
}

double Dataset::sparsity() const {
  if (n_users == 0 || n_items == 0) return 1.0;
  return 1.0 - static_cast<double>(interaction_count()) /
                   (static_cast<double>(n_users) * static_cast<double>(n_items));
}

std::size_t Dataset::max_train_interactions() const {
  std::size_t best = 0;
  for (const auto& list : train) best = std::max(best, list.size());
  return best;
}

void Dataset::finalize() {
  degrees.assign(n_items, 0);
  user_items_.assign(n_users, {});
  for (std::size_t u = 0; u < n_users; ++u) {
    auto& items = user_items_[u];
    items.reserve(train[u].size() + 1);
    for (const auto& it : train[u]) {
      ++degrees[it.item];
      items.push_back(it.item);
    }
    if (test[u].has_value()) items.push_back(test[u]->item);
    std::sort(items.begin(), items.end());
  }
}

namespace {

struct ParsedLine {
  std::int64_t user, item, rating, timestamp;
};

// Accepts tab- or "::"-separated fields; the rating field may be fractional.
bool parse_line(const std::string& line, ParsedLine& out) {
  std::vector<std::string> fields;
  if (line.find("::") != std::string::npos) {
    std::size_t pos = 0;
    while (true) {
      std::size_t next = line.find("::", pos);
      if (next == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, next - pos));
      pos = next + 2;
    }
  } else {
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find_first_of("\t ", pos);
      if (next == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, next - pos));
      pos = next + 1;
    }
  }
  fields.erase(std::remove_if(fields.begin(), fields.end(),
                              [](const std::string& f) { return f.empty(); }),
               fields.end());
  if (fields.size() < 2 || fields.size() > 4) return false;

  auto to_int = [](const std::string& s, std::int64_t& v) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };
  if (!to_int(fields[0], out.user) || !to_int(fields[1], out.item)) return false;
  out.rating = 1;
  out.timestamp = 0;
  if (fields.size() >= 3) {
    double r = 0;
    try {
      r = std::stod(fields[2]);
    } catch (...) {
      return false;
    }
    out.rating = static_cast<std::int64_t>(r);
  }
  if (fields.size() == 4 && !to_int(fields[3], out.timestamp)) return false;
  return out.user > 0 && out.item > 0;
}

}  // namespace

RawDataset load_movielens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

  // original (user, item) -> earliest timestamp
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> earliest;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ParsedLine p{};
    if (!parse_line(line, p))
      throw ParseError("malformed interaction line", line_number);
    auto key = std::make_pair(p.user, p.item);
    auto [it, inserted] = earliest.emplace(key, p.timestamp);
    if (!inserted) it->second = std::min(it->second, p.timestamp);
  }
  if (earliest.empty())
    throw std::runtime_error("dataset file holds no interactions: " + path.string());

  RawDataset raw;
  {
    std::vector<std::int64_t> users, items;
    for (const auto& [key, ts] : earliest) {
      users.push_back(key.first);
      items.push_back(key.second);
    }
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    raw.user_id_map = std::move(users);
    raw.item_id_map = std::move(items);
  }
  raw.n_users = raw.user_id_map.size();
  raw.n_items = raw.item_id_map.size();

  auto dense = [](const std::vector<std::int64_t>& map, std::int64_t id) {
    auto it = std::lower_bound(map.begin(), map.end(), id);
    return static_cast<std::uint32_t>(it - map.begin());
  };
  raw.interactions.reserve(earliest.size());
  for (const auto& [key, ts] : earliest) {
    raw.interactions.push_back(Interaction{dense(raw.user_id_map, key.first),
                                           dense(raw.item_id_map, key.second), ts});
  }
  return raw;
}

Dataset leave_one_out_split(const RawDataset& raw) {
  Dataset ds;
  ds.n_users = raw.n_users;
  ds.n_items = raw.n_items;
  ds.user_id_map = raw.user_id_map;
  ds.item_id_map = raw.item_id_map;
  ds.train.assign(ds.n_users, {});
  ds.test.assign(ds.n_users, std::nullopt);

  std::vector<std::vector<Interaction>> per_user(ds.n_users);
  for (const auto& it : raw.interactions) per_user[it.user].push_back(it);

  for (std::size_t u = 0; u < ds.n_users; ++u) {
    auto& list = per_user[u];
    std::sort(list.begin(), list.end(), [](const Interaction& a, const Interaction& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.item < b.item;
    });
    if (list.size() >= 2) {
      ds.test[u] = list.back();  // latest; ties resolved to the larger item
      list.pop_back();
    }
    ds.train[u] = std::move(list);
  }
  ds.finalize();
  return ds;
}

namespace {

// Distinct uniform draws from {0..n_items-1} \ user_items. Rejection sampling
// while candidates are plentiful, explicit partial shuffle otherwise.
std::vector<std::uint32_t> sample_distinct_negatives(const Dataset& dataset,
                                                     std::size_t user,
                                                     std::size_t count, Rng& rng) {
  const auto& owned = dataset.user_items(user);
  const std::size_t m = dataset.n_items;
  if (owned.size() >= m)
    throw std::runtime_error("user has interacted with every item");
  const std::size_t candidates = m - owned.size();
  if (count > candidates)
    throw std::runtime_error("not enough non-interacted items to sample from");

  auto is_owned = [&owned](std::uint32_t item) {
    return std::binary_search(owned.begin(), owned.end(), item);
  };

  std::vector<std::uint32_t> result;
  result.reserve(count);
  if (count * 2 <= candidates) {
    std::vector<std::uint32_t> taken;  // kept sorted, usually tiny
    while (result.size() < count) {
      auto item = static_cast<std::uint32_t>(rng.below(m));
      if (is_owned(item)) continue;
      auto pos = std::lower_bound(taken.begin(), taken.end(), item);
      if (pos != taken.end() && *pos == item) continue;
      taken.insert(pos, item);
      result.push_back(item);
    }
  } else {
    std::vector<std::uint32_t> pool;
    pool.reserve(candidates);
    for (std::uint32_t item = 0; item < m; ++item)
      if (!is_owned(item)) pool.push_back(item);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      result.push_back(pool[i]);
    }
  }
  return result;
}

}  // namespace

std::vector<std::uint32_t> sample_train_negatives(const Dataset& dataset,
                                                  std::size_t user,
                                                  std::size_t count, Rng& rng) {
  if (count == 0) throw std::invalid_argument("negative sample count must be >= 1");
  return sample_distinct_negatives(dataset, user, count, rng);
}

std::vector<std::uint32_t> sample_eval_negatives(const Dataset& dataset,
                                                 std::size_t user, Rng& rng) {
  const auto& owned = dataset.user_items(user);
  if (dataset.n_items < owned.size() + kEvalNegativeCount)
    throw std::runtime_error("fewer than 100 candidate negatives for evaluation");
  return sample_distinct_negatives(dataset, user, kEvalNegativeCount, rng);
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_users == 0 || spec.n_items == 0)
    throw std::invalid_argument("synthetic spec needs users and items");
  if (spec.exponent <= 1.0)
    throw std::invalid_argument("power-law exponent must be > 1");
  if (spec.interactions_per_user == 0 ||
      spec.interactions_per_user >= spec.n_items)
    throw std::invalid_argument(
        "interactions_per_user must be in [1, n_items)");

  std::vector<double> weight(spec.n_items);
  for (std::size_t r = 0; r < spec.n_items; ++r)
    weight[r] = std::pow(static_cast<double>(r + 1), -spec.exponent);

  RawDataset raw;
  raw.n_users = spec.n_users;
  raw.n_items = spec.n_items;
  raw.user_id_map.resize(spec.n_users);
  raw.item_id_map.resize(spec.n_items);
  std::iota(raw.user_id_map.begin(), raw.user_id_map.end(), 0);
  std::iota(raw.item_id_map.begin(), raw.item_id_map.end(), 0);
  raw.interactions.reserve(spec.n_users * spec.interactions_per_user);

  const std::size_t k = spec.interactions_per_user;
  std::vector<std::pair<double, std::uint32_t>> keys(spec.n_items);
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    Rng rng = Rng::substream(spec.seed, Stream::kSynthetic, u);
    // Weighted sampling without replacement via exponential keys; ascending
    // key order reproduces the sequential draw order.
    for (std::size_t j = 0; j < spec.n_items; ++j) {
      double key = -std::log(1.0 - rng.unit()) / weight[j];
      keys[j] = {key, static_cast<std::uint32_t>(j)};
    }
    std::nth_element(keys.begin(), keys.begin() + (k - 1), keys.end());
    std::sort(keys.begin(), keys.begin() + k);
    for (std::size_t d = 0; d < k; ++d) {
      raw.interactions.push_back(Interaction{static_cast<std::uint32_t>(u),
                                             keys[d].second,
                                             static_cast<std::int64_t>(d)});
    }
  }
  return leave_one_out_split(raw);
}

}  // namespace sparsefed
