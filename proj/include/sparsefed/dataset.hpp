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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsefed/rng.hpp"

namespace sparsefed {

struct Interaction {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  std::int64_t timestamp = 0;  // seconds, 0 if absent
};

/// Implicit-feedback interactions after dense re-indexing and deduplication,
/// before the train/test split.
struct RawDataset {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::vector<Interaction> interactions;   // deduplicated positives
  std::vector<std::int64_t> user_id_map;   // dense index -> original id
  std::vector<std::int64_t> item_id_map;
};

/// Leave-one-out view: per-user train lists, at most one held-out test
/// interaction per user, and per-item train degrees.
class Dataset {
 public:
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::vector<std::vector<Interaction>> train;        // ordered (timestamp, item)
  std::vector<std::optional<Interaction>> test;       // absent for 1-interaction users
  std::vector<std::uint32_t> degrees;                 // per item, over train only
  std::vector<std::int64_t> user_id_map;
  std::vector<std::int64_t> item_id_map;

  std::size_t train_size() const;
  std::size_t test_size() const;
  std::size_t interaction_count() const { return train_size() + test_size(); }
  double sparsity() const;  // 1 - edges / (n * m)

  /// Items the user ever interacted with (train + test), ascending.
  const std::vector<std::uint32_t>& user_items(std::size_t user) const {
    return user_items_[user];
  }

  /// Largest per-user train list, i.e. the default poisoned-item budget.
  std::size_t max_train_interactions() const;

  void finalize();  // rebuild user_items_ and degrees from train/test

 private:
  std::vector<std::vector<std::uint32_t>> user_items_;
};

struct SyntheticSpec {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t interactions_per_user = 0;
  double exponent = 2.5;  // power-law beta > 1
  std::uint64_t seed = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  std::size_t line_number;
};

/// Reads a MovieLens-style file (user, item, rating, timestamp per line,
/// tab or "::" separated). Ratings are discarded, ids are densely re-indexed
/// and duplicate (user, item) pairs keep the earliest timestamp.
RawDataset load_movielens(const std::filesystem::path& path);

/// Latest interaction per user (ties: larger item index) goes to test; users
/// with a single interaction keep it in train and have no test entry.
Dataset leave_one_out_split(const RawDataset& raw);

/// `count` distinct items the user never interacted with, uniform.
std::vector<std::uint32_t> sample_train_negatives(const Dataset& dataset,
                                                  std::size_t user,
                                                  std::size_t count, Rng& rng);

/// 100 distinct never-interacted items for ranking evaluation.
std::vector<std::uint32_t> sample_eval_negatives(const Dataset& dataset,
                                                 std::size_t user, Rng& rng);

inline constexpr std::size_t kEvalNegativeCount = 100;

/// Power-law popularity dataset: item at rank r is drawn with weight
/// (r+1)^(-beta), without replacement within a user; timestamps follow draw
/// order so the split keeps the last draw as test.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace sparsefed
