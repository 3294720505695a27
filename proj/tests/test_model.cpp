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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "sparsefed/model.hpp"

using namespace sparsefed;

namespace {

Vec random_vec(Rng& rng, std::size_t d, double scale = 1.0) {
  Vec v(d);
  for (auto& x : v) x = rng.normal(0.0, scale);
  return v;
}

// Central finite difference of the pair loss in one coordinate.
double loss_fd(Vec u, Vec vp, Vec vn, int which, std::size_t k, double h) {
  auto eval = [&] { return bpr_pair_loss(u, vp, vn); };
  Vec* target = which == 0 ? &u : which == 1 ? &vp : &vn;
  (*target)[k] += h;
  double plus = eval();
  (*target)[k] -= 2 * h;
  double minus = eval();
  return (plus - minus) / (2 * h);
}

}  // namespace

TEST_CASE("init_embeddings matches the target moments") {
  Rng rng(2024);
  Matrix m = init_embeddings(1000, 100, rng);  // 1e5 entries
  double sum = 0.0, sq = 0.0;
  for (double v : m.data) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(m.data.size());
  double mean = sum / n;
  double stddev = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 4.0 * kInitStd / std::sqrt(n));
  CHECK(stddev == doctest::Approx(kInitStd).epsilon(0.05));
}

TEST_CASE("init_embeddings is seed-deterministic") {
  Rng a(7), b(7);
  Matrix ma = init_embeddings(13, 8, a);
  Matrix mb = init_embeddings(13, 8, b);
  CHECK(ma.data == mb.data);  // bitwise
}

TEST_CASE("init_embeddings single entry") {
  Rng rng(1);
  Matrix m = init_embeddings(1, 1, rng);
  REQUIRE(m.data.size() == 1);
  CHECK(std::isfinite(m.data[0]));
}

TEST_CASE("predict_score basics") {
  CHECK(predict_score(Vec{0, 0}, Vec{0, 0}) == 0.0);
  CHECK(predict_score(Vec{1, 2}, Vec{3, 4}) == 11.0);
  CHECK_THROWS(predict_score(Vec{1.0}, Vec{1.0, 2.0}));
}

TEST_CASE("predict_score agrees with a naive loop") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Vec u = random_vec(rng, 16), v = random_vec(rng, 16);
    double naive = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) naive += u[k] * v[k];
    CHECK(predict_score(u, v) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("bpr_pair_loss at x = 0 is ln 2") {
  Vec u{0.3, -0.2}, v{0.1, 0.4};
  CHECK(bpr_pair_loss(u, v, v) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("bpr_pair_loss saturates toward zero for large margins") {
  Vec u{50.0}, vp{1.0}, vn{0.0};  // x = 50
  CHECK(bpr_pair_loss(u, vp, vn) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::isfinite(bpr_pair_loss(Vec{1000.0}, Vec{-1.0}, Vec{0.0})));
}

TEST_CASE("bpr_pair_loss matches the direct formula at moderate x") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Vec u = random_vec(rng, 8, 0.3), vp = random_vec(rng, 8, 0.3),
        vn = random_vec(rng, 8, 0.3);
    double x = predict_score(u, vp) - predict_score(u, vn);
    double direct = -std::log(1.0 / (1.0 + std::exp(-x)));
    CHECK(bpr_pair_loss(u, vp, vn) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("bpr_pair_gradient trivial identities") {
  Vec u{0.4, -0.6}, v{0.2, 0.3};
  PairGradient g = bpr_pair_gradient(u, v, v);
  CHECK(g.user[0] == 0.0);
  CHECK(g.user[1] == 0.0);
  CHECK(g.pos_item[0] == doctest::Approx(-0.5 * u[0]));
  CHECK(g.pos_item[1] == doctest::Approx(-0.5 * u[1]));

  PairGradient gz = bpr_pair_gradient(Vec{0, 0}, Vec{1, 2}, Vec{3, 4});
  CHECK(gz.pos_item == Vec{0, 0});
  CHECK(gz.neg_item == Vec{0, 0});
}

TEST_CASE("gradients match central finite differences on 100 random triples") {
  Rng rng(99);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.below(8);
    Vec u = random_vec(rng, d), vp = random_vec(rng, d), vn = random_vec(rng, d);
    PairGradient g = bpr_pair_gradient(u, vp, vn);
    for (std::size_t k = 0; k < d; ++k) {
      const double analytic[3] = {g.user[k], g.pos_item[k], g.neg_item[k]};
      for (int which = 0; which < 3; ++which) {
        double numeric = loss_fd(u, vp, vn, which, k, h);
        double denom = std::max(std::abs(numeric), 1e-6);
        CHECK(std::abs(analytic[which] - numeric) / denom < 1e-4);
      }
    }
  }
}

TEST_CASE("pos/neg item gradients are exactly antisymmetric") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Vec u = random_vec(rng, 6), vp = random_vec(rng, 6), vn = random_vec(rng, 6);
    PairGradient g = bpr_pair_gradient(u, vp, vn);
    for (std::size_t k = 0; k < 6; ++k)
      CHECK(g.pos_item[k] + g.neg_item[k] == 0.0);
  }
}

TEST_CASE("a small user step strictly decreases the pair loss") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Vec u = random_vec(rng, 8), vp = random_vec(rng, 8), vn = random_vec(rng, 8);
    PairGradient g = bpr_pair_gradient(u, vp, vn);
    double norm = 0.0;
    for (double x : g.user) norm += x * x;
    if (norm == 0.0) continue;
    double before = bpr_pair_loss(u, vp, vn);
    Vec stepped = u;
    for (std::size_t k = 0; k < 8; ++k) stepped[k] -= 0.01 * g.user[k];
    CHECK(bpr_pair_loss(stepped, vp, vn) < before);
  }
}

TEST_CASE("client_local_step on a degenerate pair") {
  Rng rng(21);
  Matrix items = init_embeddings(4, 3, rng);
  // make the positive and negative rows identical
  for (std::size_t k = 0; k < 3; ++k) items.row(2)[k] = items.row(1)[k];
  Vec user{0.3, -0.1, 0.7};
  std::uint32_t pos[] = {1}, neg[] = {2};
  LocalStepResult r = client_local_step(user, pos, neg, items, 0.01);
  CHECK(r.user_embedding == user);  // zero user gradient
  REQUIRE(r.item_gradients.size() == 2);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(r.item_gradients.at(1)[k] == -r.item_gradients.at(2)[k]);
}

TEST_CASE("client_local_step empty train list leaves the user unchanged") {
  Matrix items(3, 2);
  Vec user{0.5, 0.5};
  LocalStepResult r = client_local_step(user, {}, {}, items, 0.01);
  CHECK(r.user_embedding == user);
  CHECK(r.item_gradients.empty());
}

TEST_CASE("client_local_step support never leaves positives + negatives") {
  Rng rng(31);
  Matrix items = init_embeddings(30, 4, rng);
  Vec user = random_vec(rng, 4, 0.1);
  std::vector<std::uint32_t> pos{3, 7, 7, 12}, neg{1, 20, 8, 29};
  LocalStepResult r = client_local_step(user, pos, neg, items, 0.01);
  CHECK(r.item_gradients.size() <= 2 * pos.size());
  for (const auto& [item, grad] : r.item_gradients) {
    bool known = false;
    for (auto p : pos) known = known || p == item;
    for (auto n : neg) known = known || n == item;
    CHECK(known);
  }
}

TEST_CASE("client_local_step equals an independent pair-by-pair accumulation") {
  Rng rng(41);
  Matrix items = init_embeddings(25, 5, rng);
  Vec user = random_vec(rng, 5, 0.2);
  std::vector<std::uint32_t> pos, neg;
  for (int i = 0; i < 12; ++i) {
    pos.push_back(static_cast<std::uint32_t>(rng.below(25)));
    neg.push_back(static_cast<std::uint32_t>(rng.below(25)));
  }
  LocalStepResult r = client_local_step(user, pos, neg, items, 0.01);

  // Oracle: recompute every pair gradient from scratch and sum by hand.
  std::map<std::uint32_t, Vec> expected;
  Vec user_grad(5, 0.0);
  for (std::size_t p = 0; p < pos.size(); ++p) {
    PairGradient g = bpr_pair_gradient(user, items.row(pos[p]), items.row(neg[p]));
    for (std::size_t k = 0; k < 5; ++k) user_grad[k] += g.user[k];
    auto& ps = expected[pos[p]];
    if (ps.empty()) ps.assign(5, 0.0);
    auto& ns = expected[neg[p]];
    if (ns.empty()) ns.assign(5, 0.0);
    for (std::size_t k = 0; k < 5; ++k) {
      ps[k] += g.pos_item[k];
      ns[k] += g.neg_item[k];
    }
  }
  REQUIRE(r.item_gradients.size() == expected.size());
  for (const auto& [item, grad] : expected) {
    REQUIRE(r.item_gradients.count(item) == 1);
    for (std::size_t k = 0; k < 5; ++k)
      CHECK(std::abs(r.item_gradients.at(item)[k] - grad[k]) < 1e-12);
  }
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(r.user_embedding[k] ==
          doctest::Approx(user[k] - 0.01 * user_grad[k]).epsilon(1e-12));
}
