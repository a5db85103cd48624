// Copyright 2026 The awekws Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <set>

#include "awekws/embedders.hpp"
#include "awekws/error.hpp"
#include "awekws/nn/adam.hpp"
#include "awekws/nn/layers.hpp"
#include "support.hpp"

using namespace awekws;
using namespace awekws::nn;
using awekws::testing::random_matrix;
using awekws::testing::random_vector;

namespace {

TransformerConfig small_transformer() {
  TransformerConfig c;
  c.input_dim = 6;
  c.model_dim = 8;
  c.n_heads = 2;
  c.n_layers = 2;
  c.ffn_dim = 16;
  c.awe_dim = 5;
  return c;
}

RnnConfig small_rnn() {
  RnnConfig c;
  c.input_dim = 3;
  c.hidden_dim = 4;
  c.n_layers = 2;
  c.awe_dim = 5;
  return c;
}

double max_abs_diff(const ParameterStore<double>& a, const ParameterStore<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a.value(i) - b.value(i)).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

TEST_CASE("linear layer with identity weight: dL/dx of 1/2 |y|^2 is x") {
  ParameterStore<double> p;
  Rng rng(1);
  Linear l = Linear::create(p, "l", 4, 4, rng);
  p[l.weight].setIdentity();
  auto g = p.zeros_like();
  const Matrix<double> x = random_matrix<double>(3, 4, rng);
  const Matrix<double> y = l.forward(p, x);
  CHECK(y == x);
  const Matrix<double> dx = l.backward(p, g, x, y);  // dL/dy = y
  CHECK((dx - x).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("linear forward matches explicit sums") {
  ParameterStore<double> p;
  Rng rng(2);
  Linear l = Linear::create(p, "l", 3, 2, rng);
  p[l.bias] << 0.5, -1.0;
  const Matrix<double> x = random_matrix<double>(4, 3, rng);
  const Matrix<double> y = l.forward(p, x);
  for (Index r = 0; r < 4; ++r) {
    for (Index o = 0; o < 2; ++o) {
      double s = p[l.bias](0, o);
      for (Index i = 0; i < 3; ++i) s += p[l.weight](o, i) * x(r, i);
      CHECK(std::abs(y(r, o) - s) < 1e-14);
    }
  }
}

TEST_CASE("layer norm standardizes each row") {
  ParameterStore<double> p;
  LayerNorm ln = LayerNorm::create(p, "ln", 6);
  Rng rng(3);
  const Matrix<double> x = random_matrix<double>(5, 6, rng, 4.0);
  LayerNormCache<double> cache;
  const Matrix<double> y = ln.forward(p, x, cache);
  for (Index r = 0; r < y.rows(); ++r) {
    CHECK(std::abs(y.row(r).mean()) < 1e-12);
    CHECK(std::abs(y.row(r).squaredNorm() / 6.0 - 1.0) < 1e-8);
  }
}

TEST_CASE("masked softmax gives exact zeros to masked keys") {
  Rng rng(4);
  Matrix<double> s = random_matrix<double>(4, 4, rng);
  masked_softmax_rows(s, 2);
  for (Index r = 0; r < 4; ++r) {
    CHECK(s(r, 2) == 0.0);
    CHECK(s(r, 3) == 0.0);
    CHECK(std::abs(s.row(r).sum() - 1.0) < 1e-15);
  }
}

TEST_CASE("parameter store") {
  ParameterStore<float> p;
  p.add("a", 2, 3);
  CHECK_THROWS_AS(p.add("a", 1, 1), Error);
  CHECK_THROWS_AS(p.add("empty", 0, 1), Error);
  p.add("b", 1, 4);
  CHECK(p.num_scalars() == 10);
  p.value(0).setConstant(0.25f);
  const auto d = p.cast<double>();
  CHECK(d.value(0)(1, 2) == 0.25);
  CHECK(d.name(1) == "b");

  ParameterStore<float> q;
  q.add("a", 2, 3);
  q.add("b", 1, 4);
  q.assign_from(d);
  CHECK(q.value(0) == p.value(0));

  ParameterStore<float> wrong;
  wrong.add("a", 3, 2);
  CHECK_THROWS_AS(wrong.assign_from(d), Error);

  ContrastiveTransformer<float> model(small_transformer(), 1);
  std::set<std::string> names;
  for (std::size_t i = 0; i < model.params().size(); ++i) names.insert(model.params().name(i));
  CHECK(names.size() == model.params().size());
}

TEST_CASE("adam") {
  SUBCASE("first step on p=0, g=1, lr=0.1 lands at -0.1") {
    ParameterStore<double> p;
    p.add("p", 1, 1);
    auto g = p.zeros_like();
    g.value(0)(0, 0) = 1.0;
    AdamConfig cfg;
    cfg.learning_rate = 0.1;
    Adam<double> adam(p, cfg);
    adam.step(p, g);
    // m_hat = 1, v_hat = 1 after bias correction: p = -0.1 * 1 / (1 + 1e-8)
    CHECK(std::abs(p.value(0)(0, 0) - (-0.1 / (1.0 + 1e-8))) < 1e-15);
  }
  SUBCASE("zero gradients leave parameters unchanged") {
    ParameterStore<double> p;
    p.add("p", 2, 2);
    p.value(0) << 1, 2, 3, 4;
    const auto before = p.value(0);
    Adam<double> adam(p, {});
    for (int i = 0; i < 3; ++i) adam.step(p, p.zeros_like());
    CHECK(p.value(0) == before);
  }
  SUBCASE("non-finite gradients are refused") {
    ParameterStore<double> p;
    p.add("p", 1, 1);
    auto g = p.zeros_like();
    g.value(0)(0, 0) = std::nan("");
    Adam<double> adam(p, {});
    CHECK_THROWS_AS(adam.step(p, g), Error);
  }
  SUBCASE("two identical 100-step runs are bitwise identical") {
    auto run = [] {
      ContrastiveRnn<double> model(small_rnn(), 5);
      Adam<double> adam(model.params(), {});
      Rng rng(6);
      for (int s = 0; s < 100; ++s) {
        const Matrix<double> x = random_matrix<double>(4, 3, rng);
        RnnEncoderCache<double> cache;
        const Vector<double> awe = model.forward(x, 4, cache);
        auto g = model.params().zeros_like();
        model.backward(cache, awe, g);  // descend 1/2 |awe|^2
        adam.step(model.params(), g);
      }
      return model.params();
    };
    CHECK(max_abs_diff(run(), run()) == 0.0);
  }
}

TEST_CASE("transformer embedder") {
  SUBCASE("default output is 256-dimensional") {
    TransformerConfig c;
    c.input_dim = 4;
    c.model_dim = 16;
    c.ffn_dim = 32;
    ContrastiveTransformer<float> model(c, 1);
    Rng rng(1);
    CHECK(model.embed(random_matrix(7, 4, rng)).size() == 256);
  }
  SUBCASE("different inputs give different outputs") {
    ContrastiveTransformer<double> model(small_transformer(), 2);
    Rng rng(2);
    const auto a = model.embed(random_matrix<double>(5, 6, rng));
    const auto b = model.embed(random_matrix<double>(5, 6, rng));
    CHECK((a - b).norm() > 1e-3);
  }
  SUBCASE("padding rows change neither output nor gradients") {
    ContrastiveTransformer<double> model(small_transformer(), 3);
    Rng rng(3);
    // Batch with lengths [3, 1], T_max = 3; item 2 has two padded rows.
    Matrix<double> item = random_matrix<double>(3, 6, rng);
    const Vector<double> r = random_vector(5, rng);
    auto run = [&](const Matrix<double>& x) {
      TransformerCache<double> cache;
      const Vector<double> out = model.forward(x, 1, cache);
      auto g = model.params().zeros_like();
      model.backward(cache, r, g);
      return std::make_pair(out, g);
    };
    const auto [out1, g1] = run(item);
    item.bottomRows(2) = random_matrix<double>(2, 6, rng, 100.0);
    const auto [out2, g2] = run(item);
    CHECK(out1 == out2);
    CHECK(max_abs_diff(g1, g2) == 0.0);
    // And equal to running the unpadded sequence.
    CHECK((model.embed(item.topRows(1)) - out1).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("padded batch embedding equals per-item embedding") {
    ContrastiveTransformer<double> model(small_transformer(), 4);
    Rng rng(4);
    std::vector<Matrix<double>> seqs = {random_matrix<double>(3, 6, rng), random_matrix<double>(1, 6, rng),
                                        random_matrix<double>(5, 6, rng)};
    const auto batch = make_padded_batch(seqs, 7.0);
    const Matrix<double> out = model.embed_batch(batch);
    for (std::size_t b = 0; b < seqs.size(); ++b) {
      CHECK((out.row(static_cast<Index>(b)).transpose() - model.embed(seqs[b])).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("wrong feature dim") {
    ContrastiveTransformer<float> model(small_transformer(), 1);
    Rng rng(1);
    try {
      model.embed(random_matrix(3, 5, rng));
      FAIL("expected DimMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDimMismatch);
    }
  }
}

TEST_CASE("GRU encoder") {
  SUBCASE("a single frame is one cell update from zero, projected") {
    RnnConfig c = small_rnn();
    c.n_layers = 1;
    ContrastiveRnn<double> model(c, 7);
    const auto& p = model.params();
    Rng rng(7);
    const Matrix<double> x = random_matrix<double>(1, 3, rng);
    const auto& wx = p[p.find("encoder.gru0.input_weight")];
    const auto& bx = p[p.find("encoder.gru0.input_bias")];
    const auto& bh = p[p.find("encoder.gru0.hidden_bias")];
    const Index h = c.hidden_dim;
    Vector<double> state(h);
    for (Index k = 0; k < h; ++k) {
      auto pre = [&](Index gate) {
        double s = bx(0, gate * h + k);
        for (Index i = 0; i < 3; ++i) s += wx(gate * h + k, i) * x(0, i);
        return s;
      };
      const double r = 1.0 / (1.0 + std::exp(-(pre(0) + bh(0, k))));
      const double z = 1.0 / (1.0 + std::exp(-(pre(1) + bh(0, h + k))));
      const double n = std::tanh(pre(2) + r * bh(0, 2 * h + k));
      state(k) = (1.0 - z) * n;
    }
    const auto& w = p[p.find("encoder.projection.weight")];
    const auto& b = p[p.find("encoder.projection.bias")];
    const Vector<double> expected = w * state + b.row(0).transpose();
    CHECK((model.embed(x) - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("order matters") {
    ContrastiveRnn<double> model(small_rnn(), 8);
    Rng rng(8);
    const Matrix<double> x = random_matrix<double>(6, 3, rng);
    const Matrix<double> reversed = x.colwise().reverse();
    CHECK((model.embed(x) - model.embed(reversed)).norm() > 1e-6);
  }
  SUBCASE("valid_frames ignores trailing rows") {
    ContrastiveRnn<double> model(small_rnn(), 9);
    Rng rng(9);
    const Matrix<double> x = random_matrix<double>(5, 3, rng);
    RnnEncoderCache<double> cache;
    CHECK(model.forward(x, 3, cache) == model.embed(x.topRows(3)));
  }
}

TEST_CASE("CAE decoder shapes") {
  CaeRnn<double> model(small_rnn(), 10);
  Rng rng(10);
  const Vector<double> awe = model.embed(random_matrix<double>(4, 3, rng));
  CHECK(model.decode(awe, 1).rows() == 1);
  for (Index len : {1, 2, 9}) {
    const Matrix<double> out = model.decode(awe, len);
    CHECK(out.rows() == len);
    CHECK(out.cols() == 3);
  }
  // The first step only depends on the AWE, so it is shared by every length.
  CHECK((model.decode(awe, 1).row(0) - model.decode(awe, 5).row(0)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(model.decode(awe, 0), Error);
}
