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

#include "awekws/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "awekws/embedders.hpp"
#include "awekws/error.hpp"
#include "awekws/losses.hpp"
#include "awekws/rng.hpp"

namespace awekws {
namespace {

Matrix<double> random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Vector<double> random_vector(Index n, Rng& rng) {
  Vector<double> v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

class Checker {
 public:
  Checker(std::string target, const GradCheckOptions& options) : options_(options) {
    report_.target = std::move(target);
  }

  // Compares analytic(i) with a central difference of loss() in value(i).
  void compare(double& value, double analytic, const std::function<double()>& loss) {
    const double saved = value;
    value = saved + options_.step;
    const double up = loss();
    value = saved - options_.step;
    const double down = loss();
    value = saved;
    const double numeric = (up - down) / (2.0 * options_.step);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), options_.floor});
    const double rel = std::abs(analytic - numeric) / denom;
    ++report_.entries;
    if (!(rel <= options_.tolerance)) ++report_.failures;
    report_.max_relative_error = std::max(report_.max_relative_error, std::isfinite(rel) ? rel : 1e300);
  }

  // One random coordinate of every tensor of the store.
  void compare_params(nn::ParameterStore<double>& params, const nn::ParameterStore<double>& grads, Rng& rng,
                      const std::function<double()>& loss) {
    for (std::size_t t = 0; t < params.size(); ++t) {
      const auto k = static_cast<Index>(rng.index(static_cast<std::uint64_t>(params.value(t).size())));
      compare(params.value(t).data()[k], grads.value(t).data()[k], loss);
    }
  }

  void compare_matrix(Matrix<double>& x, const Matrix<double>& grad, Rng& rng, const std::function<double()>& loss) {
    const auto k = static_cast<Index>(rng.index(static_cast<std::uint64_t>(x.size())));
    compare(x.data()[k], grad.data()[k], loss);
  }

  GradCheckReport finish(std::size_t trials) {
    report_.trials = trials;
    return report_;
  }

 private:
  GradCheckOptions options_;
  GradCheckReport report_;
};

void check_nt_xent(Checker& c, Rng& rng) {
  const Index n = 1 + static_cast<Index>(rng.index(8));
  const Index e = 2 + static_cast<Index>(rng.index(7));
  const double taus[] = {0.1, 0.5, 1.0};
  const double tau = taus[rng.index(3)];
  Matrix<double> a = random_matrix(n, e, rng);
  Matrix<double> p = random_matrix(n, e, rng);
  Matrix<double> da, dp;
  nt_xent_loss<double>(a, p, tau, &da, &dp);
  auto loss = [&] { return nt_xent_loss<double>(a, p, tau); };
  c.compare_matrix(a, da, rng, loss);
  c.compare_matrix(p, dp, rng, loss);
}

void check_reconstruction(Checker& c, Rng& rng) {
  const Index t = 1 + static_cast<Index>(rng.index(10));
  const Index d = 1 + static_cast<Index>(rng.index(8));
  Matrix<double> decoded = random_matrix(t, d, rng);
  const Matrix<double> target = random_matrix(t, d, rng);
  Matrix<double> grad;
  reconstruction_loss<double>(decoded, target, &grad);
  c.compare_matrix(decoded, grad, rng, [&] { return reconstruction_loss<double>(decoded, target); });
}

// Padded input: rows past `valid` hold junk that must not matter.
void check_transformer(Checker& c, Rng& rng, std::uint64_t seed) {
  nn::TransformerConfig cfg;
  cfg.input_dim = 5;
  cfg.model_dim = 8;
  cfg.n_heads = 2;
  cfg.n_layers = 2;
  cfg.ffn_dim = 12;
  cfg.awe_dim = 6;
  ContrastiveTransformer<double> model(cfg, seed);
  const Index rows = 3 + static_cast<Index>(rng.index(6));
  const Index valid = 1 + static_cast<Index>(rng.index(static_cast<std::uint64_t>(rows)));
  const Matrix<double> x = random_matrix(rows, cfg.input_dim, rng);
  const Vector<double> r = random_vector(cfg.awe_dim, rng);
  nn::TransformerCache<double> cache;
  model.forward(x, valid, cache);
  auto grads = model.params().zeros_like();
  model.backward(cache, r, grads);
  c.compare_params(model.params(), grads, rng, [&] {
    nn::TransformerCache<double> tmp;
    return r.dot(model.forward(x, valid, tmp));
  });
}

void check_rnn(Checker& c, Rng& rng, std::uint64_t seed) {
  nn::RnnConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden_dim = 6;
  cfg.n_layers = 2;
  cfg.awe_dim = 5;
  ContrastiveRnn<double> model(cfg, seed);
  const Index rows = 2 + static_cast<Index>(rng.index(7));
  const Matrix<double> x = random_matrix(rows, cfg.input_dim, rng);
  const Vector<double> r = random_vector(cfg.awe_dim, rng);
  nn::RnnEncoderCache<double> cache;
  model.forward(x, rows, cache);
  auto grads = model.params().zeros_like();
  model.backward(cache, r, grads);
  c.compare_params(model.params(), grads, rng, [&] {
    nn::RnnEncoderCache<double> tmp;
    return r.dot(model.forward(x, rows, tmp));
  });
}

void check_cae(Checker& c, Rng& rng, std::uint64_t seed) {
  nn::RnnConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden_dim = 5;
  cfg.n_layers = 2;
  cfg.awe_dim = 3;
  CaeRnn<double> model(cfg, seed);
  const Index rows = 2 + static_cast<Index>(rng.index(6));
  const Index target_rows = 2 + static_cast<Index>(rng.index(6));
  const Matrix<double> x = random_matrix(rows, cfg.input_dim, rng);
  const Matrix<double> target = random_matrix(target_rows, cfg.input_dim, rng);
  auto loss_and_grad = [&](nn::ParameterStore<double>* grads) {
    nn::RnnEncoderCache<double> enc;
    nn::RnnDecoderCache<double> dec;
    const Vector<double> awe = model.forward(x, rows, enc);
    const Matrix<double> out = model.decode(awe, target_rows, dec);
    Matrix<double> d_out;
    const double loss = reconstruction_loss<double>(out, target, grads ? &d_out : nullptr);
    if (grads) model.backward(enc, model.decode_backward(dec, d_out, *grads), *grads);
    return loss;
  };
  auto grads = model.params().zeros_like();
  loss_and_grad(&grads);
  c.compare_params(model.params(), grads, rng, [&] { return loss_and_grad(nullptr); });
}

}  // namespace

GradCheckReport gradcheck(const std::string& target, const GradCheckOptions& options) {
  require(options.trials >= 1, ErrorCode::kInvalidArgument, "gradcheck needs at least one trial");
  Checker checker(target, options);
  Rng rng(options.seed);
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const std::uint64_t seed = options.seed * 1000 + trial;
    if (target == "nt-xent") {
      check_nt_xent(checker, rng);
    } else if (target == "reconstruction") {
      check_reconstruction(checker, rng);
    } else if (target == "contrastive-transformer") {
      check_transformer(checker, rng, seed);
    } else if (target == "contrastive-rnn") {
      check_rnn(checker, rng, seed);
    } else if (target == "cae-rnn") {
      check_cae(checker, rng, seed);
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown gradcheck target '" + target + "'");
    }
  }
  return checker.finish(options.trials);
}

std::vector<GradCheckReport> gradcheck_all(const GradCheckOptions& options) {
  std::vector<GradCheckReport> out;
  for (const auto& t : gradcheck_targets()) out.push_back(gradcheck(t, options));
  return out;
}

}  // namespace awekws
