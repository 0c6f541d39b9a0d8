// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dsgd/objectives.hpp"
#include "dsgd/rng.hpp"

namespace dsgd {
namespace {

using ConstMatMap = Eigen::Map<const RowMatrix>;
using MatMap = Eigen::Map<RowMatrix>;

constexpr std::size_t kChunkRows = 2048;

}  // namespace

std::size_t MlpSpec::num_parameters() const {
  std::size_t total = 0;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    total += layer_sizes[l] * layer_sizes[l - 1];
    if (bias) total += layer_sizes[l];
  }
  return total;
}

MlpObjective::MlpObjective(MlpSpec spec, std::shared_ptr<const Dataset> data)
    : spec_(std::move(spec)), data_(std::move(data)) {
  if (spec_.layer_sizes.size() < 2) {
    throw std::invalid_argument("MlpObjective: need at least input and output sizes");
  }
  for (std::size_t s : spec_.layer_sizes) {
    if (s == 0) throw std::invalid_argument("MlpObjective: zero-width layer");
  }
  if (!data_ || data_->size() == 0) throw std::invalid_argument("MlpObjective: empty data");
  check_same_dim("MlpObjective input width", spec_.layer_sizes.front(), data_->num_features());
  check_same_dim("MlpObjective output width", spec_.layer_sizes.back(),
                 static_cast<std::size_t>(data_->num_classes()));
  dim_ = spec_.num_parameters();
}

double MlpObjective::evaluate(std::span<const double> w, const RowMatrix& x,
                              std::span<const int> labels, std::span<double> grad,
                              std::size_t* correct) const {
  const auto& sizes = spec_.layer_sizes;
  const std::size_t layers = sizes.size() - 1;
  const Eigen::Index rows = x.rows();

  // Forward pass. acts[0] is the input; acts[l] the post-activation of layer l.
  std::vector<RowMatrix> acts(layers + 1);
  acts[0] = x;
  std::size_t offset = 0;
  std::vector<std::size_t> offsets(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<Eigen::Index>(sizes[l]);
    const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
    offsets[l] = offset;
    ConstMatMap W(w.data() + offset, out, in);
    offset += sizes[l] * sizes[l + 1];
    acts[l + 1] = acts[l] * W.transpose();
    if (spec_.bias) {
      Eigen::Map<const Eigen::RowVectorXd> b(w.data() + offset, out);
      acts[l + 1].rowwise() += b;
      offset += sizes[l + 1];
    }
    if (l + 1 < layers) {
      if (spec_.activation == Activation::kRelu) {
        acts[l + 1] = acts[l + 1].cwiseMax(0.0);
      } else {
        acts[l + 1] = acts[l + 1].array().tanh().matrix();
      }
    }
  }

  // Softmax cross-entropy; `delta` becomes dLoss/dlogits (unnormalised sum).
  RowMatrix& logits = acts[layers];
  RowMatrix delta(rows, logits.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = logits.row(i);
    Eigen::Index argmax = 0;
    const double zmax = row.maxCoeff(&argmax);
    const double sum = (row.array() - zmax).exp().sum();
    const double lse = zmax + std::log(sum);
    const int y = labels[static_cast<std::size_t>(i)];
    loss += lse - row(y);
    if (correct != nullptr && argmax == y) ++*correct;
    if (!grad.empty()) {
      delta.row(i) = (row.array() - lse).exp().matrix();
      delta(i, y) -= 1.0;
    }
  }
  if (grad.empty()) return loss;

  // Backward pass, accumulating into grad.
  for (std::size_t l = layers; l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(sizes[l]);
    const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
    MatMap dW(grad.data() + offsets[l], out, in);
    dW.noalias() += delta.transpose() * acts[l];
    if (spec_.bias) {
      Eigen::Map<Eigen::RowVectorXd> db(grad.data() + offsets[l] + sizes[l] * sizes[l + 1], out);
      db += delta.colwise().sum();
    }
    if (l == 0) break;
    ConstMatMap W(w.data() + offsets[l], out, in);
    RowMatrix back = delta * W;
    if (spec_.activation == Activation::kRelu) {
      back = back.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
    } else {
      back = back.cwiseProduct((1.0 - acts[l].array().square()).matrix());
    }
    delta = std::move(back);
  }
  return loss;
}

double MlpObjective::evaluate_rows(std::span<const double> w, const Dataset& data,
                                   std::span<const std::size_t> rows, std::span<double> grad,
                                   std::size_t* correct) const {
  check_same_dim("MlpObjective weights", dim_, w.size());
  check_same_dim("MlpObjective input width", spec_.layer_sizes.front(), data.num_features());
  if (!grad.empty()) {
    check_same_dim("MlpObjective gradient", dim_, grad.size());
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  const bool all = rows.empty();
  const std::size_t m = all ? data.size() : rows.size();
  if (m == 0) throw std::invalid_argument("MlpObjective: empty batch");

  double loss = 0.0;
  RowMatrix x;
  std::vector<int> labels;
  for (std::size_t start = 0; start < m; start += kChunkRows) {
    const std::size_t len = std::min(kChunkRows, m - start);
    x.resize(static_cast<Eigen::Index>(len), data.features().cols());
    labels.resize(len);
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t i = all ? start + k : rows[start + k];
      x.row(static_cast<Eigen::Index>(k)) = data.features().row(static_cast<Eigen::Index>(i));
      labels[k] = data.labels()[i];
    }
    loss += evaluate(w, x, labels, grad, correct);
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  for (double& g : grad) g *= inv_m;
  return loss * inv_m;
}

double MlpObjective::value(std::span<const double> w) const {
  return evaluate_rows(w, *data_, {}, {}, nullptr);
}

double MlpObjective::value_and_gradient(std::span<const double> w, std::span<double> grad) const {
  return evaluate_rows(w, *data_, {}, grad, nullptr);
}

double MlpObjective::batch_value_and_gradient(std::span<const double> w,
                                              std::span<const std::size_t> batch,
                                              std::span<double> grad) const {
  if (batch.empty()) throw std::invalid_argument("MlpObjective: empty batch");
  return evaluate_rows(w, *data_, batch, grad, nullptr);
}

double MlpObjective::loss(std::span<const double> w, const Dataset& data) const {
  return evaluate_rows(w, data, {}, {}, nullptr);
}

double MlpObjective::accuracy(std::span<const double> w, const Dataset& data) const {
  std::size_t correct = 0;
  evaluate_rows(w, data, {}, {}, &correct);
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::vector<double> MlpObjective::initial_weights(std::uint64_t seed, double delta) const {
  std::vector<double> w(dim_, 0.0);
  Rng rng(seed);
  std::size_t offset = 0;
  const auto& sizes = spec_.layer_sizes;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
    const std::size_t count = sizes[l] * sizes[l + 1];
    for (std::size_t i = 0; i < count; ++i) w[offset + i] = (2.0 * rng.uniform() - 1.0) * limit;
    offset += count;
    if (spec_.bias) offset += sizes[l + 1];
  }
  if (delta > 0.0) {
    for (double& v : w) v = std::round(v / delta) * delta;
  }
  return w;
}

}  // namespace dsgd
