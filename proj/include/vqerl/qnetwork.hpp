// Copyright 2026 The vqerl Authors.
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

#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace vqerl {

inline std::uint64_t fnv1a(const void* data, std::size_t bytes,
                           std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(std::string_view s) { return fnv1a(s.data(), s.size()); }

/// Fully connected network with ReLU hidden layers and a linear output
/// layer. All weights live in one flat parameter vector: per layer the weight
/// matrix (out x in, column-major) followed by the bias.
class QNetwork {
 public:
  using Matrix = Eigen::MatrixXd;
  using Vector = Eigen::VectorXd;

  QNetwork() = default;

  /// `sizes` = {inputs, hidden..., outputs}. Weights use He-uniform
  /// initialization, biases start at zero.
  QNetwork(std::vector<int> sizes, std::mt19937_64& rng) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("network needs input and output sizes");
    for (int s : sizes_)
      if (s < 1) throw std::invalid_argument("layer sizes must be positive");
    params_ = Vector::Zero(parameter_count(sizes_));
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const int in = sizes_[l], out = sizes_[l + 1];
      const double bound = std::sqrt(6.0 / in);
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (int k = 0; k < in * out; ++k) params_(off + k) = dist(rng);
      off += static_cast<std::size_t>(in) * out + out;
    }
  }

  static std::size_t parameter_count(const std::vector<int>& sizes) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
      n += static_cast<std::size_t>(sizes[l]) * sizes[l + 1] + sizes[l + 1];
    return n;
  }

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const Vector& parameters() const { return params_; }
  Vector& parameters() { return params_; }

  /// Columns of `x` are samples; returns one column of Q-values per sample.
  Matrix forward(const Matrix& x) const {
    check_input(x);
    Matrix a = x;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      Matrix z = weight(l, off) * a;
      z.colwise() += bias(l, off);
      off += layer_params(l);
      a = (l + 2 < sizes_.size()) ? Matrix(z.cwiseMax(0.0)) : z;
    }
    return a;
  }

  Vector forward(std::span<const double> x) const {
    Matrix m = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
    return forward(m).col(0);
  }

  /// Gradient of sum_ij dout_ij * Q_ij(x) with respect to the parameters.
  Vector backward(const Matrix& x, const Matrix& dout) const {
    check_input(x);
    const std::size_t layers = sizes_.size() - 1;
    std::vector<Matrix> acts{x};  // a_0 .. a_{layers-1}
    std::vector<Matrix> pre;      // z_1 .. z_{layers-1} (hidden only)
    std::vector<std::size_t> offs;
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
      offs.push_back(off);
      if (l + 1 < layers) {
        Matrix z = weight(l, off) * acts.back();
        z.colwise() += bias(l, off);
        acts.push_back(z.cwiseMax(0.0));
        pre.push_back(std::move(z));
      }
      off += layer_params(l);
    }

    Vector grad = Vector::Zero(params_.size());
    Matrix delta = dout;
    for (std::size_t l = layers; l-- > 0;) {
      const int in = sizes_[l], out = sizes_[l + 1];
      Eigen::Map<Matrix> gw(grad.data() + offs[l], out, in);
      gw.noalias() = delta * acts[l].transpose();
      grad.segment(offs[l] + static_cast<std::size_t>(in) * out, out) = delta.rowwise().sum();
      if (l > 0) {
        Matrix back = weight(l, offs[l]).transpose() * delta;
        delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
      }
    }
    return grad;
  }

  std::uint64_t weights_hash() const {
    return fnv1a(params_.data(), static_cast<std::size_t>(params_.size()) * sizeof(double));
  }

  nlohmann::json to_json() const {
    return {{"sizes", sizes_},
            {"parameters", std::vector<double>(params_.data(), params_.data() + params_.size())}};
  }

  static QNetwork from_json(const nlohmann::json& j) {
    QNetwork net;
    net.sizes_ = j.at("sizes").get<std::vector<int>>();
    const auto p = j.at("parameters").get<std::vector<double>>();
    if (p.size() != parameter_count(net.sizes_))
      throw std::invalid_argument("parameter count does not match layer sizes");
    net.params_ = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
    return net;
  }

 private:
  std::size_t layer_params(std::size_t l) const {
    return static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  Eigen::Map<const Matrix> weight(std::size_t l, std::size_t off) const {
    return {params_.data() + off, sizes_[l + 1], sizes_[l]};
  }
  Eigen::Map<const Vector> bias(std::size_t l, std::size_t off) const {
    return {params_.data() + off + static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1],
            sizes_[l + 1]};
  }
  void check_input(const Matrix& x) const {
    if (x.rows() != input_size())
      throw std::invalid_argument("input has " + std::to_string(x.rows()) +
                                  " features, network expects " +
                                  std::to_string(input_size()));
  }

  std::vector<int> sizes_;
  Vector params_;
};

/// Adam over a flat parameter vector.
class Adam {
 public:
  explicit Adam(double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(learning_rate), b1_(beta1), b2_(beta2), eps_(eps) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    if (m_.size() != params.size()) {
      m_ = Eigen::VectorXd::Zero(params.size());
      v_ = Eigen::VectorXd::Zero(params.size());
      t_ = 0;
    }
    ++t_;
    m_ = b1_ * m_ + (1 - b1_) * grad;
    v_ = b2_ * v_ + (1 - b2_) * grad.cwiseAbs2();
    const double c1 = 1 - std::pow(b1_, t_);
    const double c2 = 1 - std::pow(b2_, t_);
    params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

 private:
  double lr_, b1_, b2_, eps_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace vqerl
