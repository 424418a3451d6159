// Copyright 2026 The riskscene Authors
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

#include "riskscene/gaussian_process.hpp"

#include <algorithm>
#include <cmath>

namespace riskscene {

namespace {

constexpr double kFirstJitter = 1e-10;
constexpr double kMaxJitter = 1e-4;

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows, std::size_t dim) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) throw std::invalid_argument("GP inputs have inconsistent dimensions");
    for (std::size_t j = 0; j < dim; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  }
  return d;
}

}  // namespace

double SeKernel::operator()(std::span<const double> a, std::span<const double> b) const {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return signal_variance * std::exp(-d2 / (2.0 * length_scale * length_scale));
}

GaussianProcess GaussianProcess::fit(const std::vector<std::vector<double>>& inputs, std::span<const double> targets,
                                     const SeKernel& kernel) {
  if (inputs.empty()) throw std::invalid_argument("GP fit needs at least one training point");
  if (inputs.size() != targets.size()) throw std::invalid_argument("GP inputs and targets differ in length");
  if (!(kernel.signal_variance > 0.0) || !(kernel.length_scale > 0.0) || !(kernel.noise_variance > 0.0)) {
    throw std::invalid_argument("GP kernel parameters must be positive");
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const bool finite = std::all_of(inputs[i].begin(), inputs[i].end(), [](double v) { return std::isfinite(v); });
    if (!finite || !std::isfinite(targets[i])) throw std::invalid_argument("GP training data must be finite");
  }

  GaussianProcess gp;
  gp.kernel_ = kernel;
  gp.inputs_ = to_matrix(inputs, inputs.front().size());
  const Eigen::Index n = gp.inputs_.rows();

  const double scale = -1.0 / (2.0 * kernel.length_scale * kernel.length_scale);
  Eigen::MatrixXd k = (squared_distances(gp.inputs_, gp.inputs_) * scale).array().exp() * kernel.signal_variance;
  k.diagonal().array() += kernel.noise_variance;

  gp.cholesky_.compute(k);
  double jitter = kFirstJitter;
  while (gp.cholesky_.info() != Eigen::Success) {
    if (jitter > kMaxJitter) {
      throw GpFitError("kernel matrix is not positive definite even with jitter " + std::to_string(kMaxJitter));
    }
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    gp.cholesky_.compute(kj);
    gp.jitter_ = jitter;
    jitter *= 2.0;
  }

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = targets[static_cast<std::size_t>(i)];
  gp.alpha_ = gp.cholesky_.solve(y);
  return gp;
}

Eigen::MatrixXd GaussianProcess::cross_covariance(const Eigen::MatrixXd& xs) const {
  const double scale = -1.0 / (2.0 * kernel_.length_scale * kernel_.length_scale);
  return (squared_distances(inputs_, xs) * scale).array().exp() * kernel_.signal_variance;
}

GpPrediction GaussianProcess::predict(std::span<const double> x) const {
  return predict(std::vector<std::vector<double>>{std::vector<double>(x.begin(), x.end())}).front();
}

std::vector<GpPrediction> GaussianProcess::predict(const std::vector<std::vector<double>>& xs) const {
  std::vector<GpPrediction> out(xs.size());
  if (xs.empty()) return out;
  const Eigen::MatrixXd query = to_matrix(xs, dimension());
  const Eigen::MatrixXd kstar = cross_covariance(query);  // n x m
  const Eigen::VectorXd mean = kstar.transpose() * alpha_;
  const Eigen::MatrixXd v = cholesky_.matrixL().solve(kstar);
  const Eigen::VectorXd explained = v.colwise().squaredNorm().transpose();
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double var = kernel_.signal_variance - explained(jj);
    out[j].mean = mean(jj);
    out[j].variance = var > 0.0 ? var : 0.0;
    out[j].stddev = std::sqrt(out[j].variance);
  }
  return out;
}

UcbChoice ucb_argmax(std::span<const GpPrediction> predictions, double beta) {
  if (predictions.empty()) throw std::invalid_argument("UCB needs at least one candidate");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  const double root_beta = std::sqrt(beta);
  UcbChoice best{0, predictions[0].mean + root_beta * predictions[0].stddev};
  for (std::size_t i = 1; i < predictions.size(); ++i) {
    const double value = predictions[i].mean + root_beta * predictions[i].stddev;
    if (value > best.value) best = {i, value};
  }
  return best;
}

UcbChoice ucb_argmax(const GaussianProcess& gp, const std::vector<std::vector<double>>& candidates, double beta) {
  const auto predictions = gp.predict(candidates);
  return ucb_argmax(predictions, beta);
}

}  // namespace riskscene
