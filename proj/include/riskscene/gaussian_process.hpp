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

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace riskscene {

/// Squared-exponential kernel
///   k(x, x') = signal_variance * exp(-|x - x'|^2 / (2 length_scale^2))
/// plus noise_variance on the diagonal of the training covariance.
struct SeKernel {
  double signal_variance = 1.0;
  double length_scale = 0.2;
  double noise_variance = 1e-4;

  double operator()(std::span<const double> a, std::span<const double> b) const;
};

class GpFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;  // latent-function variance, clipped at 0
  double stddev = 0.0;
};

/// Exact zero-mean GP regression. Every fit factorizes the full kernel
/// matrix (Cholesky); jitter is added only if the factorization fails.
class GaussianProcess {
 public:
  /// Throws std::invalid_argument on empty, ragged or non-finite input and GpFitError when
  /// the kernel matrix stays indefinite after jitter reaches 1e-4.
  static GaussianProcess fit(const std::vector<std::vector<double>>& inputs, std::span<const double> targets,
                             const SeKernel& kernel);

  GpPrediction predict(std::span<const double> x) const;
  /// Batched prediction; equivalent to calling predict() on each point.
  std::vector<GpPrediction> predict(const std::vector<std::vector<double>>& xs) const;

  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(inputs_.cols()); }
  const SeKernel& kernel() const { return kernel_; }
  /// Jitter that had to be added to the diagonal (0 when none was needed).
  double jitter() const { return jitter_; }

 private:
  GaussianProcess() = default;

  Eigen::MatrixXd cross_covariance(const Eigen::MatrixXd& xs) const;

  SeKernel kernel_;
  Eigen::MatrixXd inputs_;  // n x d
  Eigen::LLT<Eigen::MatrixXd> cholesky_;
  Eigen::VectorXd alpha_;  // K^-1 y
  double jitter_ = 0.0;
};

struct UcbChoice {
  std::size_t index = 0;
  double value = 0.0;
};

/// argmax of mean + sqrt(beta) * stddev; ties go to the lowest index.
/// Throws std::invalid_argument for an empty set or negative beta.
UcbChoice ucb_argmax(std::span<const GpPrediction> predictions, double beta);

UcbChoice ucb_argmax(const GaussianProcess& gp, const std::vector<std::vector<double>>& candidates, double beta);

}  // namespace riskscene
