/*
 * Copyright 2026 The Stratlift Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef STRATLIFT_TESTS_TEST_TARGETS_H_
#define STRATLIFT_TESTS_TEST_TARGETS_H_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "stratlift/inference/target_density.h"
#include "stratlift/inference/transforms.h"

namespace stratlift::testing {

// Zero-mean bivariate normal with unit variances and correlation rho (or a
// univariate standard normal when dim = 1).
class GaussianTarget : public inference::TargetDensity {
 public:
  GaussianTarget(std::size_t dim, double rho = 0) : dim_(dim), rho_(rho) {}

  std::size_t dim() const override { return dim_; }
  double log_density(std::span<const double> x,
                     std::span<double> grad) const override {
    if (dim_ == 1) {
      if (!grad.empty()) grad[0] = -x[0];
      return -0.5 * x[0] * x[0];
    }
    const double d = 1 - rho_ * rho_;
    const double q = (x[0] * x[0] - 2 * rho_ * x[0] * x[1] + x[1] * x[1]) / d;
    if (!grad.empty()) {
      grad[0] = -(x[0] - rho_ * x[1]) / d;
      grad[1] = -(x[1] - rho_ * x[0]) / d;
    }
    return -0.5 * q;
  }
  std::vector<std::string> unconstrained_names() const override {
    return names();
  }
  std::vector<std::string> param_names() const override { return names(); }
  std::vector<double> constrain(std::span<const double> x) const override {
    return {x.begin(), x.end()};
  }

 private:
  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (std::size_t i = 0; i < dim_; ++i) n.push_back("x" + std::to_string(i));
    return n;
  }
  std::size_t dim_;
  double rho_;
};

// Dirichlet(a, a, a) pushed through the simplex transform.
class DirichletTarget : public inference::TargetDensity {
 public:
  explicit DirichletTarget(double a) : a_(a) {}

  std::size_t dim() const override { return 2; }
  double log_density(std::span<const double> v,
                     std::span<double> grad) const override {
    const auto t = inference::transform_simplex(v);
    double lp = t.log_jacobian;
    std::vector<double> d(3);
    for (int j = 0; j < 3; ++j) {
      lp += (a_ - 1) * std::log(t.simplex[j]);
      d[j] = (a_ - 1) / t.simplex[j];
    }
    if (!grad.empty()) {
      grad[0] = grad[1] = 0;
      inference::simplex_backprop(t.simplex, d, true, grad);
    }
    return lp;
  }
  std::vector<std::string> unconstrained_names() const override {
    return {"v1", "v2"};
  }
  std::vector<std::string> param_names() const override {
    return {"p0", "p1", "p2"};
  }
  std::vector<double> constrain(std::span<const double> v) const override {
    return inference::transform_simplex(v).simplex;
  }

 private:
  double a_;
};

// Log density that is NaN everywhere, for initialization errors.
class BrokenTarget : public inference::TargetDensity {
 public:
  std::size_t dim() const override { return 2; }
  double log_density(std::span<const double>, std::span<double> grad) const override {
    for (auto& g : grad) g = 0;
    if (!grad.empty()) grad[1] = NAN;
    return 0.0;
  }
  std::vector<std::string> unconstrained_names() const override {
    return {"alpha", "beta"};
  }
  std::vector<std::string> param_names() const override { return {"alpha", "beta"}; }
  std::vector<double> constrain(std::span<const double> x) const override {
    return {x.begin(), x.end()};
  }
};

}  // namespace stratlift::testing

#endif  // STRATLIFT_TESTS_TEST_TARGETS_H_
