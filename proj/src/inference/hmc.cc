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
#include "stratlift/inference/hmc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "stratlift/errors.h"
#include "stratlift/parallel.h"

namespace stratlift::inference {

void SamplerConfig::validate() const {
  auto fail = [](const std::string& m) { throw PreconditionError(m); };
  if (chains < 1) fail("chains must be >= 1");
  if (warmup_iters < 0) fail("warmup_iters must be >= 0");
  if (sampling_iters < 1) fail("sampling_iters must be >= 1");
  if (!(target_accept > 0.5 && target_accept < 0.99)) {
    fail("target_accept must lie in (0.5, 0.99)");
  }
  if (leapfrog_steps < 0) fail("leapfrog_steps must be >= 0");
  if (max_leapfrog < 1) fail("max_leapfrog must be >= 1");
  if (!(integration_time > 0)) fail("integration_time must be positive");
  if (!(init_jitter >= 0)) fail("init_jitter must be >= 0");
}

PosteriorDraws::PosteriorDraws(std::vector<std::string> names,
                               std::size_t num_params, std::size_t chains,
                               std::size_t iters)
    : names_(std::move(names)),
      num_params_(num_params),
      chains_(chains),
      iters_(iters),
      values_(chains * iters * names_.size(), 0.0) {}

std::size_t PosteriorDraws::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::string_view::npos;
}

bool PosteriorDraws::has(std::string_view name) const {
  return index_of(name) != std::string_view::npos;
}

std::size_t PosteriorDraws::require(std::string_view name) const {
  const auto i = index_of(name);
  if (i == std::string_view::npos) {
    throw std::out_of_range("no draws for '" + std::string(name) + "'");
  }
  return i;
}

std::vector<double> PosteriorDraws::chain_column(std::size_t chain,
                                                 std::size_t col) const {
  std::vector<double> out(iters_);
  for (std::size_t i = 0; i < iters_; ++i) out[i] = at(chain, i, col);
  return out;
}

std::vector<double> PosteriorDraws::column(std::size_t col) const {
  std::vector<double> out;
  out.reserve(total_draws());
  for (std::size_t c = 0; c < chains_; ++c) {
    for (std::size_t i = 0; i < iters_; ++i) out.push_back(at(c, i, col));
  }
  return out;
}

void PosteriorDraws::add_column(std::string name,
                                const std::vector<double>& values) {
  if (values.size() != total_draws()) {
    throw std::invalid_argument("derived column has the wrong length");
  }
  const std::size_t old_w = names_.size();
  std::vector<double> next(total_draws() * (old_w + 1));
  for (std::size_t d = 0; d < total_draws(); ++d) {
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(d * old_w),
                old_w, next.begin() + static_cast<std::ptrdiff_t>(d * (old_w + 1)));
    next[d * (old_w + 1) + old_w] = values[d];
  }
  values_ = std::move(next);
  names_.push_back(std::move(name));
}

std::size_t PosteriorDraws::divergences() const {
  std::size_t n = 0;
  for (const auto& s : chain_stats) n += s.divergences;
  return n;
}

double PosteriorDraws::divergence_rate() const {
  return total_draws() == 0 ? 0.0
                            : static_cast<double>(divergences()) /
                                  static_cast<double>(total_draws());
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kMaxEnergyError = 1000.0;

class DualAveraging {
 public:
  void restart(double step) {
    mu_ = std::log(10.0 * step);
    log_step_bar_ = 0;
    h_bar_ = 0;
    t_ = 0;
  }

  double update(double accept, double target) {
    ++t_;
    const double t = static_cast<double>(t_);
    const double eta = 1.0 / (t + kT0);
    h_bar_ = (1.0 - eta) * h_bar_ + eta * (target - accept);
    const double log_step = mu_ - std::sqrt(t) / kGamma * h_bar_;
    const double w = std::pow(t, -kKappa);
    log_step_bar_ = w * log_step + (1.0 - w) * log_step_bar_;
    return std::exp(log_step);
  }

  double averaged() const { return std::exp(log_step_bar_); }

 private:
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;
  double mu_ = 0;
  double log_step_bar_ = 0;
  double h_bar_ = 0;
  long t_ = 0;
};

// Position is kept in whitened coordinates u with x = chol * u, so the
// kinetic energy is always 0.5 |p|^2.
class Chain {
 public:
  Chain(const TargetDensity& target, const SamplerConfig& config,
        std::uint64_t seed)
      : target_(target),
        config_(config),
        dim_(target.dim()),
        rng_(seed),
        chol_(Mat::Identity(dim_, dim_)),
        grad_x_(dim_) {}

  void initialize() {
    const auto init = target_.initial_point();
    if (init.size() != dim_) {
      throw Error("initial point has the wrong dimension");
    }
    std::uniform_real_distribution<double> jitter(-config_.init_jitter,
                                                  config_.init_jitter);
    x_.resize(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      x_[i] = init[i] + (config_.init_jitter > 0 ? jitter(rng_) : 0.0);
    }
    logp_ = eval(x_, grad_x_);
    const auto names = target_.unconstrained_names();
    if (!std::isfinite(logp_)) {
      throw Error("log density is not finite at the initial point");
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      if (!std::isfinite(grad_x_[i])) {
        throw Error("gradient is not finite at the initial point for '" +
                    (i < names.size() ? names[i] : std::to_string(i)) + "'");
      }
    }
    u_ = x_;
    grad_u_ = grad_x_;
  }

  void run(PosteriorDraws& out, std::size_t chain_index) {
    initialize();
    step_ = find_reasonable_step(1.0);
    adapter_.restart(step_);

    const int warmup = config_.warmup_iters;
    const auto windows = plan_windows(warmup);
    std::size_t window = 0;
    std::vector<Vec> window_draws;

    for (int it = 0; it < warmup; ++it) {
      const double accept = transition(nullptr);
      step_ = adapter_.update(accept, config_.target_accept);
      if (window < windows.size() && it >= windows[window].first &&
          it < windows[window].second) {
        window_draws.push_back(x_);
        if (it + 1 == windows[window].second) {
          update_metric(window_draws);
          window_draws.clear();
          ++window;
          step_ = find_reasonable_step(step_);
          adapter_.restart(step_);
        }
      }
    }
    if (warmup > 0) step_ = adapter_.averaged();

    ChainStats stats;
    stats.step_size = step_;
    stats.leapfrog_steps = base_steps();
    double accept_sum = 0;
    const auto names_params = target_.param_names().size();
    const std::size_t width = out.num_columns();
    for (int it = 0; it < config_.sampling_iters; ++it) {
      bool divergent = false;
      accept_sum += transition(&divergent);
      if (divergent) ++stats.divergences;
      const auto params = target_.constrain(
          std::span<const double>(x_.data(), static_cast<std::size_t>(x_.size())));
      const auto derived = target_.derived(params);
      for (std::size_t p = 0; p < names_params; ++p) {
        out.at(chain_index, static_cast<std::size_t>(it), p) = params[p];
      }
      for (std::size_t p = 0; p < derived.size() && names_params + p < width;
           ++p) {
        out.at(chain_index, static_cast<std::size_t>(it), names_params + p) =
            derived[p];
      }
    }
    stats.mean_accept = accept_sum / config_.sampling_iters;
    out.chain_stats[chain_index] = stats;
  }

 private:
  double eval(const Vec& x, Vec& grad) const {
    return target_.log_density(std::span<const double>(x.data(), dim_),
                               std::span<double>(grad.data(), dim_));
  }

  // Evaluates at whitened position u; fills grad_u.
  double eval_whitened(const Vec& u, Vec& x, Vec& grad_u) {
    x.noalias() = chol_ * u;
    const double lp = eval(x, grad_x_);
    grad_u.noalias() = chol_.transpose() * grad_x_;
    return lp;
  }

  int base_steps() const {
    if (config_.leapfrog_steps > 0) {
      return std::min(config_.leapfrog_steps, config_.max_leapfrog);
    }
    const double n = std::ceil(config_.integration_time / step_);
    return static_cast<int>(std::clamp(n, 1.0,
                                       static_cast<double>(config_.max_leapfrog)));
  }

  int jittered_steps() {
    const int base = base_steps();
    const int lo = std::max(1, static_cast<int>(std::lround(0.8 * base)));
    const int hi = std::min(config_.max_leapfrog,
                            std::max(lo, static_cast<int>(std::lround(1.2 * base))));
    std::uniform_int_distribution<int> pick(lo, hi);
    return pick(rng_);
  }

  // Runs `steps` leapfrog steps from (u, p); returns the final log density
  // or NaN when the trajectory leaves the support.
  double leapfrog(Vec& u, Vec& p, Vec& x, Vec& grad_u, int steps, double eps) {
    double lp = 0;
    p += 0.5 * eps * grad_u;
    for (int s = 0; s < steps; ++s) {
      u += eps * p;
      lp = eval_whitened(u, x, grad_u);
      if (!std::isfinite(lp) || !grad_u.allFinite()) {
        return std::numeric_limits<double>::quiet_NaN();
      }
      if (s + 1 < steps) p += eps * grad_u;
    }
    p += 0.5 * eps * grad_u;
    return lp;
  }

  Vec draw_momentum() {
    Vec p(dim_);
    for (std::size_t i = 0; i < dim_; ++i) p[i] = normal_(rng_);
    return p;
  }

  // One Metropolis-corrected trajectory. Returns the acceptance statistic.
  double transition(bool* divergent) {
    Vec p = draw_momentum();
    const double h0 = -logp_ + 0.5 * p.squaredNorm();
    Vec u = u_, x(dim_), g = grad_u_;
    const double lp = leapfrog(u, p, x, g, jittered_steps(), step_);
    const double h1 = -lp + 0.5 * p.squaredNorm();
    double accept = 0;
    if (std::isfinite(h1)) {
      const double dh = h0 - h1;
      accept = dh >= 0 ? 1.0 : std::exp(dh);
      if (-dh > kMaxEnergyError && divergent) *divergent = true;
    } else if (divergent) {
      *divergent = true;
    }
    if (accept > 0 && uniform_(rng_) < accept) {
      u_ = u;
      grad_u_ = g;
      x_ = x;
      logp_ = lp;
    }
    return accept;
  }

  double find_reasonable_step(double eps) {
    auto accept_at = [&](double e) {
      Vec p = draw_momentum();
      const double h0 = -logp_ + 0.5 * p.squaredNorm();
      Vec u = u_, x(dim_), g = grad_u_;
      const double lp = leapfrog(u, p, x, g, 1, e);
      const double h1 = -lp + 0.5 * p.squaredNorm();
      if (!std::isfinite(h1)) return 0.0;
      return std::min(1.0, std::exp(h0 - h1));
    };
    double a = accept_at(eps);
    const double dir = a > 0.5 ? 1.0 : -1.0;
    for (int i = 0; i < 60; ++i) {
      if (dir > 0 ? a <= 0.5 : a > 0.5) break;
      eps *= dir > 0 ? 2.0 : 0.5;
      if (eps > 1e3 || eps < 1e-12) break;
      a = accept_at(eps);
    }
    return eps;
  }

  // Slow windows [begin, end) in warmup iterations.
  static std::vector<std::pair<int, int>> plan_windows(int warmup) {
    std::vector<std::pair<int, int>> out;
    if (warmup < 20) return out;
    int init_buffer = 75, term_buffer = 50, base = 25;
    if (init_buffer + term_buffer + base > warmup) {
      init_buffer = static_cast<int>(0.15 * warmup);
      term_buffer = static_cast<int>(0.1 * warmup);
      base = warmup - init_buffer - term_buffer;
    }
    const int slow_end = warmup - term_buffer;
    int start = init_buffer;
    int size = base;
    while (start < slow_end) {
      int end = start + size;
      // Absorb a remainder too short for a full doubled window.
      if (end + 2 * size > slow_end) end = slow_end;
      out.emplace_back(start, end);
      start = end;
      size *= 2;
    }
    return out;
  }

  void update_metric(const std::vector<Vec>& draws) {
    const auto n = static_cast<double>(draws.size());
    if (draws.size() < 3) return;
    Vec mean = Vec::Zero(dim_);
    for (const auto& d : draws) mean += d;
    mean /= n;
    Mat cov = Mat::Zero(dim_, dim_);
    for (const auto& d : draws) {
      const Vec c = d - mean;
      cov.noalias() += c * c.transpose();
    }
    cov /= (n - 1.0);
    // Shrink toward a small multiple of the identity.
    cov = (n / (n + 5.0)) * cov;
    cov.diagonal().array() += 1e-3 * (5.0 / (n + 5.0));
    if (!config_.dense_metric) {
      cov = Mat(cov.diagonal().asDiagonal());
    }
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success) return;
    chol_ = llt.matrixL();
    // Keep x fixed; re-express in the new whitened coordinates.
    u_ = chol_.triangularView<Eigen::Lower>().solve(x_);
    logp_ = eval_whitened(u_, x_, grad_u_);
  }

  const TargetDensity& target_;
  const SamplerConfig& config_;
  std::size_t dim_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  Mat chol_;
  Vec x_, u_, grad_u_, grad_x_;
  double logp_ = 0;
  double step_ = 1;
  DualAveraging adapter_;
};

}  // namespace

PosteriorDraws sample(const TargetDensity& target, const SamplerConfig& config) {
  config.validate();
  if (target.dim() == 0) throw PreconditionError("target has dimension 0");
  auto names = target.param_names();
  const std::size_t num_params = names.size();
  for (auto& n : target.derived_names()) names.push_back(n);
  PosteriorDraws out(std::move(names), num_params,
                     static_cast<std::size_t>(config.chains),
                     static_cast<std::size_t>(config.sampling_iters));
  out.chain_stats.resize(static_cast<std::size_t>(config.chains));

  parallel_for(
      static_cast<std::size_t>(config.chains),
      [&](std::size_t c) {
        Chain chain(target, config, mix_seed(config.seed, c));
        chain.run(out, c);
      },
      static_cast<std::size_t>(std::max(config.threads, 0)));

  if (out.divergence_rate() > 0.10) {
    std::ostringstream msg;
    msg << "divergent transitions after warmup: " << out.divergences()
        << " of " << out.total_draws();
    out.warnings.push_back(msg.str());
  }
  return out;
}

}  // namespace stratlift::inference
