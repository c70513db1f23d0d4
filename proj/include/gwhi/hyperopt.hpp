// include/gwhi/hyperopt.hpp

// Copyright 2026 gwhi authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Bayesian optimization over a box-bounded hyperparameter space: Latin
// hypercube initialization, Gaussian-process surrogate with an ARD
// squared-exponential kernel (length scales fitted by multi-start ascent of
// the marginal likelihood), and expected-improvement acquisition maximized
// by multi-start local search on the unit cube.

#ifndef GWHI_HYPEROPT_HPP
#define GWHI_HYPEROPT_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "gwhi/common.hpp"
#include "gwhi/io.hpp"
#include "gwhi/neural.hpp"
#include "gwhi/rng.hpp"

namespace gwhi {

// ---------------------------------------------------------------------------
// Search space
// ---------------------------------------------------------------------------

struct SearchDim {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  bool integer = false;
};

struct SearchSpace {
  std::vector<SearchDim> dims;

  size_t size() const { return dims.size(); }

  /// Unit-cube point -> original coordinates, integers rounded.
  std::vector<double> from_unit(const std::vector<double>& u) const {
    if (u.size() != dims.size()) throw ArgumentError("unit point has wrong dimension");
    std::vector<double> x(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
      const auto& d = dims[i];
      double v = d.lo + std::clamp(u[i], 0.0, 1.0) * (d.hi - d.lo);
      if (d.integer) v = std::clamp(std::round(v), d.lo, d.hi);
      x[i] = v;
    }
    return x;
  }

  std::vector<double> to_unit(const std::vector<double>& x) const {
    if (x.size() != dims.size()) throw ArgumentError("point has wrong dimension");
    std::vector<double> u(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      const auto& d = dims[i];
      u[i] = d.hi > d.lo ? (x[i] - d.lo) / (d.hi - d.lo) : 0.0;
    }
    return u;
  }

  /// Snaps a unit point onto the representable grid (integer dims quantize).
  std::vector<double> snap(const std::vector<double>& u) const { return to_unit(from_unit(u)); }
};

inline std::vector<std::vector<double>> latin_hypercube(size_t n, size_t d, Rng& rng) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(d, 0.0));
  for (size_t j = 0; j < d; ++j) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    for (size_t i = 0; i < n; ++i)
      pts[i][j] = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Gaussian process surrogate
// ---------------------------------------------------------------------------

/// Squared-exponential kernel with per-dimension length scales, observation
/// noise, and targets standardized internally.
class GpSurrogate {
 public:
  struct Hypers {
    std::vector<double> log_lengthscales;
    double log_amplitude = 0.0;
    double log_noise = std::log(1e-3);
  };

  /// Fits hyperparameters by multi-start gradient ascent on the log marginal
  /// likelihood unless `fit_hypers` is false (then the given values hold).
  void fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y, Rng& rng,
           bool fit_hypers = true, double fixed_noise = -1.0) {
    if (X.empty()) throw ArgumentError("GP fit needs at least one observation");
    X_ = X;
    dim_ = X[0].size();
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(y.size());
    y_mean_ = mean;
    y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
    y_.resize(static_cast<Eigen::Index>(y.size()));
    for (size_t i = 0; i < y.size(); ++i)
      y_[static_cast<Eigen::Index>(i)] = (y[i] - y_mean_) / y_scale_;

    hypers_.log_lengthscales.assign(dim_, std::log(0.3));
    hypers_.log_amplitude = 0.0;
    hypers_.log_noise = fixed_noise > 0.0 ? std::log(fixed_noise) : std::log(1e-3);

    if (fit_hypers && X_.size() >= 3) {
      double best_ll = -std::numeric_limits<double>::infinity();
      Hypers best = hypers_;
      for (int start = 0; start < 4; ++start) {
        Hypers h = hypers_;
        for (double& l : h.log_lengthscales) l = std::log(rng.uniform(0.05, 1.0));
        h.log_amplitude = std::log(rng.uniform(0.5, 2.0));
        if (fixed_noise <= 0.0) h.log_noise = std::log(rng.uniform(1e-4, 1e-1));
        double ll = ascend_marginal_likelihood(h, fixed_noise > 0.0);
        if (ll > best_ll) {
          best_ll = ll;
          best = h;
        }
      }
      hypers_ = best;
    }
    factorize();
  }

  struct Posterior {
    double mean = 0.0;
    double stddev = 0.0;
  };

  Posterior predict(const std::vector<double>& x) const {
    Vector k(static_cast<Eigen::Index>(X_.size()));
    for (size_t i = 0; i < X_.size(); ++i)
      k[static_cast<Eigen::Index>(i)] = kernel(x, X_[i]);
    double mean = k.dot(alpha_);
    Vector v = llt_.matrixL().solve(k);
    double var = kernel(x, x) - v.squaredNorm();
    Posterior p;
    p.mean = mean * y_scale_ + y_mean_;
    p.stddev = std::sqrt(std::max(var, 0.0)) * y_scale_;
    return p;
  }

  const Hypers& hypers() const { return hypers_; }

 private:
  double kernel(const std::vector<double>& a, const std::vector<double>& b) const {
    double q = 0.0;
    for (size_t j = 0; j < dim_; ++j) {
      double l = std::exp(hypers_.log_lengthscales[j]);
      double d = (a[j] - b[j]) / l;
      q += d * d;
    }
    return std::exp(2.0 * hypers_.log_amplitude) * std::exp(-0.5 * q);
  }

  Matrix kernel_matrix() const {
    const auto n = static_cast<Eigen::Index>(X_.size());
    Matrix K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j)
        K(i, j) = K(j, i) = kernel(X_[static_cast<size_t>(i)], X_[static_cast<size_t>(j)]);
    double noise2 = std::exp(2.0 * hypers_.log_noise);
    K.diagonal().array() += noise2 + 1e-8;  // jitter keeps K positive definite
    return K;
  }

  void factorize() {
    Matrix K = kernel_matrix();
    llt_.compute(K);
    if (llt_.info() != Eigen::Success)
      throw ArgumentError("GP kernel matrix is not positive definite");
    alpha_ = llt_.solve(y_);
  }

  double log_marginal() const {
    Matrix K = kernel_matrix();
    Eigen::LLT<Matrix> llt(K);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    Vector alpha = llt.solve(y_);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < K.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return -0.5 * y_.dot(alpha) - 0.5 * logdet -
           0.5 * static_cast<double>(y_.size()) * std::log(2.0 * std::numbers::pi);
  }

  /// Coordinate-wise numeric-gradient ascent with backtracking; small and
  /// dependable at these problem sizes.
  double ascend_marginal_likelihood(Hypers& h, bool noise_fixed) {
    auto pack = [&](const Hypers& v) {
      std::vector<double> p = v.log_lengthscales;
      p.push_back(v.log_amplitude);
      if (!noise_fixed) p.push_back(v.log_noise);
      return p;
    };
    auto unpack = [&](const std::vector<double>& p, Hypers& v) {
      for (size_t i = 0; i < dim_; ++i)
        v.log_lengthscales[i] = std::clamp(p[i], std::log(1e-2), std::log(1e2));
      v.log_amplitude = std::clamp(p[dim_], std::log(1e-3), std::log(1e3));
      if (!noise_fixed) v.log_noise = std::clamp(p[dim_ + 1], std::log(1e-6), std::log(1.0));
    };
    auto eval = [&](const std::vector<double>& p) {
      Hypers tmp = h;
      unpack(p, tmp);
      std::swap(hypers_, tmp);
      double ll = log_marginal();
      std::swap(hypers_, tmp);
      return ll;
    };

    std::vector<double> p = pack(h);
    double ll = eval(p);
    double step = 0.25;
    for (int iter = 0; iter < 60 && step > 1e-3; ++iter) {
      const double fd = 1e-4;
      std::vector<double> grad(p.size());
      for (size_t j = 0; j < p.size(); ++j) {
        std::vector<double> pp = p, pm = p;
        pp[j] += fd;
        pm[j] -= fd;
        grad[j] = (eval(pp) - eval(pm)) / (2.0 * fd);
      }
      double norm = 0.0;
      for (double g : grad) norm += g * g;
      norm = std::sqrt(norm);
      if (norm < 1e-8) break;
      std::vector<double> cand = p;
      for (size_t j = 0; j < p.size(); ++j) cand[j] += step * grad[j] / norm;
      double cand_ll = eval(cand);
      if (cand_ll > ll) {
        p = cand;
        ll = cand_ll;
        step *= 1.2;
      } else {
        step *= 0.5;
      }
    }
    unpack(p, h);
    return ll;
  }

  std::vector<std::vector<double>> X_;
  Vector y_;
  size_t dim_ = 0;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Hypers hypers_;
  Eigen::LLT<Matrix> llt_;
  Vector alpha_;
};

// ---------------------------------------------------------------------------
// Expected improvement
// ---------------------------------------------------------------------------

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Expected improvement for maximization. std = 0 degenerates to
/// max(mean - incumbent, 0).
inline double ei(double mean, double std, double incumbent) {
  if (std < 0.0) throw ArgumentError("ei: negative standard deviation");
  double delta = mean - incumbent;
  if (std == 0.0) return std::max(delta, 0.0);
  double u = delta / std;
  return delta * normal_cdf(u) + std * normal_pdf(u);
}

// ---------------------------------------------------------------------------
// Optimization loop
// ---------------------------------------------------------------------------

struct Observation {
  std::vector<double> x;  // original coordinates
  double value = 0.0;
  bool failed = false;
};

struct OptimizeResult {
  std::vector<double> best_x;
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<Observation> trace;
};

struct OptimizeBudget {
  int n_init = 10;
  int n_iter = 20;
};

/// Maximizes `objective` over the space within a total budget of
/// n_init + n_iter evaluations. Failed evaluations (exceptions) are recorded
/// at -inf and the loop continues. `prior` observations (a reloaded trace)
/// count toward the total budget, so an interrupted run resumes where it
/// stopped.
inline OptimizeResult optimize(
    const SearchSpace& space, const std::function<double(const std::vector<double>&)>& objective,
    const OptimizeBudget& budget, uint64_t seed,
    const std::vector<Observation>& prior = {}) {
  if (budget.n_init < 2) throw ArgumentError("optimize: n_init must be >= 2");
  Rng rng(hash_mix(seed, 0x9b0c7a1fULL));
  OptimizeResult result;
  result.trace = prior;

  auto evaluate = [&](const std::vector<double>& u) {
    Observation obs;
    obs.x = space.from_unit(u);
    try {
      obs.value = objective(obs.x);
      if (!std::isfinite(obs.value)) obs.failed = true;
    } catch (const std::exception&) {
      obs.failed = true;
    }
    if (obs.failed) obs.value = -std::numeric_limits<double>::infinity();
    result.trace.push_back(obs);
  };

  const size_t total = static_cast<size_t>(budget.n_init) + static_cast<size_t>(budget.n_iter);
  const int lhs_todo =
      std::max(0, budget.n_init - static_cast<int>(prior.size()));
  auto lhs = latin_hypercube(static_cast<size_t>(budget.n_init), space.size(), rng);
  for (int i = 0; i < lhs_todo; ++i) evaluate(space.snap(lhs[static_cast<size_t>(i)]));

  while (result.trace.size() < total) {
    // Surrogate over the successful observations.
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    double incumbent = -std::numeric_limits<double>::infinity();
    for (const auto& obs : result.trace) {
      if (obs.failed) continue;
      X.push_back(space.to_unit(obs.x));
      y.push_back(obs.value);
      incumbent = std::max(incumbent, obs.value);
    }
    if (X.size() < 2) {
      evaluate(space.snap(latin_hypercube(1, space.size(), rng)[0]));
      continue;
    }
    GpSurrogate gp;
    gp.fit(X, y, rng);

    auto acq = [&](const std::vector<double>& u) {
      auto p = gp.predict(u);
      return ei(p.mean, p.stddev, incumbent);
    };

    // Multi-start local search: dense random probe, then shrinking
    // coordinate steps from the best few candidates.
    const size_t n_probe = 512 * space.size();
    std::vector<double> best_u;
    double best_a = -1.0;
    for (size_t i = 0; i < n_probe; ++i) {
      std::vector<double> u(space.size());
      for (double& v : u) v = rng.uniform();
      u = space.snap(u);
      double a = acq(u);
      if (a > best_a) {
        best_a = a;
        best_u = u;
      }
    }
    double step = 0.1;
    while (step > 1e-3) {
      bool improved = false;
      for (size_t j = 0; j < space.size(); ++j) {
        for (double dir : {+1.0, -1.0}) {
          std::vector<double> cand = best_u;
          cand[j] = std::clamp(cand[j] + dir * step, 0.0, 1.0);
          cand = space.snap(cand);
          double a = acq(cand);
          if (a > best_a) {
            best_a = a;
            best_u = cand;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    evaluate(best_u);
  }

  for (const auto& obs : result.trace) {
    if (!obs.failed && obs.value > result.best_value) {
      result.best_value = obs.value;
      result.best_x = obs.x;
    }
  }
  if (result.best_x.empty()) throw ConfigError("optimize: every objective evaluation failed");
  return result;
}

// ---------------------------------------------------------------------------
// Trace persistence
// ---------------------------------------------------------------------------

inline void write_trace(const fs::path& path, const SearchSpace& space,
                        const std::vector<Observation>& trace) {
  std::vector<std::string> header = {"iteration"};
  for (const auto& d : space.dims) header.push_back(d.name);
  header.push_back("f_all");
  header.push_back("failed");
  TsvBuilder tsv(header);
  for (size_t i = 0; i < trace.size(); ++i) {
    std::vector<std::string> row = {std::to_string(i + 1)};
    for (double v : trace[i].x) row.push_back(fmt_double(v));
    row.push_back(trace[i].failed ? "-inf" : fmt_double(trace[i].value));
    row.push_back(trace[i].failed ? "1" : "0");
    tsv.row(row);
  }
  tsv.write(path);
}

inline std::vector<Observation> read_trace(const fs::path& path, const SearchSpace& space) {
  Tsv t = read_tsv(path);
  std::vector<Observation> trace;
  int c_fail = t.col("failed");
  int c_val = t.col("f_all");
  for (const auto& row : t.rows) {
    Observation obs;
    for (size_t j = 0; j < space.size(); ++j)
      obs.x.push_back(parse_double(row[t.col(space.dims[j].name)]));
    obs.failed = parse_long(row[static_cast<size_t>(c_fail)]) != 0;
    obs.value = obs.failed ? -std::numeric_limits<double>::infinity()
                           : parse_double(row[static_cast<size_t>(c_val)]);
    trace.push_back(obs);
  }
  return trace;
}

}  // namespace gwhi

#endif  // GWHI_HYPEROPT_HPP
