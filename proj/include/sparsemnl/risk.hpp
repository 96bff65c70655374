#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "multinomial.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace sparsemnl {

/// How a misclassification probability was estimated:
///   Empirical   - labels are drawn and indicator losses averaged;
///   Conditional - the conditional error given X is averaged, which
///                 never increases the variance (Rao-Blackwell).
enum class RiskMethod { Empirical, Conditional };

inline const char* to_string(RiskMethod m) {
  return m == RiskMethod::Empirical ? "empirical" : "conditional";
}

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_mc = 0;
  RiskMethod method = RiskMethod::Conditional;
};

namespace detail {

/// Streaming mean/variance accumulator (Welford). Identical terms give
/// an exactly zero variance, so deterministic risks report std_error 0.
struct MeanAccumulator {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  double std_error() const {
    if (n < 2) return 0.0;
    const double var = std::max(m2, 0.0) / static_cast<double>(n - 1);
    return std::sqrt(var / static_cast<double>(n));
  }
};

inline void check_mc_args(long n_mc) {
  if (n_mc < 1) throw std::invalid_argument("risk: need n_mc >= 1");
}

}  // namespace detail

/// Misclassification probability of the best possible rule under B_true:
/// E[1 - max_l p_l(X)] with X drawn from sampler. The Empirical variant
/// draws a label per point and averages the 0/1 loss instead.
template <class Sampler>
RiskEstimate bayes_risk(const CoeffMatrix& B_true, Sampler&& sampler,
                        long n_mc, std::uint64_t seed,
                        RiskMethod method = RiskMethod::Conditional) {
  detail::check_mc_args(n_mc);
  Rng rng(seed);
  detail::MeanAccumulator acc;
  const int L = static_cast<int>(B_true.classes());
  for (long i = 0; i < n_mc; ++i) {
    const Eigen::VectorXd x = sampler(rng);
    const Eigen::VectorXd p = softmax_probs(B_true, x);
    const int lstar = detail::argmax_lowest(p.transpose());
    if (method == RiskMethod::Conditional) {
      acc.add(1.0 - p[lstar]);
    } else {
      const int yl = rng.categorical(p.data(), L);
      acc.add(yl == lstar ? 0.0 : 1.0);
    }
  }
  return {acc.mean, acc.std_error(), n_mc, method};
}

/// Excess misclassification risk of a classifier over the best rule
/// under B_true. The Conditional variant averages
/// p_{l*}(X) - p_{classify(X)}(X) >= 0 pointwise; the Empirical variant
/// draws labels and averages the difference of 0/1 losses, sharing the
/// same feature draws (common random numbers).
template <class Classifier, class Sampler>
RiskEstimate excess_risk(Classifier&& classify, const CoeffMatrix& B_true,
                         Sampler&& sampler, long n_mc, std::uint64_t seed,
                         RiskMethod method = RiskMethod::Conditional) {
  detail::check_mc_args(n_mc);
  Rng rng(seed);
  detail::MeanAccumulator acc;
  const int L = static_cast<int>(B_true.classes());
  for (long i = 0; i < n_mc; ++i) {
    const Eigen::VectorXd x = sampler(rng);
    const Eigen::VectorXd p = softmax_probs(B_true, x);
    const int lstar = detail::argmax_lowest(p.transpose());
    const int lhat = classify(x) - 1;
    if (lhat < 0 || lhat >= L)
      throw std::invalid_argument("excess_risk: classifier label outside 1..L");
    if (method == RiskMethod::Conditional) {
      acc.add(p[lstar] - p[lhat]);
    } else {
      const int yl = rng.categorical(p.data(), L);
      acc.add((yl == lhat ? 0.0 : 1.0) - (yl == lstar ? 0.0 : 1.0));
    }
  }
  return {acc.mean, acc.std_error(), n_mc, method};
}

/// Estimated c.d.f. of the top-two conditional probability gap
/// p_(1)(X) - p_(2)(X) on a grid, plus a log-log least-squares fit
/// P(gap <= h) ~ c * h^alpha using the grid points with estimates
/// strictly inside (0, 1). Fewer than two usable points leave the fit
/// undefined.
struct MarginProfile {
  std::vector<double> grid;
  std::vector<double> probs;
  double alpha_hat = std::numeric_limits<double>::quiet_NaN();
  double c_hat = std::numeric_limits<double>::quiet_NaN();
  bool fit_defined = false;
  long n_mc = 0;
};

template <class Sampler>
MarginProfile margin_profile(const CoeffMatrix& B_true, Sampler&& sampler,
                             const std::vector<double>& h_grid, long n_mc,
                             std::uint64_t seed) {
  detail::check_mc_args(n_mc);
  if (h_grid.empty())
    throw std::invalid_argument("margin_profile: empty grid");
  for (size_t k = 0; k < h_grid.size(); ++k) {
    if (!(h_grid[k] > 0.0) || !std::isfinite(h_grid[k]))
      throw std::invalid_argument("margin_profile: grid must be positive");
    if (k > 0 && h_grid[k] <= h_grid[k - 1])
      throw std::invalid_argument(
          "margin_profile: grid must be strictly increasing");
  }

  Rng rng(seed);
  std::vector<long> counts(h_grid.size(), 0);
  for (long i = 0; i < n_mc; ++i) {
    const Eigen::VectorXd x = sampler(rng);
    const Eigen::VectorXd p = softmax_probs(B_true, x);
    double p1 = -1.0, p2 = -1.0;
    for (Eigen::Index l = 0; l < p.size(); ++l) {
      if (p[l] > p1) {
        p2 = p1;
        p1 = p[l];
      } else if (p[l] > p2) {
        p2 = p[l];
      }
    }
    const double gap = p1 - p2;
    for (size_t k = 0; k < h_grid.size(); ++k)
      if (gap <= h_grid[k]) ++counts[k];
  }

  MarginProfile prof;
  prof.grid = h_grid;
  prof.n_mc = n_mc;
  prof.probs.resize(h_grid.size());
  for (size_t k = 0; k < h_grid.size(); ++k)
    prof.probs[k] =
        static_cast<double>(counts[k]) / static_cast<double>(n_mc);

  // Log-log fit over interior estimates only; endpoints 0 and 1 carry no
  // slope information.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long m = 0;
  for (size_t k = 0; k < h_grid.size(); ++k) {
    if (prof.probs[k] <= 0.0 || prof.probs[k] >= 1.0) continue;
    const double lx = std::log(h_grid[k]);
    const double ly = std::log(prof.probs[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double denom = m > 1 ? sxx - sx * sx / m : 0.0;
  if (m >= 2 && denom > 0.0) {
    prof.alpha_hat = (sxy - sx * sy / m) / denom;
    prof.c_hat = std::exp((sy - prof.alpha_hat * sx) / m);
    prof.fit_defined = true;
  }
  return prof;
}

/// Least-squares slope of ln(risk) against ln(n). Points with
/// nonpositive risk carry no information on a power law and are
/// dropped; fewer than three usable points is an error.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // fitted ln(risk) at ln(n) = 0
  double r2 = 1.0;
  int n_used = 0;
};

inline RateFit rate_fit(const std::vector<std::pair<double, double>>& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int m = 0;
  for (const auto& [n, risk] : points) {
    if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(risk)) continue;
    if (!(risk > 0.0)) continue;
    const double lx = std::log(n);
    const double ly = std::log(risk);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
    ++m;
  }
  if (m < 3)
    throw std::invalid_argument(
        "rate_fit: need at least three points with positive risk");
  const double vxx = sxx - sx * sx / m;
  const double vyy = syy - sy * sy / m;
  const double vxy = sxy - sx * sy / m;
  if (!(vxx > 0.0))
    throw std::invalid_argument("rate_fit: sample sizes must not be constant");
  RateFit fit;
  fit.slope = vxy / vxx;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.n_used = m;
  // r2 = 1 exactly for a constant response (slope 0 fits perfectly).
  fit.r2 = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return fit;
}

}  // namespace sparsemnl
