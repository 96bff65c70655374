#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "multinomial.hpp"
#include "types.hpp"

namespace sparsemnl {

/// Nonincreasing, nonnegative penalty weights, one per feature row.
struct LambdaSeq {
  std::vector<double> values;

  LambdaSeq() = default;
  explicit LambdaSeq(std::vector<double> v) : values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("LambdaSeq: empty");
    for (size_t j = 0; j < values.size(); ++j) {
      if (!std::isfinite(values[j]) || values[j] < 0.0)
        throw std::invalid_argument("LambdaSeq: weights must be >= 0");
      if (j > 0 && values[j] > values[j - 1] )
        throw std::invalid_argument("LambdaSeq: weights must be nonincreasing");
    }
  }

  static LambdaSeq constant(int d, double value) {
    return LambdaSeq(std::vector<double>(static_cast<size_t>(d), value));
  }

  int size() const { return static_cast<int>(values.size()); }
};

/// Flat weight lambda = c0_tune * sqrt((L + ln d) / n), replicated d
/// times. This is the group-lasso level that matches the complexity of
/// d candidate rows with L classes at sample size n.
inline LambdaSeq lambda_equal(int d, int L, Eigen::Index n, double c0_tune) {
  if (d < 1 || L < 2 || n < 1)
    throw std::invalid_argument("lambda_equal: need d >= 1, L >= 2, n >= 1");
  if (!(c0_tune > 0.0) || !std::isfinite(c0_tune))
    throw std::invalid_argument("lambda_equal: c0_tune must be positive");
  const double v = c0_tune * std::sqrt((L + std::log(static_cast<double>(d))) /
                                       static_cast<double>(n));
  return LambdaSeq::constant(d, v);
}

/// Rank-decaying weights lambda_j = c0_tune * sqrt((L + ln(d/j)) / n).
/// The first entry equals the flat level; the last is
/// c0_tune * sqrt(L / n).
inline LambdaSeq lambda_variable(int d, int L, Eigen::Index n,
                                 double c0_tune) {
  if (d < 1 || L < 2 || n < 1)
    throw std::invalid_argument(
        "lambda_variable: need d >= 1, L >= 2, n >= 1");
  if (!(c0_tune > 0.0) || !std::isfinite(c0_tune))
    throw std::invalid_argument("lambda_variable: c0_tune must be positive");
  std::vector<double> v(static_cast<size_t>(d));
  for (int j = 1; j <= d; ++j)
    v[static_cast<size_t>(j - 1)] =
        c0_tune * std::sqrt((L + std::log(static_cast<double>(d) / j)) /
                            static_cast<double>(n));
  return LambdaSeq(std::move(v));
}

/// Sorted-group norm J(B) = sum_j lambda_j * |B|_(j), where |B|_(1) >=
/// |B|_(2) >= ... are the row 2-norms in decreasing order.
inline double group_slope_norm(const Eigen::MatrixXd& B,
                               const LambdaSeq& lambda) {
  if (B.rows() != lambda.size())
    throw std::invalid_argument("group_slope_norm: length mismatch");
  std::vector<double> r(static_cast<size_t>(B.rows()));
  for (Eigen::Index j = 0; j < B.rows(); ++j)
    r[static_cast<size_t>(j)] = B.row(j).norm();
  std::sort(r.begin(), r.end(), std::greater<double>());
  double s = 0.0;
  for (size_t j = 0; j < r.size(); ++j) s += lambda.values[j] * r[j];
  return s;
}

inline double group_slope_norm(const CoeffMatrix& B, const LambdaSeq& lambda) {
  return group_slope_norm(B.values, lambda);
}

/// Dual of the sorted-group norm: max_k (sum of the k largest row norms)
/// / (lambda_1 + ... + lambda_k). J*(G) <= 1 is the first-order
/// stationarity certificate used by the solvers. An all-zero lambda has
/// the degenerate dual 0 for G = 0 and +infinity otherwise.
inline double dual_sorted_group_norm(const Eigen::MatrixXd& G,
                                     const LambdaSeq& lambda) {
  if (G.rows() != lambda.size())
    throw std::invalid_argument("dual_sorted_group_norm: length mismatch");
  std::vector<double> r(static_cast<size_t>(G.rows()));
  for (Eigen::Index j = 0; j < G.rows(); ++j)
    r[static_cast<size_t>(j)] = G.row(j).norm();
  std::sort(r.begin(), r.end(), std::greater<double>());
  if (lambda.values[0] == 0.0)
    return r[0] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  double best = 0.0, num = 0.0, den = 0.0;
  for (size_t k = 0; k < r.size(); ++k) {
    num += r[k];
    den += lambda.values[k];
    best = std::max(best, num / den);
  }
  return best;
}

namespace detail {

/// Isotonic stage of the sorted-l1 prox: given y nonincreasing and
/// weights w nonincreasing, returns the minimizer of
/// (1/2)|x - (y - w)|^2 over nonincreasing nonnegative x.
/// Pool-adjacent-violators on a block stack; the nonnegativity clamp at
/// the end is exact for this objective.
inline Eigen::VectorXd prox_isotonic_sorted(const Eigen::VectorXd& y,
                                            const Eigen::VectorXd& w) {
  const Eigen::Index n = y.size();
  std::vector<Eigen::Index> start(static_cast<size_t>(n));
  std::vector<double> sum(static_cast<size_t>(n)), avg(static_cast<size_t>(n));
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    start[static_cast<size_t>(t)] = i;
    sum[static_cast<size_t>(t)] = y[i] - w[i];
    avg[static_cast<size_t>(t)] = sum[static_cast<size_t>(t)];
    ++t;
    while (t > 1 && avg[static_cast<size_t>(t - 2)] <=
                        avg[static_cast<size_t>(t - 1)]) {
      sum[static_cast<size_t>(t - 2)] += sum[static_cast<size_t>(t - 1)];
      avg[static_cast<size_t>(t - 2)] =
          sum[static_cast<size_t>(t - 2)] /
          static_cast<double>(i - start[static_cast<size_t>(t - 2)] + 1);
      --t;
    }
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index b = 0; b < t; ++b) {
    const double v = std::max(avg[static_cast<size_t>(b)], 0.0);
    const Eigen::Index end =
        (b + 1 < t) ? start[static_cast<size_t>(b + 1)] : n;
    for (Eigen::Index i = start[static_cast<size_t>(b)]; i < end; ++i)
      x[i] = v;
  }
  return x;
}

}  // namespace detail

/// Proximal map of t * J at V: argmin_Z (1/2)|Z - V|_F^2 + t J(Z).
/// Row norms are shrunk through the sorted-l1 prox and each row is
/// rescaled along its own direction; row supports never grow.
inline Eigen::MatrixXd prox_group_slope(const Eigen::MatrixXd& V,
                                        const LambdaSeq& lambda, double t) {
  if (V.rows() != lambda.size())
    throw std::invalid_argument("prox_group_slope: length mismatch");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::invalid_argument("prox_group_slope: t must be >= 0");
  if (t == 0.0) return V;
  const Eigen::Index d = V.rows();
  Eigen::VectorXd r(d);
  for (Eigen::Index j = 0; j < d; ++j) r[j] = V.row(j).norm();

  std::vector<Eigen::Index> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return r[a] > r[b]; });

  Eigen::VectorXd y(d), w(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    y[k] = r[order[static_cast<size_t>(k)]];
    w[k] = t * lambda.values[static_cast<size_t>(k)];
  }
  const Eigen::VectorXd s = detail::prox_isotonic_sorted(y, w);

  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(d, V.cols());
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index j = order[static_cast<size_t>(k)];
    if (s[k] > 0.0 && r[j] > 0.0) Z.row(j) = V.row(j) * (s[k] / r[j]);
  }
  return Z;
}

enum class FitStatus { Converged, Stalled, IterationCap };

inline const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Converged:
      return "converged";
    case FitStatus::Stalled:
      return "stalled";
    default:
      return "iteration_cap";
  }
}

struct SlopeOptions {
  int max_iter = 10000;
  /// Stall when the relative objective change drops below this.
  double rel_tol = 1e-10;
  /// First-order certificate target: max(0, J*(grad) - 1) plus the
  /// relative alignment defect |J(B) + <grad, B>| / max(1, J(B)).
  double kkt_tol = 1e-6;
  /// The certificate costs one extra gradient, so it is only evaluated
  /// every kkt_every accepted steps (and whenever the objective stalls).
  int kkt_every = 10;
  /// A row is in the support when its norm exceeds this fraction of the
  /// largest row norm.
  double support_rel_threshold = 1e-6;
};

struct SlopeFit {
  CoeffMatrix coefficients;  // ZeroRowMean
  /// Objective values of the accepted iterates, starting at B = 0.
  std::vector<double> objective_trace;
  /// Positions in objective_trace where momentum was discarded.
  std::vector<int> restarts;
  double objective = 0.0;
  double kkt_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  FitStatus status = FitStatus::IterationCap;
  bool converged = false;
  ModelSubset support;
  /// Largest |row sum| seen across accepted iterates; the iterates live
  /// on the zero-row-mean manifold up to roundoff.
  double max_row_mean_drift = 0.0;
};

namespace detail {

/// Smooth part of the penalized objective: the sample-averaged negative
/// log-likelihood over full d x L coefficient matrices.
struct MnlSmooth {
  const Eigen::MatrixXd& X;
  const std::vector<int>& labels;
  int L;
  double inv_n;

  MnlSmooth(const DesignMatrix& X_, const LabelVector& y_)
      : X(X_.values),
        labels(y_.labels),
        L(y_.num_classes),
        inv_n(1.0 / static_cast<double>(X_.n())) {}

  double value(const Eigen::MatrixXd& B) const {
    const Eigen::MatrixXd S = X * B;
    double f = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i)
      f += log_sum_exp(S.row(i)) - S(i, labels[static_cast<size_t>(i)] - 1);
    return f * inv_n;
  }

  double value_and_grad(const Eigen::MatrixXd& B, Eigen::MatrixXd& G) const {
    Eigen::MatrixXd S = X * B;
    double f = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      const double lse = log_sum_exp(S.row(i));
      f += lse - S(i, labels[static_cast<size_t>(i)] - 1);
      S.row(i) = (S.row(i).array() - lse).exp();
      S(i, labels[static_cast<size_t>(i)] - 1) -= 1.0;
    }
    G.noalias() = X.transpose() * S;
    G *= inv_n;
    return f * inv_n;
  }
};

/// Accelerated proximal gradient with backtracking (nonincreasing step)
/// and a function-value restart rule: a step that would increase the
/// objective is discarded and retried without momentum, so the accepted
/// trace is nonincreasing up to a 1e-12 relative floor.
template <class Prox>
SlopeFit fit_prox_gradient(const DesignMatrix& X, const LabelVector& y,
                           const LambdaSeq& lambda, Prox&& prox,
                           const SlopeOptions& opts) {
  if (y.n() != X.n())
    throw std::invalid_argument("slope fit: X and y lengths differ");
  if (lambda.size() != X.d())
    throw std::invalid_argument("slope fit: lambda length != d");
  if (opts.max_iter < 1)
    throw std::invalid_argument("slope fit: max_iter must be >= 1");

  const Eigen::Index d = X.d();
  const int L = y.num_classes;
  const MnlSmooth smooth(X, y);
  const bool null_penalty = lambda.values[0] == 0.0;

  auto objective_J = [&](const Eigen::MatrixXd& B) {
    return group_slope_norm(B, lambda);
  };
  auto row_mean_drift = [&](const Eigen::MatrixXd& B) {
    return B.rowwise().sum().cwiseAbs().maxCoeff();
  };

  SlopeFit fit;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, L);
  Eigen::MatrixXd Bprev = B, Y = B, G(d, L);
  double theta = 1.0;
  bool momentum_on = false;
  double t = 1.0;

  double F = smooth.value(B);  // J(0) = 0
  fit.objective_trace.push_back(F);

  double kkt = std::numeric_limits<double>::infinity();
  bool kkt_at_B = false;
  auto kkt_residual = [&](const Eigen::MatrixXd& Bc) {
    Eigen::MatrixXd Gc(d, L);
    smooth.value_and_grad(Bc, Gc);
    if (null_penalty) return Gc.norm();
    const double dual = dual_sorted_group_norm(Gc, lambda);
    const double jb = objective_J(Bc);
    const double align =
        std::abs(jb + (Gc.array() * Bc.array()).sum()) / std::max(1.0, jb);
    return std::max(0.0, dual - 1.0) + align;
  };

  fit.status = FitStatus::IterationCap;
  for (int it = 1; it <= opts.max_iter; ++it) {
    fit.iterations = it;
    const double fY = smooth.value_and_grad(Y, G);

    Eigen::MatrixXd cand;
    double fc = 0.0;
    while (true) {
      cand = prox(Y - t * G, t);
      const Eigen::MatrixXd diff = cand - Y;
      fc = smooth.value(cand);
      const double quad = fY + (G.array() * diff.array()).sum() +
                          diff.squaredNorm() / (2.0 * t);
      if (fc <= quad + 1e-12 * std::max(1.0, std::abs(fc))) break;
      if (t < 1e-14) break;
      t *= 0.5;
    }
    const double Fc = fc + objective_J(cand);
    const double Fprev = fit.objective_trace.back();
    const double slack =
        momentum_on ? 0.0 : 1e-12 * std::max(1.0, std::abs(Fprev));

    if (Fc > Fprev + slack) {
      if (momentum_on) {
        // Restart: forget momentum and redo a plain step from B.
        fit.restarts.push_back(
            static_cast<int>(fit.objective_trace.size()));
        theta = 1.0;
        Y = B;
        momentum_on = false;
        continue;
      }
      // A plain step no longer decreases the objective: numerical floor.
      kkt = kkt_residual(B);
      kkt_at_B = true;
      fit.status =
          kkt <= opts.kkt_tol ? FitStatus::Converged : FitStatus::Stalled;
      break;
    }

    Bprev = B;
    B = std::move(cand);
    fit.objective_trace.push_back(Fc);
    fit.max_row_mean_drift =
        std::max(fit.max_row_mean_drift, row_mean_drift(B));
    kkt_at_B = false;

    const double rel = std::abs(Fprev - Fc) / std::max(1.0, std::abs(Fc));
    const bool stalled = rel <= opts.rel_tol;
    if (stalled || it % opts.kkt_every == 0) {
      kkt = kkt_residual(B);
      kkt_at_B = true;
      if (kkt <= opts.kkt_tol) {
        fit.status = FitStatus::Converged;
        break;
      }
      if (stalled) {
        fit.status = FitStatus::Stalled;
        break;
      }
    }

    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    Y = B + ((theta - 1.0) / theta_next) * (B - Bprev);
    theta = theta_next;
    momentum_on = true;
  }

  if (!kkt_at_B) {
    kkt = kkt_residual(B);
    if (kkt <= opts.kkt_tol) fit.status = FitStatus::Converged;
  }

  fit.kkt_residual = kkt;
  fit.converged = fit.status == FitStatus::Converged;
  fit.objective = fit.objective_trace.back();
  // The iterates already sit on the zero-row-mean manifold up to
  // roundoff; two-pass centering removes the residual drift.
  B.colwise() -= Eigen::VectorXd(B.rowwise().mean());
  B.colwise() -= Eigen::VectorXd(B.rowwise().mean());
  fit.coefficients = CoeffMatrix(std::move(B), Convention::ZeroRowMean);

  const Eigen::VectorXd rn = fit.coefficients.values.rowwise().norm();
  const double rmax = rn.maxCoeff();
  std::vector<int> sup;
  for (Eigen::Index j = 0; j < d; ++j)
    if (rmax > 0.0 && rn[j] > opts.support_rel_threshold * rmax)
      sup.push_back(static_cast<int>(j) + 1);
  fit.support = ModelSubset(std::move(sup));
  return fit;
}

}  // namespace detail

/// Penalized fit with the sorted-group norm: minimizes the averaged
/// negative log-likelihood plus sum_j lambda_j |B|_(j).
inline SlopeFit fit_group_slope(const DesignMatrix& X, const LabelVector& y,
                                const LambdaSeq& lambda,
                                const SlopeOptions& opts = {}) {
  auto prox = [&lambda](const Eigen::MatrixXd& V, double t) {
    return prox_group_slope(V, lambda, t);
  };
  return detail::fit_prox_gradient(X, y, lambda, prox, opts);
}

/// Penalized fit with the flat group norm lambda * sum_j |row_j|_2.
/// Same engine as the sorted version but with the separable per-row
/// soft-threshold prox; with a flat weight vector the two produce
/// identical arithmetic.
inline SlopeFit fit_group_lasso(const DesignMatrix& X, const LabelVector& y,
                                double lambda_scalar,
                                const SlopeOptions& opts = {}) {
  if (!(lambda_scalar >= 0.0) || !std::isfinite(lambda_scalar))
    throw std::invalid_argument("fit_group_lasso: lambda must be >= 0");
  const LambdaSeq lambda =
      LambdaSeq::constant(static_cast<int>(X.d()), lambda_scalar);
  auto prox = [lambda_scalar](const Eigen::MatrixXd& V, double t) {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(V.rows(), V.cols());
    for (Eigen::Index j = 0; j < V.rows(); ++j) {
      const double r = V.row(j).norm();
      const double s = r - t * lambda_scalar;
      if (s > 0.0 && r > 0.0) Z.row(j) = V.row(j) * (s / r);
    }
    return Z;
  };
  return detail::fit_prox_gradient(X, y, lambda, prox, opts);
}

}  // namespace sparsemnl
