#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "generators.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace sparsemnl {

namespace detail {

/// log(sum_l exp(s_l)) with max subtraction.
inline double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& s) {
  const double m = s.maxCoeff();
  return m + std::log((s.array() - m).exp().sum());
}

/// Row-wise softmax of a score matrix, overflow-safe.
inline void softmax_rows_inplace(Eigen::MatrixXd& scores) {
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double m = scores.row(i).maxCoeff();
    scores.row(i) = (scores.row(i).array() - m).exp();
    scores.row(i) /= scores.row(i).sum();
  }
}

/// Lowest index attaining the maximum of s; returns a 0-based index.
inline int argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& s) {
  int best = 0;
  for (int l = 1; l < s.size(); ++l)
    if (s[l] > s[best]) best = l;
  return best;
}

}  // namespace detail

/// Class probability vector p(x) with p_l proportional to exp(beta_l . x).
inline Eigen::VectorXd softmax_probs(const CoeffMatrix& B,
                                     const Eigen::VectorXd& x) {
  if (x.size() != B.dim())
    throw std::invalid_argument("softmax_probs: x has wrong dimension");
  Eigen::RowVectorXd s = x.transpose() * B.values;
  const double m = s.maxCoeff();
  Eigen::VectorXd p = (s.array() - m).exp().transpose();
  p /= p.sum();
  return p;
}

/// Conditional log-likelihood sum_i log p_{y_i}(x_i). Invariant under a
/// shared shift of all class columns, hence under convention changes.
inline double log_likelihood(const CoeffMatrix& B, const DesignMatrix& X,
                             const LabelVector& y) {
  if (X.d() != B.dim())
    throw std::invalid_argument("log_likelihood: X and B dimensions differ");
  if (y.n() != X.n())
    throw std::invalid_argument("log_likelihood: X and y lengths differ");
  if (y.num_classes != B.classes())
    throw std::invalid_argument("log_likelihood: class count mismatch");
  const Eigen::MatrixXd S = X.values * B.values;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    ll += S(i, y.labels[i] - 1) - detail::log_sum_exp(S.row(i));
  return ll;
}

/// Gradient of the negative log-likelihood; entry (j, l) is
/// sum_i x_ij (p_l(x_i) - 1{y_i = l}). The raw gradient has exactly zero
/// row sums, so it is tangent to the ZeroRowMean manifold; under
/// ReferenceLast the frozen last column is zeroed out.
inline Eigen::MatrixXd neg_loglik_gradient(const CoeffMatrix& B,
                                           const DesignMatrix& X,
                                           const LabelVector& y) {
  if (X.d() != B.dim() || y.n() != X.n() || y.num_classes != B.classes())
    throw std::invalid_argument("neg_loglik_gradient: shape mismatch");
  Eigen::MatrixXd P = X.values * B.values;
  detail::softmax_rows_inplace(P);
  for (Eigen::Index i = 0; i < P.rows(); ++i) P(i, y.labels[i] - 1) -= 1.0;
  Eigen::MatrixXd G = X.values.transpose() * P;
  if (B.convention == Convention::ReferenceLast)
    G.col(G.cols() - 1).setZero();
  return G;
}

/// Most probable class under B at x, 1-based; ties go to the lowest index.
inline int bayes_classify(const CoeffMatrix& B, const Eigen::VectorXd& x) {
  if (x.size() != B.dim())
    throw std::invalid_argument("bayes_classify: x has wrong dimension");
  const Eigen::RowVectorXd s = x.transpose() * B.values;
  return detail::argmax_lowest(s) + 1;
}

/// Plain linear argmax rule over a d x L score matrix. Used to carry a
/// fitted classifier into the risk estimators without dragging the
/// convention tag along (the argmax is convention-invariant).
struct LinearClassifier {
  Eigen::MatrixXd coef;  // d x L

  int operator()(const Eigen::VectorXd& x) const {
    const Eigen::RowVectorXd s = x.transpose() * coef;
    return detail::argmax_lowest(s) + 1;
  }
};

/// Draw n feature rows from gen and labels from the model p(. | x_i, B).
/// The draw order is row-major (features of row i, then its label), so a
/// given (B, gen, n, seed) reproduces the dataset bit for bit.
inline std::pair<DesignMatrix, LabelVector> sample_dataset(
    const CoeffMatrix& B, const FeatureGenerator& gen, Eigen::Index n,
    std::uint64_t seed) {
  if (gen.dim != B.dim())
    throw std::invalid_argument("sample_dataset: generator dim != B rows");
  if (n < 1) throw std::invalid_argument("sample_dataset: need n >= 1");
  Rng rng(seed);
  const int L = static_cast<int>(B.classes());
  Eigen::MatrixXd X(n, gen.dim);
  std::vector<int> labels(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = gen(rng);
    X.row(i) = x.transpose();
    const Eigen::VectorXd p = softmax_probs(B, x);
    labels[static_cast<size_t>(i)] = rng.categorical(p.data(), L) + 1;
  }
  return {DesignMatrix(std::move(X)), LabelVector(std::move(labels), L)};
}

struct AssumptionAReport {
  bool holds = false;
  /// max_{i,l} |beta_l . x_i|; the check passes iff this is < c0.
  double worst_margin = 0.0;
};

/// Verifies that every conditional class probability on the sample stays
/// inside (delta, 1-delta). Scores are compared in ReferenceLast form,
/// where the bound is exactly |beta_l . x| < ln((1-delta)/delta).
inline AssumptionAReport check_assumption_a(const CoeffMatrix& B,
                                            const DesignMatrix& X,
                                            const MarginConfig& cfg) {
  if (X.d() != B.dim())
    throw std::invalid_argument("check_assumption_a: shape mismatch");
  const CoeffMatrix Bref = B.with_convention(Convention::ReferenceLast);
  const double worst = (X.values * Bref.values).array().abs().maxCoeff();
  return {worst < cfg.c0(), worst};
}

}  // namespace sparsemnl
