#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "types.hpp"

namespace sparsemnl {

namespace detail {

inline void check_simplex_pair(const Eigen::VectorXd& p,
                               const Eigen::VectorXd& q, const char* who) {
  if (p.size() != q.size() || p.size() < 2)
    throw std::invalid_argument(std::string(who) + ": length mismatch");
  // Tolerant validation: inputs typically come out of softmax and carry
  // roundoff of their own.
  if ((p.array() < -1e-12).any() || (q.array() < -1e-12).any())
    throw std::invalid_argument(std::string(who) + ": negative entry");
  if (std::abs(p.sum() - 1.0) > 1e-8 || std::abs(q.sum() - 1.0) > 1e-8)
    throw std::invalid_argument(std::string(who) + ": not on the simplex");
}

}  // namespace detail

/// KL(p || q) = sum_l p_l ln(p_l / q_l) with the conventions 0 ln 0 = 0
/// and q_l = 0 < p_l giving +infinity.
inline double kl_divergence(const Eigen::VectorXd& p,
                            const Eigen::VectorXd& q) {
  detail::check_simplex_pair(p, q, "kl_divergence");
  double kl = 0.0;
  for (Eigen::Index l = 0; l < p.size(); ++l) {
    if (p[l] <= 0.0) continue;
    if (q[l] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[l] * std::log(p[l] / q[l]);
  }
  return kl;
}

/// Squared Hellinger distance (1/2) sum_l (sqrt(p_l) - sqrt(q_l))^2,
/// always in [0, 1].
inline double hellinger_sq(const Eigen::VectorXd& p,
                           const Eigen::VectorXd& q) {
  detail::check_simplex_pair(p, q, "hellinger_sq");
  double h = 0.0;
  for (Eigen::Index l = 0; l < p.size(); ++l) {
    const double sp = std::sqrt(std::max(p[l], 0.0));
    const double sq = std::sqrt(std::max(q[l], 0.0));
    h += (sp - sq) * (sp - sq);
  }
  return 0.5 * h;
}

/// Design-weighted coefficient distance |B1 - B2|_G with G = X^T X / n:
/// sqrt(tr((B1-B2)^T G (B1-B2))) = |X (B1-B2)|_F / sqrt(n). Both matrices
/// must use the same convention, otherwise their difference mixes
/// representatives of different parametrizations.
inline double weighted_frobenius(const CoeffMatrix& B1, const CoeffMatrix& B2,
                                 const DesignMatrix& X) {
  if (B1.dim() != B2.dim() || B1.classes() != B2.classes())
    throw std::invalid_argument("weighted_frobenius: shape mismatch");
  if (B1.convention != B2.convention)
    throw std::invalid_argument("weighted_frobenius: convention mismatch");
  if (X.d() != B1.dim())
    throw std::invalid_argument("weighted_frobenius: X dimension mismatch");
  const Eigen::MatrixXd D = X.values * (B1.values - B2.values);
  return std::sqrt(D.squaredNorm() / static_cast<double>(X.n()));
}

}  // namespace sparsemnl
