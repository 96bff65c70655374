#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "multinomial.hpp"
#include "types.hpp"

namespace sparsemnl {

/// Complexity penalty parameters. c1 weighs the per-class cost of an
/// active feature, c2 the subset-counting cost; both default to 2.
struct PenaltyConfig {
  double c1 = 2.0;
  double c2 = 2.0;
  int L = 2;
  int d = 1;

  PenaltyConfig() = default;
  PenaltyConfig(double c1_, double c2_, int L_, int d_)
      : c1(c1_), c2(c2_), L(L_), d(d_) {
    validate();
  }

  void validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0))
      throw std::invalid_argument("PenaltyConfig: c1, c2 must be positive");
    if (L < 2) throw std::invalid_argument("PenaltyConfig: L must be >= 2");
    if (d < 1) throw std::invalid_argument("PenaltyConfig: d must be >= 1");
  }
};

/// Pen(m) = c1 m (L-1) + c2 m ln(d e / m), with Pen(0) = 0. The first
/// term charges the m(L-1) free parameters, the second the log-count
/// ln C(d, m) <= m ln(d e / m) of subsets of size m.
inline double penalty(int m, const PenaltyConfig& cfg) {
  cfg.validate();
  if (m < 0 || m > cfg.d)
    throw std::invalid_argument("penalty: m outside [0, d]");
  if (m == 0) return 0.0;
  return cfg.c1 * m * (cfg.L - 1) +
         cfg.c2 * m * (1.0 + std::log(static_cast<double>(cfg.d) / m));
}

struct NewtonOptions {
  int max_iter = 200;
  /// Convergence when the projected-gradient norm drops below
  /// tol_scale * max(1, n).
  double tol_scale = 1e-8;
};

struct FitReport {
  CoeffMatrix coefficients;  // d x L, ReferenceLast, zero rows off support
  double negloglik = 0.0;
  int iterations = 0;
  double grad_residual = 0.0;
  bool converged = false;
};

namespace detail {

/// Smooth part of the restricted problem: negative log-likelihood as a
/// function of the m x (L-1) free block (reference class column frozen
/// at zero). Returns f and optionally the head probabilities P (n x L-1)
/// and gradient G (m x L-1).
struct RestrictedMnl {
  Eigen::MatrixXd Xm;       // n x m
  std::vector<int> labels;  // 1-based
  int L = 2;

  double value(const Eigen::MatrixXd& Bm) const {
    const Eigen::MatrixXd S = Xm * Bm;
    double f = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      const double mx = std::max(0.0, S.row(i).maxCoeff());
      double se = std::exp(-mx);
      for (Eigen::Index k = 0; k < S.cols(); ++k)
        se += std::exp(S(i, k) - mx);
      const double lse = mx + std::log(se);
      const int yi = labels[static_cast<size_t>(i)];
      f += lse - (yi < L ? S(i, yi - 1) : 0.0);
    }
    return f;
  }

  double value_probs_grad(const Eigen::MatrixXd& Bm, Eigen::MatrixXd& P,
                          Eigen::MatrixXd& G) const {
    Eigen::MatrixXd S = Xm * Bm;
    double f = 0.0;
    P.resize(S.rows(), S.cols());
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      const double mx = std::max(0.0, S.row(i).maxCoeff());
      double se = std::exp(-mx);
      for (Eigen::Index k = 0; k < S.cols(); ++k) {
        P(i, k) = std::exp(S(i, k) - mx);
        se += P(i, k);
      }
      P.row(i) /= se;
      const double lse = mx + std::log(se);
      const int yi = labels[static_cast<size_t>(i)];
      f += lse - (yi < L ? S(i, yi - 1) : 0.0);
    }
    Eigen::MatrixXd R = P;
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
      const int yi = labels[static_cast<size_t>(i)];
      if (yi < L) R(i, yi - 1) -= 1.0;
    }
    G = Xm.transpose() * R;
    return f;
  }

  /// Dense Hessian of f in class-major vec order: index (l, a) -> l*m + a.
  Eigen::MatrixXd hessian(const Eigen::MatrixXd& P) const {
    const Eigen::Index m = Xm.cols(), K = P.cols();
    Eigen::MatrixXd H(m * K, m * K);
    for (Eigen::Index l = 0; l < K; ++l)
      for (Eigen::Index k = l; k < K; ++k) {
        Eigen::VectorXd w =
            (l == k)
                ? (P.col(l).array() * (1.0 - P.col(l).array())).matrix().eval()
                : (-P.col(l).array() * P.col(k).array()).matrix().eval();
        const Eigen::MatrixXd blk =
            Xm.transpose() * w.asDiagonal() * Xm;
        H.block(l * m, k * m, m, m) = blk;
        if (k != l) H.block(k * m, l * m, m, m) = blk.transpose();
      }
    return H;
  }
};

/// Project every class column of Bm onto the ball of radius c0.
inline void project_columns(Eigen::MatrixXd& Bm, double c0) {
  for (Eigen::Index l = 0; l < Bm.cols(); ++l) {
    const double nrm = Bm.col(l).norm();
    if (nrm > c0) Bm.col(l) *= c0 / nrm;
  }
}

inline double projected_gradient_norm(const Eigen::MatrixXd& Bm,
                                      const Eigen::MatrixXd& G, double c0) {
  Eigen::MatrixXd step = Bm - G;
  project_columns(step, c0);
  return (Bm - step).norm();
}

}  // namespace detail

/// Maximum-likelihood fit restricted to the feature subset M, with each
/// class coefficient vector confined to the ball |beta_l|_2 <= c0.
/// Projected Newton with Armijo backtracking and a projected-gradient
/// fallback; an empty subset returns the null model directly.
/// Non-convergence within the iteration budget is reported through the
/// converged flag, never by throwing.
inline FitReport fit_constrained_mle(const DesignMatrix& X,
                                     const LabelVector& y,
                                     const ModelSubset& M,
                                     const MarginConfig& margin,
                                     const NewtonOptions& opts = {}) {
  const Eigen::Index n = X.n(), d = X.d();
  const int L = y.num_classes;
  if (y.n() != n)
    throw std::invalid_argument("fit_constrained_mle: X and y lengths differ");
  if (!M.features.empty() && M.features.back() > d)
    throw std::invalid_argument("fit_constrained_mle: subset index > d");

  const Eigen::Index m = M.size();
  if (m == 0) {
    FitReport rep;
    rep.coefficients = CoeffMatrix(Eigen::MatrixXd::Zero(d, L),
                                   Convention::ReferenceLast);
    rep.negloglik = static_cast<double>(n) * std::log(static_cast<double>(L));
    rep.converged = true;
    return rep;
  }

  detail::RestrictedMnl prob;
  prob.Xm.resize(n, m);
  for (Eigen::Index a = 0; a < m; ++a)
    prob.Xm.col(a) = X.values.col(M.features[static_cast<size_t>(a)] - 1);
  prob.labels = y.labels;
  prob.L = L;

  const double c0 = margin.c0();
  const double tol = opts.tol_scale * std::max<double>(1.0, double(n));
  const Eigen::Index K = L - 1;

  Eigen::MatrixXd Bm = Eigen::MatrixXd::Zero(m, K);
  Eigen::MatrixXd P, G;
  double f = prob.value_probs_grad(Bm, P, G);

  int iter = 0;
  bool converged = false;
  double residual = detail::projected_gradient_norm(Bm, G, c0);
  while (iter < opts.max_iter) {
    if (residual <= tol) {
      converged = true;
      break;
    }
    ++iter;

    // Newton direction on the free block; fall back to steepest descent
    // if the solve fails or the direction is not a descent direction.
    Eigen::MatrixXd H = prob.hessian(P);
    H.diagonal().array() += 1e-12 * (1.0 + H.trace());
    Eigen::Map<const Eigen::VectorXd> gvec(G.data(), G.size());
    Eigen::VectorXd dvec = -Eigen::LDLT<Eigen::MatrixXd>(H).solve(gvec);
    bool steepest = false;
    if (!dvec.allFinite() || gvec.dot(dvec) >= 0.0) {
      dvec = -gvec;
      steepest = true;
    }

    auto line_search = [&](const Eigen::VectorXd& dir, Eigen::MatrixXd& out,
                           double& f_out) {
      const Eigen::Map<const Eigen::MatrixXd> D(dir.data(), m, K);
      double t = 1.0;
      while (t > 0x1.0p-40) {
        Eigen::MatrixXd cand = Bm + t * D;
        detail::project_columns(cand, c0);
        const double gain = (G.array() * (cand - Bm).array()).sum();
        if (gain < 0.0) {
          const double fc = prob.value(cand);
          if (fc <= f + 1e-4 * gain) {
            out = std::move(cand);
            f_out = fc;
            return true;
          }
        }
        t *= 0.5;
      }
      return false;
    };

    Eigen::MatrixXd next;
    double f_next = f;
    bool ok = line_search(dvec, next, f_next);
    if (!ok && !steepest) ok = line_search(-gvec, next, f_next);
    if (!ok) break;  // no further progress possible at this precision

    Bm = std::move(next);
    f = prob.value_probs_grad(Bm, P, G);
    residual = detail::projected_gradient_norm(Bm, G, c0);
  }
  if (residual <= tol) converged = true;

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, L);
  for (Eigen::Index a = 0; a < m; ++a)
    B.row(M.features[static_cast<size_t>(a)] - 1).head(K) = Bm.row(a);
  FitReport rep;
  rep.coefficients = CoeffMatrix(std::move(B), Convention::ReferenceLast);
  rep.negloglik = f;
  rep.iterations = iter;
  rep.grad_residual = residual;
  rep.converged = converged;
  return rep;
}

/// Number of candidate subsets of size at most max_size out of d
/// features, saturating at UINT64_MAX.
inline std::uint64_t enumeration_budget(int d, int max_size) {
  if (d < 1 || max_size < 0 || max_size > d)
    throw std::invalid_argument("enumeration_budget: bad arguments");
  long double total = 0.0L, comb = 1.0L;
  for (int mm = 0; mm <= max_size; ++mm) {
    total += comb;
    if (total > 1e18L) return UINT64_MAX;
    comb = comb * (d - mm) / (mm + 1);
  }
  return static_cast<std::uint64_t>(total);
}

/// Default subset-size cap: min(d, floor(n / (L-1))) keeps the largest
/// candidate model from having more free parameters than observations.
inline int default_max_subset_size(int d, Eigen::Index n, int L) {
  const Eigen::Index cap = n / (L - 1);
  return static_cast<int>(std::min<Eigen::Index>(d, cap));
}

struct CriterionRow {
  ModelSubset subset;
  double negloglik = 0.0;
  double penalty_value = 0.0;
  double criterion = 0.0;
};

struct SelectionResult {
  ModelSubset chosen;
  CoeffMatrix coefficients;
  std::vector<CriterionRow> table;
  FitReport chosen_fit;
};

struct SelectOptions {
  int jobs = 1;
  /// Hard cap on the number of fits; exceeding it raises GuardError.
  std::uint64_t budget = 1000000;
  NewtonOptions newton;
};

namespace detail {

/// All subsets of {1..d} with size in [0, max_size], size-ascending and
/// lexicographic within each size. This is also the tie-break order of
/// the selection below.
inline std::vector<ModelSubset> enumerate_subsets(int d, int max_size) {
  std::vector<ModelSubset> out;
  out.emplace_back();
  for (int mm = 1; mm <= max_size; ++mm) {
    std::vector<int> idx(static_cast<size_t>(mm));
    for (int i = 0; i < mm; ++i) idx[static_cast<size_t>(i)] = i + 1;
    while (true) {
      out.emplace_back(ModelSubset(idx));
      int i = mm - 1;
      while (i >= 0 && idx[static_cast<size_t>(i)] == d - (mm - 1 - i)) --i;
      if (i < 0) break;
      ++idx[static_cast<size_t>(i)];
      for (int k = i + 1; k < mm; ++k)
        idx[static_cast<size_t>(k)] = idx[static_cast<size_t>(k - 1)] + 1;
    }
  }
  return out;
}

}  // namespace detail

/// Exhaustive penalized-likelihood model selection: fits every subset up
/// to max_size and minimizes negloglik + Pen(|M|). Ties go to the
/// smaller subset, then to lexicographic order (both implied by the
/// enumeration order plus strict improvement). The candidate count is
/// checked against opts.budget before any work starts.
inline SelectionResult select_model(const DesignMatrix& X,
                                    const LabelVector& y,
                                    const PenaltyConfig& pen,
                                    const MarginConfig& margin, int max_size,
                                    const SelectOptions& opts = {}) {
  const int d = static_cast<int>(X.d());
  if (pen.d != d || pen.L != y.num_classes)
    throw std::invalid_argument("select_model: penalty config shape mismatch");
  if (max_size < 0 || max_size > d)
    throw std::invalid_argument("select_model: max_size outside [0, d]");
  const std::uint64_t count = enumeration_budget(d, max_size);
  if (count > opts.budget)
    throw GuardError("select_model: " + std::to_string(count) +
                     " candidate subsets exceed the budget of " +
                     std::to_string(opts.budget) +
                     "; lower max_size or use a convex method");

  const std::vector<ModelSubset> subsets =
      detail::enumerate_subsets(d, max_size);
  std::vector<CriterionRow> rows(subsets.size());

  auto fit_row = [&](size_t i) {
    const ModelSubset& M = subsets[i];
    const FitReport rep = fit_constrained_mle(X, y, M, margin, opts.newton);
    rows[i].subset = M;
    rows[i].negloglik = rep.negloglik;
    rows[i].penalty_value = penalty(M.size(), pen);
    rows[i].criterion = rows[i].negloglik + rows[i].penalty_value;
  };

  if (opts.jobs <= 1) {
    for (size_t i = 0; i < subsets.size(); ++i) fit_row(i);
  } else {
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
      for (size_t i = cursor.fetch_add(1); i < subsets.size();
           i = cursor.fetch_add(1))
        fit_row(i);
    };
    std::vector<std::thread> pool;
    const int nt = std::min<int>(opts.jobs, static_cast<int>(subsets.size()));
    pool.reserve(static_cast<size_t>(nt));
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  size_t best = 0;
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].criterion < rows[best].criterion) best = i;

  SelectionResult res;
  res.chosen = subsets[best];
  res.chosen_fit =
      fit_constrained_mle(X, y, res.chosen, margin, opts.newton);
  res.coefficients = res.chosen_fit.coefficients;
  res.table = std::move(rows);
  return res;
}

/// The plug-in classifier of a selection result: argmax of the linear
/// scores under the selected coefficients.
inline LinearClassifier plugin_classifier(const SelectionResult& res) {
  return LinearClassifier{res.coefficients.values};
}

}  // namespace sparsemnl
