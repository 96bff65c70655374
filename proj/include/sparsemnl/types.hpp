#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sparsemnl {

/// Bad user input: malformed config files, out-of-range parameters,
/// unreadable data files. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A resource guard tripped (e.g. the exhaustive-search budget).
/// The CLI maps this to exit code 2.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Identification convention for multinomial coefficients. Class
/// probabilities are invariant under adding a constant vector to every
/// class column, so a convention pins the representative:
///   ReferenceLast - column L is identically zero,
///   ZeroRowMean   - every row sums to zero.
enum class Convention { ReferenceLast, ZeroRowMean };

inline const char* to_string(Convention c) {
  return c == Convention::ReferenceLast ? "reference_last" : "zero_row_mean";
}

inline Convention convention_from_string(const std::string& s) {
  if (s == "reference_last") return Convention::ReferenceLast;
  if (s == "zero_row_mean") return Convention::ZeroRowMean;
  throw ConfigError("unknown convention tag: " + s);
}

/// Noise floor delta in (0, 1/2). Conditional class probabilities are
/// assumed to stay inside [delta, 1 - delta]; equivalently every linear
/// score difference is bounded by c0 = ln((1-delta)/delta), which is the
/// per-class coefficient ball radius used by the constrained fits.
struct MarginConfig {
  double delta = 0.05;

  MarginConfig() = default;
  explicit MarginConfig(double delta_) : delta(delta_) { validate(); }

  void validate() const {
    if (!(delta > 0.0) || !(delta < 0.5) || !std::isfinite(delta))
      throw std::invalid_argument("MarginConfig: delta must lie in (0, 1/2)");
  }

  double c0() const { return std::log((1.0 - delta) / delta); }
};

/// n x d feature matrix, rows are observations. The standardized flag
/// asserts unit column second moments (mean of squares), the scaling the
/// theory-motivated lambda sequences are calibrated for.
struct DesignMatrix {
  Eigen::MatrixXd values;
  bool standardized = false;

  DesignMatrix() = default;
  explicit DesignMatrix(Eigen::MatrixXd v, bool standardized_flag = false)
      : values(std::move(v)), standardized(standardized_flag) {
    if (values.rows() < 1 || values.cols() < 1)
      throw std::invalid_argument("DesignMatrix: need n >= 1 and d >= 1");
    if (!values.allFinite())
      throw std::invalid_argument("DesignMatrix: non-finite entry");
    if (standardized) {
      const Eigen::VectorXd m2 =
          values.array().square().colwise().mean().transpose();
      for (Eigen::Index j = 0; j < m2.size(); ++j)
        if (std::abs(m2[j] - 1.0) > 1e-6)
          throw std::invalid_argument(
              "DesignMatrix: standardized flag set but column " +
              std::to_string(j + 1) + " has mean square " +
              std::to_string(m2[j]));
    }
  }

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index d() const { return values.cols(); }
};

/// Class labels in {1, ..., num_classes}, 1-based.
struct LabelVector {
  std::vector<int> labels;
  int num_classes = 2;

  LabelVector() = default;
  LabelVector(std::vector<int> labels_, int num_classes_)
      : labels(std::move(labels_)), num_classes(num_classes_) {
    if (num_classes < 2)
      throw std::invalid_argument("LabelVector: need at least two classes");
    if (labels.empty())
      throw std::invalid_argument("LabelVector: empty label vector");
    for (int v : labels)
      if (v < 1 || v > num_classes)
        throw std::invalid_argument("LabelVector: label " + std::to_string(v) +
                                    " outside {1,...," +
                                    std::to_string(num_classes) + "}");
  }

  Eigen::Index n() const { return static_cast<Eigen::Index>(labels.size()); }

  /// n x L indicator matrix; row i has a single 1 in column labels[i]-1.
  Eigen::MatrixXd one_hot() const {
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(n(), num_classes);
    for (Eigen::Index i = 0; i < n(); ++i) xi(i, labels[i] - 1) = 1.0;
    return xi;
  }
};

/// Sorted, duplicate-free feature indices in {1, ..., d}. The empty
/// subset is the null model (all coefficients zero).
struct ModelSubset {
  std::vector<int> features;

  ModelSubset() = default;
  explicit ModelSubset(std::vector<int> f) : features(std::move(f)) {
    for (size_t i = 0; i < features.size(); ++i) {
      if (features[i] < 1)
        throw std::invalid_argument("ModelSubset: indices are 1-based");
      if (i > 0 && features[i] <= features[i - 1])
        throw std::invalid_argument(
            "ModelSubset: indices must be strictly increasing");
    }
  }

  int size() const { return static_cast<int>(features.size()); }
};

/// d x L coefficient matrix plus the convention that identifies it.
/// Construction validates the convention constraint, so downstream code
/// can rely on it. Non-finite entries are rejected: a degenerate fit that
/// wants infinite coefficients must be surfaced by the solver instead.
struct CoeffMatrix {
  Eigen::MatrixXd values;
  Convention convention = Convention::ReferenceLast;

  CoeffMatrix() = default;
  CoeffMatrix(Eigen::MatrixXd v, Convention c)
      : values(std::move(v)), convention(c) {
    if (values.rows() < 1 || values.cols() < 2)
      throw std::invalid_argument("CoeffMatrix: need d >= 1 and L >= 2");
    if (!values.allFinite())
      throw std::invalid_argument("CoeffMatrix: non-finite entry");
    if (convention == Convention::ReferenceLast) {
      if ((values.col(values.cols() - 1).array() != 0.0).any())
        throw std::invalid_argument(
            "CoeffMatrix: ReferenceLast requires an exactly zero last column");
    } else {
      const Eigen::VectorXd rs = values.rowwise().sum();
      for (Eigen::Index j = 0; j < rs.size(); ++j)
        if (std::abs(rs[j]) > 1e-10)
          throw std::invalid_argument(
              "CoeffMatrix: ZeroRowMean requires row sums below 1e-10, row " +
              std::to_string(j + 1) + " sums to " + std::to_string(rs[j]));
    }
  }

  Eigen::Index dim() const { return values.rows(); }
  Eigen::Index classes() const { return values.cols(); }

  /// Reparametrize to the target convention. Probabilities are unchanged:
  /// both maps only add a constant to each row.
  CoeffMatrix with_convention(Convention target) const {
    if (target == convention) return *this;
    Eigen::MatrixXd v = values;
    if (target == Convention::ReferenceLast) {
      const Eigen::VectorXd last = v.col(v.cols() - 1);
      v.colwise() -= last;  // last column becomes exactly zero
    } else {
      // Two-pass centering keeps row sums at roundoff level even after
      // long solver runs.
      v.colwise() -= Eigen::VectorXd(v.rowwise().mean());
      v.colwise() -= Eigen::VectorXd(v.rowwise().mean());
    }
    return CoeffMatrix(std::move(v), target);
  }
};

}  // namespace sparsemnl
