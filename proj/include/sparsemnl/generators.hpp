#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "rng.hpp"
#include "types.hpp"

namespace sparsemnl {

/// Feature distributions available to the synthetic samplers. All three
/// have unit column second moments, matching the standardization the
/// lambda sequences assume.
enum class GeneratorKind {
  Gaussian,           // iid standard normal
  BoundedUniform,     // iid uniform on [-sqrt(3), sqrt(3)]
  TruncatedGaussian,  // standard normal vector conditioned on a ball
};

inline const char* to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::Gaussian:
      return "gaussian";
    case GeneratorKind::BoundedUniform:
      return "uniform";
    default:
      return "truncated";
  }
}

inline GeneratorKind generator_from_string(const std::string& s) {
  if (s == "gaussian") return GeneratorKind::Gaussian;
  if (s == "uniform") return GeneratorKind::BoundedUniform;
  if (s == "truncated") return GeneratorKind::TruncatedGaussian;
  throw ConfigError("unknown generator kind: " + s);
}

/// Draws feature rows of a fixed dimension from one of the kinds above.
/// Sampling is resolved entirely by (kind, dim, radius, rng state), so a
/// generator plus a seeded Rng reproduces the same matrix everywhere.
struct FeatureGenerator {
  GeneratorKind kind = GeneratorKind::BoundedUniform;
  int dim = 1;
  /// Ball radius for TruncatedGaussian; <= 0 means the default
  /// 2*sqrt(dim), which keeps the rejection rate negligible while
  /// bounding the support.
  double truncation_radius = 0.0;

  FeatureGenerator() = default;
  FeatureGenerator(GeneratorKind kind_, int dim_, double radius = 0.0)
      : kind(kind_), dim(dim_), truncation_radius(radius) {
    if (dim < 1)
      throw std::invalid_argument("FeatureGenerator: dim must be >= 1");
  }

  double radius() const {
    return truncation_radius > 0.0 ? truncation_radius
                                   : 2.0 * std::sqrt(double(dim));
  }

  Eigen::VectorXd operator()(Rng& rng) const {
    Eigen::VectorXd x(dim);
    switch (kind) {
      case GeneratorKind::Gaussian:
        for (int j = 0; j < dim; ++j) x[j] = rng.normal();
        break;
      case GeneratorKind::BoundedUniform: {
        const double half = std::sqrt(3.0);
        for (int j = 0; j < dim; ++j) x[j] = rng.uniform(-half, half);
        break;
      }
      case GeneratorKind::TruncatedGaussian: {
        const double r2 = radius() * radius();
        do {
          for (int j = 0; j < dim; ++j) x[j] = rng.normal();
        } while (x.squaredNorm() > r2);
        break;
      }
    }
    return x;
  }

  Eigen::MatrixXd sample_matrix(Rng& rng, Eigen::Index n) const {
    Eigen::MatrixXd out(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) out.row(i) = (*this)(rng).transpose();
    return out;
  }
};

}  // namespace sparsemnl
