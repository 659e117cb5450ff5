#pragma once

#include <mstrack/curve.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace mstrack {

/// Surface energy density gamma(p) = (sum_l [G_l p . p]^{r/2})^{1/r} with
/// symmetric positive definite G_l and r >= 1.
template <class Scalar>
class BasicAnisotropy {
 public:
  using Matrix = Mat2<Scalar>;
  using Vector = Vec2<Scalar>;

  BasicAnisotropy() : BasicAnisotropy(std::vector<Matrix>{Matrix::Identity()}, Scalar(1)) {}

  BasicAnisotropy(std::vector<Matrix> metrics, Scalar r) : metrics_(std::move(metrics)), r_(r) {
    if (metrics_.empty()) throw ConfigError("anisotropy needs at least one matrix");
    if (!(r_ >= Scalar(1))) throw ConfigError("anisotropy exponent r must be >= 1");
    for (const Matrix& g : metrics_) {
      if (g(0, 1) != g(1, 0)) throw ConfigError("anisotropy matrix is not symmetric");
      Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
      if (!(eig.eigenvalues().minCoeff() > Scalar(0)))
        throw ConfigError("anisotropy matrix is not positive definite");
      // det(G)^{1/(d-1)} G^{-1} is the adjugate for d = 2.
      Matrix adj;
      adj << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
      dual_.push_back(adj);
    }
  }

  static BasicAnisotropy isotropic() { return BasicAnisotropy(); }

  std::size_t size() const { return metrics_.size(); }
  Scalar exponent() const { return r_; }
  const Matrix& metric(std::size_t l) const { return metrics_[l]; }
  /// G~_l = det(G_l) G_l^{-1}.
  const Matrix& dual_metric(std::size_t l) const { return dual_[l]; }

  Scalar gamma_l(std::size_t l, const Vector& p) const { return std::sqrt(p.dot(metrics_[l] * p)); }

  Scalar gamma(const Vector& p) const {
    require_nonzero(p);
    if (r_ == Scalar(1)) {
      Scalar sum = 0;
      for (std::size_t l = 0; l < size(); ++l) sum += gamma_l(l, p);
      return sum;
    }
    Scalar sum = 0;
    for (std::size_t l = 0; l < size(); ++l) sum += std::pow(gamma_l(l, p), r_);
    return std::pow(sum, 1 / r_);
  }

  Scalar operator()(const Vector& p) const { return gamma(p); }

  /// gamma'(p) = gamma(p)^{1-r} sum_l gamma_l(p)^{r-2} G_l p.
  Vector gradient(const Vector& p) const {
    require_nonzero(p);
    Vector g = Vector::Zero();
    if (r_ == Scalar(1)) {
      for (std::size_t l = 0; l < size(); ++l) g += metrics_[l] * p / gamma_l(l, p);
      return g;
    }
    for (std::size_t l = 0; l < size(); ++l) g += std::pow(gamma_l(l, p), r_ - 2) * (metrics_[l] * p);
    return std::pow(gamma(p), 1 - r_) * g;
  }

 private:
  static void require_nonzero(const Vector& p) {
    if (p.x() == Scalar(0) && p.y() == Scalar(0)) throw DomainError("gamma is undefined at p = 0");
  }

  std::vector<Matrix> metrics_;
  std::vector<Matrix> dual_;
  Scalar r_ = 1;
};

using Anisotropy = BasicAnisotropy<double>;

template <class Scalar>
Scalar gamma(const BasicAnisotropy<Scalar>& def, const Vec2<Scalar>& p) {
  return def.gamma(p);
}
template <class Scalar>
Scalar gamma_l(const BasicAnisotropy<Scalar>& def, std::size_t l, const Vec2<Scalar>& p) {
  return def.gamma_l(l, p);
}
template <class Scalar>
Vec2<Scalar> gamma_grad(const BasicAnisotropy<Scalar>& def, const Vec2<Scalar>& p) {
  return def.gradient(p);
}

/// R(theta) = [cos sin; -sin cos].
template <class Scalar>
Mat2<Scalar> rotation(Scalar theta) {
  Mat2<Scalar> m;
  m << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return m;
}

/// Nearly crystalline density with a regular octagon as Wulff shape in the
/// limit delta -> 0: gamma(p) = 1/4 sum_{l=1..4} sqrt([R^l]^T D R^l p . p)
/// with R = R(pi/4), D = diag(1, delta^2).
template <class Scalar>
BasicAnisotropy<Scalar> make_octagon_density(Scalar delta) {
  if (!(delta > Scalar(0))) throw ConfigError("octagon density needs delta > 0");
  const Mat2<Scalar> step = rotation<Scalar>(Scalar(EIGEN_PI) / 4);
  Mat2<Scalar> d = Mat2<Scalar>::Zero();
  d(0, 0) = 1;
  d(1, 1) = delta * delta;
  std::vector<Mat2<Scalar>> g;
  Mat2<Scalar> power = Mat2<Scalar>::Identity();
  for (int l = 1; l <= 4; ++l) {
    power = step * power;
    Mat2<Scalar> gl = power.transpose() * d * power / Scalar(16);
    gl(1, 0) = gl(0, 1);
    g.push_back(gl);
  }
  return BasicAnisotropy<Scalar>(std::move(g), Scalar(1));
}

struct RotatedDiag {
  double angle = 0;
  double diag0 = 1;
  double diag1 = 1;
  double scale = 1;
};

/// G = scale * R(angle)^T diag(d0, d1) R(angle) for each entry.
Anisotropy make_rotated_diag(const std::vector<RotatedDiag>& entries, double r);

/// |Gamma|_gamma = sum_j |sigma_j| gamma(nu_j).
template <class Scalar>
Scalar anisotropic_energy(const BasicCurve<Scalar>& curve, const BasicAnisotropy<Scalar>& def) {
  Scalar sum = 0;
  for (Index j = 0; j < curve.num_elements(); ++j)
    sum += curve.length(j) * def.gamma(element_normal(curve, j));
  return sum;
}

/// Weighted surface form on the old curve,
///   A(X, eta) = sum_l sum_j |sigma_j| w_lj (G~_l X_s . eta_s) / gamma_l(nu_j),
/// with arclength derivatives X_s on sigma_j, old normals nu_j and the lagged
/// ratio w_lj = [gamma_l(n_j) / gamma(n_j)]^{r-1} of the supplied normals n_j.
/// Each element contributes a 2x2 block B_j acting on edge differences.
class AnisotropicForm {
 public:
  AnisotropicForm(const Curve& old_curve, const Matrix2X& lagged_normals, const Anisotropy& def);

  const Matrix2& block(Index j) const { return blocks_[static_cast<std::size_t>(j)]; }

  /// 2K x 2K matrix; unknown (k, c) sits at row 2k + c.
  SparseMatrix matrix() const;

  double operator()(const Matrix2X& x, const Matrix2X& eta) const;

 private:
  Curve curve_;
  std::vector<Matrix2> blocks_;
};

/// Shared assembly: each element j adds [B, -B; -B, B] to the vertex pair.
SparseMatrix assemble_edge_blocks(const Curve& curve, const std::vector<Matrix2>& blocks);

}  // namespace mstrack
