#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace mstrack {

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <class Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <class Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <class Scalar>
using Points2 = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
template <class Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector2 = Vec2<double>;
using Matrix2 = Mat2<double>;
using Matrix2X = Points2<double>;
using VectorX = VecX<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Anticlockwise rotation through pi/2.
template <class Derived>
Vec2<typename Derived::Scalar> perp(const Eigen::MatrixBase<Derived>& v) {
  return Vec2<typename Derived::Scalar>(-v.y(), v.x());
}

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LocationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergenceError : SolverError {
  NonConvergenceError(const std::string& what, double last_residual)
      : SolverError(what), residual(last_residual) {}
  double residual;
};

}  // namespace mstrack
