#include <mstrack/anisotropy.hpp>

namespace mstrack {

Anisotropy make_rotated_diag(const std::vector<RotatedDiag>& entries, double r) {
  std::vector<Matrix2> g;
  for (const auto& e : entries) {
    const Matrix2 rot = rotation(e.angle);
    Matrix2 d = Matrix2::Zero();
    d(0, 0) = e.diag0;
    d(1, 1) = e.diag1;
    Matrix2 m = e.scale * rot.transpose() * d * rot;
    m(1, 0) = m(0, 1);
    g.push_back(m);
  }
  return Anisotropy(std::move(g), r);
}

AnisotropicForm::AnisotropicForm(const Curve& old_curve, const Matrix2X& lagged_normals,
                                 const Anisotropy& def)
    : curve_(old_curve) {
  if (lagged_normals.cols() != old_curve.num_elements())
    throw GeometryError("lagged normals must be given per element");
  const double r = def.exponent();
  blocks_.reserve(static_cast<std::size_t>(old_curve.num_elements()));
  for (Index j = 0; j < old_curve.num_elements(); ++j) {
    const Vector2 nu = element_normal(old_curve, j);
    const double len = old_curve.length(j);
    const Vector2 lagged = lagged_normals.col(j);
    const double lagged_gamma = r == 1.0 ? 1.0 : def.gamma(lagged);
    Matrix2 b = Matrix2::Zero();
    for (std::size_t l = 0; l < def.size(); ++l) {
      const double weight = r == 1.0 ? 1.0 : std::pow(def.gamma_l(l, lagged) / lagged_gamma, r - 1);
      // |sigma| (G~ X_s . eta_s) / gamma_l(nu) with X_s = (X_2 - X_1) / |sigma|.
      b += weight / (len * def.gamma_l(l, nu)) * def.dual_metric(l);
    }
    blocks_.push_back(b);
  }
}

SparseMatrix assemble_edge_blocks(const Curve& curve, const std::vector<Matrix2>& blocks) {
  const Index k = curve.num_vertices();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(16 * k));
  for (Index j = 0; j < curve.num_elements(); ++j) {
    const auto [a, b] = curve.element(j);
    const Matrix2& m = blocks[static_cast<std::size_t>(j)];
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        t.emplace_back(2 * a + r, 2 * a + c, m(r, c));
        t.emplace_back(2 * b + r, 2 * b + c, m(r, c));
        t.emplace_back(2 * a + r, 2 * b + c, -m(r, c));
        t.emplace_back(2 * b + r, 2 * a + c, -m(r, c));
      }
    }
  }
  SparseMatrix s(2 * k, 2 * k);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

SparseMatrix AnisotropicForm::matrix() const { return assemble_edge_blocks(curve_, blocks_); }

double AnisotropicForm::operator()(const Matrix2X& x, const Matrix2X& eta) const {
  double sum = 0;
  for (Index j = 0; j < curve_.num_elements(); ++j) {
    const auto [a, b] = curve_.element(j);
    const Vector2 dx = x.col(b) - x.col(a);
    const Vector2 de = eta.col(b) - eta.col(a);
    sum += de.dot(blocks_[static_cast<std::size_t>(j)] * dx);
  }
  return sum;
}

}  // namespace mstrack
