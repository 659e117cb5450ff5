#pragma once

#include <mstrack/bulk_mesh.hpp>

#include <string>
#include <vector>

namespace mstrack {

/// Part of curve element `element` for parameters s in [s0, s1], contained in
/// the closed bulk triangle `triangle`. The element runs from vertex j at
/// s = 0 to vertex next(j) at s = 1.
struct ClipPiece {
  Index element = 0;
  Index triangle = 0;
  double s0 = 0;
  double s1 = 1;
};

/// Ordered partition of every curve element into pieces inside single
/// triangles. Adjacent pieces always lie in different triangles.
std::vector<ClipPiece> clip_curve_to_mesh(const Curve& curve, const BulkMesh& mesh);

/// Curve-side integration of bulk basis functions: vertex quadrature or exact
/// integration of the piecewise quadratic products.
enum class Integration { lumped, exact };

std::string to_string(Integration i);
Integration parse_integration(const std::string& name);

struct CouplingMatrices {
  SparseMatrix N;  // K_Omega x K, N(a, k) = <phi_a, chi_k>^{(h)}
  VectorX mass;    // lumped weights m_k
};

CouplingMatrices assemble_coupling(const Curve& curve, const BulkMesh& mesh, Integration variant);

struct SurfaceOperators {
  VectorX mass;       // diagonal of M_Gamma
  SparseMatrix stiffness;  // A_Gamma, K x K
};

SurfaceOperators assemble_surface_operators(const Curve& curve);

/// A (x) I_2 with unknown (k, c) at row 2k + c.
SparseMatrix kron2(const SparseMatrix& a);

}  // namespace mstrack
