#pragma once

// Dense complex linear algebra used throughout the library. Matrices are
// Eigen dense types; everything here is a pure function of its arguments.

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gkls {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Eigenvector matrices with a condition number at or above this are
/// treated as near-defective.
inline constexpr double kDefectThreshold = 1e8;

struct EigResult {
  std::vector<Complex> values;
  ComplexMatrix right_vectors;  // columns, unit 2-norm
  ComplexMatrix left_vectors;   // columns, scaled so that u_k^H v_k = 1
  double vector_condition = 1.0;

  bool near_defective() const { return vector_condition >= kDefectThreshold; }
};

enum class NormKind { one, two, inf, frobenius };

struct QrResult {
  ComplexMatrix q;
  ComplexMatrix r;
};

/// Throws Errc::NonSquare / Errc::ShapeMismatch on malformed input and
/// Errc::InvalidArgument on non-finite entries.
void require_square(const ComplexMatrix& m, const char* what);
void require_finite(const ComplexMatrix& m, const char* what);

/// Full eigendecomposition with matched left eigenvectors.
///
/// Hermitian inputs go through the self-adjoint solver. General inputs use a
/// Hessenberg/Schur reduction for both M and M^H; left vectors are paired
/// with right vectors by maximal overlap and then biorthonormalized inside
/// each cluster of (numerically) equal eigenvalues.
EigResult eig(const ComplexMatrix& m);

/// Eigenvalues only (same path as eig, without the left problem).
std::vector<Complex> eigenvalues(const ComplexMatrix& m);

/// e^M by scaling and squaring with Pade approximants.
ComplexMatrix expm(const ComplexMatrix& m);

/// Tr(A^H B).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

double matrix_norm(const ComplexMatrix& a, NormKind kind);
double matrix_norm(const RealMatrix& a, NormKind kind);

/// M = Q R with Q unitary and R upper triangular with a strictly positive
/// real diagonal.
QrResult qr(const ComplexMatrix& m);

double spectral_radius(const ComplexMatrix& m);
double spectral_abscissa(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double rel_tol);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Row-major vectorization: vec(A X B) = (A kron B^T) vec(X).
ComplexVector vec(const ComplexMatrix& x);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim);

}  // namespace gkls
