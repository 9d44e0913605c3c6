#include "gkls/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "gkls/error.hpp"

namespace gkls {

namespace {

double condition_number(const ComplexMatrix& v) {
  if (v.size() == 0) return 1.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(v);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(1.0, smax / smin);
}

// Single-linkage clusters of eigenvalues closer than tol.
std::vector<std::vector<Eigen::Index>> cluster_values(const std::vector<Complex>& values, double tol) {
  const auto n = static_cast<Eigen::Index>(values.size());
  std::vector<Eigen::Index> parent(values.size());
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(values[i] - values[j]) <= tol) parent[find(i)] = find(j);
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::Index> slot(values.size(), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

EigResult hermitian_eig(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) throw Error(Errc::IterationLimitExceeded, "self-adjoint eigensolver did not converge");
  EigResult out;
  out.values.reserve(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.values.emplace_back(es.eigenvalues()(i), 0.0);
  out.right_vectors = es.eigenvectors();
  out.left_vectors = es.eigenvectors();
  out.vector_condition = 1.0;
  return out;
}

}  // namespace

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(Errc::NonSquare, std::string(what) + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw Error(Errc::InvalidArgument, std::string(what) + " has non-finite entries");
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= rel_tol * std::max(1.0, m.norm());
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

EigResult eig(const ComplexMatrix& m) {
  require_square(m, "eig input");
  require_finite(m, "eig input");
  const Eigen::Index n = m.rows();
  if (n == 0) return {};

  const double scale = m.norm();
  if ((m - m.adjoint()).norm() <= 1e-12 * scale || scale == 0.0) return hermitian_eig(m);

  Eigen::ComplexEigenSolver<ComplexMatrix> right(m, true);
  if (right.info() != Eigen::Success) throw Error(Errc::IterationLimitExceeded, "QR iteration on M did not converge");
  Eigen::ComplexEigenSolver<ComplexMatrix> left(m.adjoint(), true);
  if (left.info() != Eigen::Success) throw Error(Errc::IterationLimitExceeded, "QR iteration on M^H did not converge");

  EigResult out;
  out.values.assign(right.eigenvalues().data(), right.eigenvalues().data() + n);
  out.right_vectors = right.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double nk = out.right_vectors.col(k).norm();
    if (nk > 0.0) out.right_vectors.col(k) /= nk;
  }
  ComplexMatrix w = left.eigenvectors();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double nj = w.col(j).norm();
    if (nj > 0.0) w.col(j) /= nj;
  }

  // Greedy pairing by overlap; ties go to the closer eigenvalue.
  const RealMatrix overlap = (w.adjoint() * out.right_vectors).cwiseAbs();
  struct Pair {
    Eigen::Index j, k;
    double score, dist;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      pairs.push_back({j, k, overlap(j, k), std::abs(std::conj(left.eigenvalues()(j)) - out.values[k])});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.dist < b.dist;
  });
  std::vector<bool> used_left(n, false), used_right(n, false);
  out.left_vectors = ComplexMatrix::Zero(n, n);
  Eigen::Index assigned = 0;
  for (const auto& p : pairs) {
    if (assigned == n) break;
    if (used_left[p.j] || used_right[p.k]) continue;
    used_left[p.j] = used_right[p.k] = true;
    out.left_vectors.col(p.k) = w.col(p.j);
    ++assigned;
  }

  const double max_abs = std::accumulate(out.values.begin(), out.values.end(), 0.0,
                                         [](double acc, Complex z) { return std::max(acc, std::abs(z)); });
  for (const auto& group : cluster_values(out.values, 1e-8 * std::max(1.0, max_abs))) {
    const auto g = static_cast<Eigen::Index>(group.size());
    ComplexMatrix u(n, g), v(n, g);
    for (Eigen::Index c = 0; c < g; ++c) {
      u.col(c) = out.left_vectors.col(group[c]);
      v.col(c) = out.right_vectors.col(group[c]);
    }
    const ComplexMatrix p = u.adjoint() * v;
    Eigen::FullPivLU<ComplexMatrix> lu(p);
    if (lu.isInvertible() && lu.rcond() > 1e-14) {
      u = u * lu.inverse().adjoint();
    } else {
      for (Eigen::Index c = 0; c < g; ++c) {
        const Complex s = p(c, c);
        if (std::abs(s) > 0.0) u.col(c) /= std::conj(s);
      }
    }
    for (Eigen::Index c = 0; c < g; ++c) out.left_vectors.col(group[c]) = u.col(c);
  }

  out.vector_condition = condition_number(out.right_vectors);
  return out;
}

std::vector<Complex> eigenvalues(const ComplexMatrix& m) {
  require_square(m, "eigenvalues input");
  require_finite(m, "eigenvalues input");
  const Eigen::Index n = m.rows();
  std::vector<Complex> out;
  if (n == 0) return out;
  if ((m - m.adjoint()).norm() <= 1e-12 * m.norm() || m.norm() == 0.0) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(Errc::IterationLimitExceeded, "self-adjoint eigensolver did not converge");
    for (Eigen::Index i = 0; i < n; ++i) out.emplace_back(es.eigenvalues()(i), 0.0);
    return out;
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw Error(Errc::IterationLimitExceeded, "QR iteration did not converge");
  out.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

ComplexMatrix expm(const ComplexMatrix& m) {
  require_square(m, "expm input");
  if (m.rows() == 0) return m;
  return m.exp();
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(Errc::ShapeMismatch, "hs_inner operands differ in shape");
  return (a.conjugate().cwiseProduct(b)).sum();
}

double matrix_norm(const ComplexMatrix& a, NormKind kind) {
  if (a.size() == 0) return 0.0;
  switch (kind) {
    case NormKind::one:
      return a.cwiseAbs().colwise().sum().maxCoeff();
    case NormKind::inf:
      return a.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::two: {
      Eigen::JacobiSVD<ComplexMatrix> svd(a);
      return svd.singularValues()(0);
    }
    case NormKind::frobenius:
      return a.norm();
  }
  return 0.0;
}

double matrix_norm(const RealMatrix& a, NormKind kind) { return matrix_norm(ComplexMatrix(a.cast<Complex>()), kind); }

QrResult qr(const ComplexMatrix& m) {
  require_square(m, "qr input");
  const Eigen::Index n = m.rows();
  Eigen::HouseholderQR<ComplexMatrix> hqr(m);
  QrResult out;
  out.q = hqr.householderQ() * ComplexMatrix::Identity(n, n);
  out.r = hqr.matrixQR().triangularView<Eigen::Upper>();
  const double floor = 1e-14 * std::max(m.norm(), std::numeric_limits<double>::min());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex rii = out.r(i, i);
    const double mag = std::abs(rii);
    if (!(mag > floor) || m.norm() == 0.0)
      throw Error(Errc::RankDeficient, "R(" + std::to_string(i) + "," + std::to_string(i) + ") = " + std::to_string(mag));
    const Complex phase = rii / mag;
    out.r.row(i) *= std::conj(phase);
    out.q.col(i) *= phase;
    out.r(i, i) = mag;
  }
  return out;
}

double spectral_radius(const ComplexMatrix& m) {
  double r = 0.0;
  for (const auto& z : eigenvalues(m)) r = std::max(r, std::abs(z));
  return r;
}

double spectral_abscissa(const ComplexMatrix& m) {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues(m)) r = std::max(r, z.real());
  return r;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b + b * a; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector vec(const ComplexMatrix& x) {
  ComplexVector v(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  return v;
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) throw Error(Errc::ShapeMismatch, "unvec length is not dim^2");
  ComplexMatrix x(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) x(i, j) = v(i * dim + j);
  return x;
}

}  // namespace gkls
