#include "gkls/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gkls/error.hpp"

namespace gkls {

KolmogorovGenerator validate(const RealMatrix& k) {
  if (k.rows() != k.cols()) throw Error(Errc::NonSquare, "Kolmogorov matrix must be square");
  if (!k.allFinite()) throw Error(Errc::InvalidArgument, "Kolmogorov matrix has non-finite entries");
  const Eigen::Index d = k.rows();
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      if (i != j && k(i, j) < -kKolmogorovTol * scale)
        throw Error(Errc::NegativeOffDiagonal,
                    "K(" + std::to_string(i) + "," + std::to_string(j) + ") = " + std::to_string(k(i, j)));
  for (Eigen::Index j = 0; j < d; ++j) {
    const double s = k.col(j).sum();
    if (std::abs(s) > kKolmogorovTol * scale)
      throw Error(Errc::ColumnSumNonzero, "column " + std::to_string(j) + " sums to " + std::to_string(s));
  }
  KolmogorovGenerator out;
  out.dim = static_cast<int>(d);
  out.k = k;
  out.transition_rates = k;
  out.transition_rates.diagonal().setZero();
  return out;
}

KolmogorovGenerator from_rates(const std::vector<double>& r) {
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!(r[i] >= 0.0) || !std::isfinite(r[i]))
      throw Error(Errc::NegativeRate, "r_" + std::to_string(i + 1) + " = " + std::to_string(r[i]));
  const auto d = static_cast<Eigen::Index>(r.size()) + 1;
  RealMatrix k = RealMatrix::Zero(d, d);
  if (!r.empty()) {
    k(0, 0) = -r[0];
    k(d - 1, 0) += r[0];
  }
  for (Eigen::Index j = 1; j + 1 < d; ++j) {
    k(0, j) = r[j];
    k(j, j) = -r[j];
  }
  return validate(k);
}

KolmogorovGenerator lindblad_to_kolmogorov(const CanonicalForm& g, const ComplexMatrix& basis) {
  const int d = g.base.dim;
  if (basis.rows() != d || basis.cols() != d) throw Error(Errc::DimensionMismatch, "basis must be d x d");
  const double err = (basis.adjoint() * basis - ComplexMatrix::Identity(d, d)).norm();
  if (err > 1e-10) throw Error(Errc::NonOrthonormalBasis, "||B^+ B - I||_F = " + std::to_string(err));

  RealMatrix r = RealMatrix::Zero(d, d);
  for (std::size_t n = 0; n < g.channels().size(); ++n) {
    const ComplexMatrix m = basis.adjoint() * g.channels()[n].op * basis;
    r += g.gamma(n) * m.cwiseAbs2();
  }
  RealMatrix k = r;
  for (int j = 0; j < d; ++j) k(j, j) = r(j, j) - r.col(j).sum();
  return validate(k);
}

ClassicalSpectrum classical_spectrum(const KolmogorovGenerator& k) {
  ClassicalSpectrum out;
  if (k.dim == 0) return out;
  auto values = eigenvalues(ComplexMatrix(k.k.cast<Complex>()));
  std::stable_sort(values.begin(), values.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  out.eigenvalues = values;
  for (const auto& z : values) out.rates.push_back(-z.real());
  return out;
}

}  // namespace gkls
