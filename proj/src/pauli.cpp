#include "gkls/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gkls/error.hpp"

namespace gkls {

namespace {

void check_state(const ComplexMatrix& rho, int d) {
  if (rho.rows() != d || rho.cols() != d) throw Error(Errc::DimensionMismatch, "state has the wrong shape");
  require_finite(rho, "state");
  const double herm = (rho - rho.adjoint()).norm();
  if (herm > 1e-10 * std::max(1.0, rho.norm()))
    throw Error(Errc::InvalidState, "state is not Hermitian (||rho - rho^+|| = " + std::to_string(herm) + ")");
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-10) throw Error(Errc::InvalidState, "trace is " + std::to_string(tr.real()));
}

void check_grid(const std::vector<double>& grid) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) throw Error(Errc::InvalidArgument, "grid contains a non-finite time");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw Error(Errc::InvalidArgument, "grid must be strictly increasing");
  }
}

// Largest-magnitude component made real positive.
void fix_vector_phase(Eigen::Ref<ComplexVector> v) {
  Eigen::Index best = 0;
  double mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > mag * (1.0 + 1e-12)) {
      mag = a;
      best = i;
    }
  }
  if (mag > 0.0) v *= std::conj(v(best)) / mag;
}

ComplexMatrix initial_frame(const ComplexMatrix& rho, RealVector& populations) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho));
  const Eigen::Index d = rho.rows();
  ComplexMatrix frame(d, d);
  populations.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    frame.col(i) = es.eigenvectors().col(d - 1 - i);
    populations(i) = es.eigenvalues()(d - 1 - i);
    fix_vector_phase(frame.col(i));
  }
  return frame;
}

void require_canonical(const CanonicalForm& g) {
  const auto& ch = g.channels();
  for (std::size_t a = 0; a < ch.size(); ++a) {
    if (std::abs(ch[a].op.trace()) > 1e-10)
      throw Error(Errc::NonCanonicalGenerator, "channel " + std::to_string(a) + " is not traceless");
    for (std::size_t b = 0; b <= a; ++b) {
      const Complex ip = hs_inner(ch[b].op, ch[a].op);
      if (std::abs(ip - (a == b ? 1.0 : 0.0)) > 1e-10)
        throw Error(Errc::NonCanonicalGenerator,
                    "channels " + std::to_string(b) + " and " + std::to_string(a) + " are not orthonormal");
    }
  }
}

RealVector derivative(const EigenTrack& track, std::size_t k) {
  const double h1 = track.grid[k] - track.grid[k - 1];
  const double h2 = track.grid[k + 1] - track.grid[k];
  return -h2 / (h1 * (h1 + h2)) * track.populations[k - 1] + (h2 - h1) / (h1 * h2) * track.populations[k] +
         h1 / (h2 * (h1 + h2)) * track.populations[k + 1];
}

}  // namespace

Trajectory evolve(const GklsGenerator& g, const ComplexMatrix& rho0, const std::vector<double>& grid,
                  const StepControl& control) {
  check_state(rho0, g.dim);
  check_grid(grid);
  Trajectory out;
  out.grid = grid;
  out.states.resize(grid.size());
  const ComplexVector v0 = vec(rho0);
  const int d = g.dim;

  auto finish = [&](const ComplexVector& v) { return hermitian_part(unvec(v, d)); };

  if (!g.time_dependent) {
    const ComplexMatrix s = reshape(g).matrix;
    for (std::size_t k = 0; k < grid.size(); ++k) out.states[k] = finish(expm(grid[k] * s) * v0);
    return out;
  }

  const ReshapedFlow flow(g);
  const MatrixRhs rhs = [&flow](double t, const ComplexMatrix& y) -> ComplexMatrix { return flow.at(t) * y; };
  const auto first_forward = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), 0.0) - grid.begin());

  ComplexMatrix y = v0;
  double t = 0.0;
  for (std::size_t k = first_forward; k < grid.size(); ++k) {
    y = integrate_rk4(rhs, y, t, grid[k], control);
    t = grid[k];
    out.states[k] = finish(y);
  }
  y = v0;
  t = 0.0;
  for (std::size_t k = first_forward; k-- > 0;) {
    y = integrate_rk4(rhs, y, t, grid[k], control);
    t = grid[k];
    out.states[k] = finish(y);
  }
  return out;
}

EigenTrack spectral_track(const Trajectory& traj) {
  EigenTrack out;
  out.grid = traj.grid;
  if (traj.states.empty()) return out;
  const Eigen::Index d = traj.states.front().rows();

  RealVector pops;
  ComplexMatrix prev = initial_frame(traj.states.front(), pops);
  out.frames.push_back(prev);
  out.populations.push_back(pops);

  for (std::size_t step = 1; step < traj.states.size(); ++step) {
    const ComplexMatrix rho = hermitian_part(traj.states[step]);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
    if (es.info() != Eigen::Success) throw Error(Errc::EigFailure, "state eigensolve failed");
    const RealVector& vals = es.eigenvalues();
    const ComplexMatrix& vecs = es.eigenvectors();

    // Blocks of (numerically) equal eigenvalues; the solver returns them sorted.
    const double gap = kDegenerateGap * std::max(1.0, vals.cwiseAbs().maxCoeff());
    std::vector<std::vector<Eigen::Index>> blocks;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (i == 0 || vals(i) - vals(i - 1) >= gap) blocks.emplace_back();
      blocks.back().push_back(i);
    }

    // Weight of previous column i inside block b.
    struct Score {
      Eigen::Index prev_col;
      std::size_t block;
      double weight;
    };
    std::vector<Score> scores;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (Eigen::Index i = 0; i < d; ++i) {
        double w = 0.0;
        for (const auto c : blocks[b]) w += std::norm(prev.col(i).dot(vecs.col(c)));
        scores.push_back({i, b, w});
      }
    }
    std::stable_sort(scores.begin(), scores.end(), [](const Score& a, const Score& b) { return a.weight > b.weight; });
    std::vector<std::vector<Eigen::Index>> assigned(blocks.size());
    std::vector<bool> used(static_cast<std::size_t>(d), false);
    for (const auto& s : scores) {
      if (used[s.prev_col] || assigned[s.block].size() >= blocks[s.block].size()) continue;
      used[s.prev_col] = true;
      assigned[s.block].push_back(s.prev_col);
    }

    ComplexMatrix frame(d, d);
    RealVector next(d);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto& targets = assigned[b];
      std::sort(targets.begin(), targets.end());
      const auto m = static_cast<Eigen::Index>(targets.size());
      ComplexMatrix vb(d, m), pb(d, m);
      for (Eigen::Index c = 0; c < m; ++c) {
        vb.col(c) = vecs.col(blocks[b][c]);
        pb.col(c) = prev.col(targets[c]);
      }
      // Orthogonal Procrustes: the rotation inside the block closest to the previous frame.
      Eigen::JacobiSVD<ComplexMatrix> svd(vb.adjoint() * pb, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const ComplexMatrix rotated = vb * (svd.matrixU() * svd.matrixV().adjoint());
      for (Eigen::Index c = 0; c < m; ++c) {
        const double overlap = std::abs(pb.col(c).dot(rotated.col(c)));
        if (overlap < kTrackingFloor)
          throw Error(Errc::TrackingLost, "best overlap " + std::to_string(overlap) + " at t = " +
                                              std::to_string(traj.grid[step]));
        frame.col(targets[c]) = rotated.col(c);
        fix_vector_phase(frame.col(targets[c]));
        next(targets[c]) = vals(blocks[b][c]);
      }
    }
    for (Eigen::Index i = 0; i < d; ++i) next(i) = frame.col(i).dot(rho * frame.col(i)).real();
    out.frames.push_back(frame);
    out.populations.push_back(next);
    prev = frame;
  }
  return out;
}

RateMatrix rate_matrix(const GklsGenerator& g, const ComplexMatrix& frame, double t) {
  const int d = g.dim;
  RateMatrix out;
  out.t = t;
  out.r = RealMatrix::Zero(d, d);
  for (std::size_t n = 0; n < g.channels.size(); ++n) {
    const double gamma = g.rate_at(n, t);
    if (gamma == 0.0) continue;
    const ComplexMatrix m = frame.adjoint() * g.channels[n].op * frame;
    out.r += gamma * m.cwiseAbs2();
  }
  out.w = out.r;
  for (int j = 0; j < d; ++j) out.w(j, j) -= out.r.col(j).sum();
  return out;
}

RateMatrix teich_mahler(const CanonicalForm& g, const EigenTrack& track, std::size_t k) {
  if (k >= track.frames.size()) throw Error(Errc::BoundaryIndex, "index " + std::to_string(k) + " outside the track");
  return rate_matrix(g.base, track.frames[k], track.grid[k]);
}

double pauli_residual(const GklsGenerator& g, const EigenTrack& track, std::size_t k) {
  if (k == 0 || k + 1 >= track.grid.size())
    throw Error(Errc::BoundaryIndex, "index " + std::to_string(k) + " has no neighbour on both sides");
  const RateMatrix w = rate_matrix(g, track.frames[k], track.grid[k]);
  return (derivative(track, k) - w.w * track.populations[k]).norm();
}

RealMatrix w_quantity(const CanonicalForm& g, const ComplexMatrix& frame) {
  require_canonical(g);
  const auto& ch = g.channels();
  const Eigen::Index d = frame.rows();
  RealMatrix out = RealMatrix::Zero(static_cast<Eigen::Index>(ch.size()), d);
  for (std::size_t n = 0; n < ch.size(); ++n) {
    const ComplexMatrix m = frame.adjoint() * ch[n].op * frame;  // m(j, i) = <psi_j, L psi_i>
    const ComplexMatrix md = m.adjoint();                        // <psi_j, L^+ psi_i>
    for (Eigen::Index i = 0; i < d; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < d; ++j)
        if (j != i) s += std::norm(m(j, i)) + std::norm(md(j, i));
      out(static_cast<Eigen::Index>(n), i) = s;
    }
  }
  return out;
}

RealMatrix w_quantity(const CanonicalForm& g, const EigenTrack& track, std::size_t k) {
  if (k >= track.frames.size()) throw Error(Errc::BoundaryIndex, "index " + std::to_string(k) + " outside the track");
  return w_quantity(g, track.frames[k]);
}

RealMatrix classical_propagator(const GklsGenerator& g, const EigenTrack& track, std::size_t j, std::size_t k) {
  if (j > k || k >= track.grid.size())
    throw Error(Errc::BoundaryIndex, "need j <= k < " + std::to_string(track.grid.size()));
  const Eigen::Index d = g.dim;
  for (std::size_t m = j; m <= k; ++m)
    for (Eigen::Index i = 0; i < d; ++i)
      if (track.populations[m](i) < -1e-12)
        throw Error(Errc::NegativePopulations, "p_" + std::to_string(i) + " = " +
                                                   std::to_string(track.populations[m](i)) + " at t = " +
                                                   std::to_string(track.grid[m]));
  RealMatrix f = RealMatrix::Identity(d, d);
  if (j == k) return f;
  RealMatrix w_prev = rate_matrix(g, track.frames[j], track.grid[j]).w;
  for (std::size_t m = j; m < k; ++m) {
    const RealMatrix w_next = rate_matrix(g, track.frames[m + 1], track.grid[m + 1]).w;
    const double h = track.grid[m + 1] - track.grid[m];
    const ComplexMatrix step = expm(ComplexMatrix((0.5 * h * (w_prev + w_next)).cast<Complex>()));
    f = step.real() * f;
    w_prev = w_next;
  }
  return f;
}

std::vector<RealVector> dominant_profile(const RelaxationSpectrum& spec, const ComplexMatrix& rho0,
                                         const EigenTrack& track) {
  if (!spec.diagonalizable)
    throw Error(Errc::NearDefective, "eigenvector condition " + std::to_string(spec.vector_condition));
  const std::size_t top = spec.rates.size() - 1;
  const Complex lambda = spec.eigenvalues[top];
  const double tol = 1e-8 * std::max(1.0, spec.rates[top]);
  const bool oscillating = std::abs(lambda.imag()) > tol;
  // A real mode must be alone at the top; a complex one may share it only with its conjugate.
  const std::size_t allowed = oscillating ? 2 : 1;
  const auto sharing = std::count_if(spec.rates.begin(), spec.rates.end(),
                                     [&](double r) { return std::abs(r - spec.rates[top]) <= tol; });
  if (static_cast<std::size_t>(sharing) != allowed)
    throw Error(Errc::InvalidArgument, "dominant relaxation rate is not simple");

  const ComplexMatrix& x = spec.right_ops[top];
  const Complex y = hs_inner(spec.left_ops[top], rho0);
  const double omega = -lambda.imag();
  std::vector<RealVector> out;
  for (std::size_t k = 0; k < track.grid.size(); ++k) {
    const double t = track.grid[k];
    ComplexMatrix q;
    if (oscillating) {
      const Complex phase = std::exp(Complex(0.0, -omega * t));
      q = phase * y * x + std::conj(phase * y) * x.adjoint();
    } else {
      q = hermitian_part(y * x);
    }
    const ComplexMatrix& frame = track.frames[k];
    RealVector qi(frame.cols());
    for (Eigen::Index i = 0; i < frame.cols(); ++i) qi(i) = frame.col(i).dot(q * frame.col(i)).real();
    out.push_back(qi);
  }
  return out;
}

std::vector<TrackRow> track_table(const GklsGenerator& g, const EigenTrack& track) {
  std::vector<TrackRow> rows;
  for (std::size_t k = 0; k < track.grid.size(); ++k) {
    TrackRow row;
    row.time = track.grid[k];
    row.populations = track.populations[k];
    row.residual = (k == 0 || k + 1 == track.grid.size()) ? std::numeric_limits<double>::quiet_NaN()
                                                          : pauli_residual(g, track, k);
    const RateMatrix w = rate_matrix(g, track.frames[k], track.grid[k]);
    row.w_inf_norm = matrix_norm(w.w, NormKind::inf);
    const CanonicalForm cf = canonical_form(g, track.grid[k]);
    const RealMatrix wq = w_quantity(cf, track.frames[k]);
    row.min_w_slack = wq.size() == 0 ? 1.0 : 1.0 - wq.maxCoeff();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gkls
