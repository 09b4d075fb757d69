#include "nomocou/modes.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "nomocou/errors.hpp"

namespace nomocou {

std::string_view branch_name(Branch b) {
  switch (b) {
    case Branch::Axial: return "axial";
    case Branch::RadialX: return "radial-x";
    case Branch::RadialY: return "radial-y";
    case Branch::PlanarExB: return "planar-ExB";
    case Branch::PlanarCyclotron: return "planar-cyclotron";
    case Branch::Unclassified: return "unclassified";
  }
  return "unclassified";
}

bool is_axial(Branch b) { return b == Branch::Axial; }

Eigen::MatrixXd symplectic_form(int half_dim) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * half_dim, 2 * half_dim);
  J.topRightCorner(half_dim, half_dim).setIdentity();
  J.bottomLeftCorner(half_dim, half_dim) = -Eigen::MatrixXd::Identity(half_dim, half_dim);
  return J;
}

Eigen::MatrixXd stiffness_matrix(const Equilibrium& eq) {
  if (!(eq.residual_gradient_norm < 1e-6)) throw InvalidInput("stiffness_matrix: equilibrium is not converged");
  Eigen::MatrixXd K = potential_hessian(eq.positions, eq.model);
  return 0.5 * (K + K.transpose());
}

namespace {

using cd = std::complex<double>;

// Rotate mode n so the largest position component of s + i t is real positive.
// Near-ties (relative 1e-8) go to the highest coordinate index.
void fix_phase(Eigen::MatrixXd& S, int n, int M) {
  Eigen::VectorXcd v(S.rows());
  for (int r = 0; r < S.rows(); ++r) v[r] = cd(S(r, n), S(r, M + n));
  double vmax = 0.0;
  for (int k = 0; k < M; ++k) vmax = std::max(vmax, std::abs(v[k]));
  int kstar = 0;
  for (int k = 0; k < M; ++k)
    if (std::abs(v[k]) >= (1.0 - 1e-8) * vmax) kstar = k;
  const cd phase = std::polar(1.0, -std::arg(v[kstar]));
  v *= phase;
  for (int r = 0; r < S.rows(); ++r) {
    S(r, n) = v[r].real();
    S(r, M + n) = v[r].imag();
  }
  S(kstar, M + n) = 0.0;
}

// Deterministic basis of each degenerate eigenspace: Gram-Schmidt on the
// projections of unit vectors e_0, e_1, ... onto the subspace.
void canonicalize_degenerate(Eigen::VectorXd& w2, Eigen::MatrixXd& V) {
  const int M = static_cast<int>(w2.size());
  int start = 0;
  while (start < M) {
    int end = start + 1;
    while (end < M && std::abs(w2[end] - w2[start]) < 1e-10 * std::max(1.0, std::abs(w2[start]))) ++end;
    const int g = end - start;
    if (g > 1) {
      const Eigen::MatrixXd Vc = V.middleCols(start, g);
      Eigen::MatrixXd basis(M, g);
      int found = 0;
      for (int k = 0; k < M && found < g; ++k) {
        Eigen::VectorXd p = Vc * Vc.row(k).transpose();
        for (int b = 0; b < found; ++b) p -= basis.col(b).dot(p) * basis.col(b);
        const double nrm = p.norm();
        if (nrm > 1e-6) basis.col(found++) = p / nrm;
      }
      if (found == g) V.middleCols(start, g) = basis;
    }
    start = end;
  }
}

ModeSpectrum rf_modes(const Eigen::MatrixXd& K) {
  const int M = static_cast<int>(K.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  if (es.info() != Eigen::Success) throw NumericalFailure("stiffness eigendecomposition failed");
  Eigen::VectorXd w2 = es.eigenvalues();
  Eigen::MatrixXd V = es.eigenvectors();
  for (int n = 0; n < M; ++n)
    if (w2[n] <= 1e-12) throw InstabilityError("mode " + std::to_string(n) + " has non-positive stiffness " + std::to_string(w2[n]), n);
  canonicalize_degenerate(w2, V);
  ModeSpectrum sp;
  sp.frequencies = w2.array().sqrt();
  sp.S = Eigen::MatrixXd::Zero(2 * M, 2 * M);
  for (int n = 0; n < M; ++n) {
    const double w = sp.frequencies[n];
    sp.S.block(0, n, M, 1) = V.col(n) / std::sqrt(w);
    sp.S.block(M, M + n, M, 1) = V.col(n) * std::sqrt(w);
  }
  sp.T = Eigen::MatrixXd::Identity(2 * M, 2 * M);
  sp.H = Eigen::MatrixXd::Identity(2 * M, 2 * M);
  sp.H.topLeftCorner(M, M) = K;
  return sp;
}

ModeSpectrum penning_modes(const Eigen::MatrixXd& K, double cyclotron, int n_ions) {
  const int M = static_cast<int>(K.rows());
  const double c = 0.5 * cyclotron;
  Eigen::MatrixXd Bm = Eigen::MatrixXd::Zero(M, M);
  for (int i = 0; i < n_ions; ++i) {
    Bm(i, n_ions + i) = c;
    Bm(n_ions + i, i) = -c;
  }
  ModeSpectrum sp;
  sp.T = Eigen::MatrixXd::Identity(2 * M, 2 * M);
  sp.T.bottomLeftCorner(M, M) = Bm;
  Eigen::MatrixXd Tinv = Eigen::MatrixXd::Identity(2 * M, 2 * M);
  Tinv.bottomLeftCorner(M, M) = -Bm;
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(2 * M, 2 * M);
  E.topLeftCorner(M, M) = K;
  sp.H = Tinv.transpose() * E * Tinv;
  sp.H = 0.5 * (sp.H + sp.H.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hs(sp.H);
  if (hs.info() != Eigen::Success) throw NumericalFailure("Hamiltonian eigendecomposition failed");
  if (hs.eigenvalues().minCoeff() <= 0)
    throw InstabilityError("phase-space Hamiltonian is not positive definite", -1);
  const Eigen::VectorXd sq = hs.eigenvalues().array().sqrt();
  const Eigen::MatrixXd Hh = hs.eigenvectors() * sq.asDiagonal() * hs.eigenvectors().transpose();
  const Eigen::MatrixXd Hmh = hs.eigenvectors() * sq.cwiseInverse().asDiagonal() * hs.eigenvectors().transpose();
  const Eigen::MatrixXd J = symplectic_form(M);
  const Eigen::MatrixXd Mm = Hh * J * Hh;
  const Eigen::MatrixXcd iM = cd(0, 1) * Mm.cast<cd>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(iM);
  if (es.info() != Eigen::Success) throw NumericalFailure("symplectic eigendecomposition failed");

  sp.frequencies.resize(M);
  sp.S.resize(2 * M, 2 * M);
  for (int n = 0; n < M; ++n) {
    const double lam = es.eigenvalues()[M + n];
    if (!(lam > 0)) throw InstabilityError("mode " + std::to_string(n) + " has non-positive frequency", n);
    const Eigen::VectorXcd w = Hmh.cast<cd>() * es.eigenvectors().col(M + n);
    Eigen::VectorXd s = w.real();
    Eigen::VectorXd t = w.imag();  // t = -Im(w) up to the overall sign fixed below
    t = -t;
    const double kappa = s.dot(J * t);
    if (std::abs(kappa) < 1e-300) throw NumericalFailure("degenerate symplectic pair");
    s /= std::sqrt(std::abs(kappa));
    t /= std::sqrt(std::abs(kappa));
    if (kappa < 0) t = -t;
    sp.frequencies[n] = lam;
    sp.S.col(n) = s;
    sp.S.col(M + n) = t;
  }
  return sp;
}

}  // namespace

ModeSpectrum normal_modes(const Equilibrium& eq) {
  const Eigen::MatrixXd K = stiffness_matrix(eq);
  const int M = static_cast<int>(K.rows());
  ModeSpectrum sp = eq.model.penning && eq.model.cyclotron != 0.0 ? penning_modes(K, eq.model.cyclotron, eq.num_ions)
                                                                 : rf_modes(K);
  sp.penning = eq.model.penning;
  for (int n = 0; n < M; ++n) fix_phase(sp.S, n, M);

  const Eigen::MatrixXd J = symplectic_form(M);
  const Eigen::MatrixXd Sinv = -J * sp.S.transpose() * J;
  sp.A = Sinv * sp.T;
  Eigen::MatrixXd D = sp.S.transpose() * sp.H * sp.S;
  for (int n = 0; n < M; ++n) {
    D(n, n) -= sp.frequencies[n];
    D(M + n, M + n) -= sp.frequencies[n];
  }
  sp.diag_residual = D.cwiseAbs().maxCoeff();
  sp.symplectic_residual = (sp.S.transpose() * J * sp.S - J).cwiseAbs().maxCoeff();
  sp.branches = classify_branches(sp, eq);
  return sp;
}

std::vector<Branch> classify_branches(const ModeSpectrum& spec, const Equilibrium& eq) {
  const int n = eq.num_ions;
  const int M = spec.num_modes();
  std::array<bool, 3> flat{};
  int extended = 0;
  for (int a = 0; a < 3; ++a) {
    flat[a] = eq.positions.segment(a * n, n).cwiseAbs().maxCoeff() < 1e-6;
    if (!flat[a]) ++extended;
  }
  std::array<double, 3> extent{};
  for (int a = 0; a < 3; ++a) extent[a] = eq.positions.segment(a * n, n).cwiseAbs().maxCoeff();

  // A 2D crystal (as opposed to a zig-zag chain): one flat axis and an in-plane aspect ratio below 3.
  int flat_axis = -1;
  bool planar2d = false;
  if (extended == 2 && n >= 3) {
    for (int a = 0; a < 3; ++a)
      if (flat[a]) flat_axis = a;
    double lo = 1e300, hi = 0.0;
    for (int a = 0; a < 3; ++a)
      if (a != flat_axis) {
        lo = std::min(lo, extent[a]);
        hi = std::max(hi, extent[a]);
      }
    planar2d = spec.penning || hi < 3.0 * lo;
  }
  if (spec.penning && flat_axis < 0 && extended <= 1) flat_axis = 2;

  std::vector<Branch> out(M, Branch::Unclassified);
  std::vector<std::array<double, 3>> weight(M);
  for (int m = 0; m < M; ++m) {
    std::array<double, 3> w{};
    double tot = 0.0;
    for (int a = 0; a < 3; ++a) {
      w[a] = spec.S.block(a * n, m, n, 1).squaredNorm() + spec.S.block(a * n, M + m, n, 1).squaredNorm();
      tot += w[a];
    }
    for (auto& x : w) x /= tot;
    weight[m] = w;
  }
  auto dominant = [&](int m) {
    int best = 0;
    for (int a = 1; a < 3; ++a)
      if (weight[m][a] > weight[m][best]) best = a;
    return weight[m][best] >= 0.9 ? best : -1;
  };

  if (spec.penning) {
    double axial_max = -1.0;
    for (int m = 0; m < M; ++m)
      if (weight[m][2] >= 0.9) {
        out[m] = Branch::Axial;
        axial_max = std::max(axial_max, spec.frequencies[m]);
      }
    for (int m = 0; m < M; ++m) {
      if (out[m] == Branch::Axial) continue;
      if (weight[m][2] > 0.1) continue;
      out[m] = spec.frequencies[m] > axial_max ? Branch::PlanarCyclotron : Branch::PlanarExB;
    }
    return out;
  }

  if (planar2d) {
    // Out-of-plane motion is the drumhead (axial) branch; in-plane labels follow
    // the stiffer (radial-x) and softer (radial-y) in-plane axes.
    std::array<int, 2> plane{};
    int k = 0;
    for (int a = 0; a < 3; ++a)
      if (a != flat_axis) plane[k++] = a;
    const TrapModel& tm = eq.model;
    if (tm.spring[plane[0]] < tm.spring[plane[1]]) std::swap(plane[0], plane[1]);
    for (int m = 0; m < M; ++m) {
      const int d = dominant(m);
      if (d == flat_axis) out[m] = Branch::Axial;
      else if (d == plane[0]) out[m] = Branch::RadialX;
      else if (d == plane[1]) out[m] = Branch::RadialY;
    }
    return out;
  }

  for (int m = 0; m < M; ++m) {
    switch (dominant(m)) {
      case 0: out[m] = Branch::RadialX; break;
      case 1: out[m] = Branch::RadialY; break;
      case 2: out[m] = Branch::Axial; break;
      default: break;
    }
  }
  return out;
}

Eigen::VectorXd mode_energies(const ModeSpectrum& spec, const Eigen::VectorXd& X) {
  const int M = spec.num_modes();
  const Eigen::VectorXd Z = spec.A * X;
  Eigen::VectorXd E(M);
  for (int n = 0; n < M; ++n) E[n] = 0.5 * spec.frequencies[n] * (Z[n] * Z[n] + Z[M + n] * Z[M + n]);
  return E;
}

}  // namespace nomocou
