#include "nomocou/crystal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "nomocou/errors.hpp"
#include "nomocou/rng.hpp"

namespace nomocou {

namespace {

constexpr double kMinSeparation = 1e-12;

template <class F>
void for_each_pair(const Eigen::VectorXd& pos, int n, F&& f) {
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Eigen::Vector3d r(pos[i] - pos[j], pos[n + i] - pos[n + j], pos[2 * n + i] - pos[2 * n + j]);
      const double d = r.norm();
      if (d < kMinSeparation) throw SingularConfiguration("ions " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      f(i, j, r, d);
    }
  }
}

int ion_count(const Eigen::VectorXd& pos) {
  if (pos.size() % 3 != 0) throw InvalidInput("position vector length must be a multiple of 3");
  return static_cast<int>(pos.size() / 3);
}

}  // namespace

void validate(const TrapConfig& trap) {
  const auto& s = trap.species;
  if (!(s.mass > 0.0) || s.charge == 0.0) throw InvalidInput("invalid species");
  if (const auto* rf = std::get_if<RfHarmonic>(&trap.variant)) {
    if (!(rf->wx > 0 && rf->wy > 0 && rf->wz > 0)) throw InvalidInput("RfHarmonic frequencies must be positive");
  } else if (const auto* an = std::get_if<RfAnharmonicAxial>(&trap.variant)) {
    if (!(an->wx > 0 && an->wy > 0)) throw InvalidInput("radial frequencies must be positive");
    if (!(an->a4 > 0)) throw InvalidInput("quartic coefficient a4 must be positive");
    if (an->a2 == 0.0) throw InvalidInput("quadratic coefficient a2 must be nonzero");
  } else {
    const auto& p = std::get<Penning>(trap.variant);
    const double wc = s.charge * p.B / s.mass;
    if (!(p.wz > 0)) throw InvalidInput("Penning wz must be positive");
    if (!(p.w_rot > 0 && p.w_rot < wc)) throw InvalidInput("Penning rotation must satisfy 0 < w_rot < qB/m");
    const Eigen::Vector2d w2 = penning_planar_omega_sq(p, s);
    if (!(w2.minCoeff() > 0)) throw InvalidInput("Penning rotating-frame potential is not confining in the plane");
  }
  if (trap.omega0_override < 0) throw InvalidInput("omega0 override must be positive");
}

double reference_omega(const TrapConfig& trap) {
  if (trap.omega0_override > 0) return trap.omega0_override;
  if (const auto* rf = std::get_if<RfHarmonic>(&trap.variant)) return rf->wz;
  if (const auto* an = std::get_if<RfAnharmonicAxial>(&trap.variant))
    return std::sqrt(std::abs(an->a2) / trap.species.mass);
  return std::get<Penning>(trap.variant).wz;
}

ScaleSet trap_scales(const TrapConfig& trap) { return make_scales(trap.species, reference_omega(trap)); }

Eigen::Vector2d penning_planar_omega_sq(const Penning& p, const IonSpecies& s) {
  const double wc = s.charge * p.B / s.mass;
  const double base = p.w_rot * (wc - p.w_rot) - 0.5 * p.wz * p.wz;
  return {base + p.wall_delta * p.wz * p.wz, base - p.wall_delta * p.wz * p.wz};
}

Penning match_rf_anisotropy(const RfHarmonic& rf, double wz, double B, const IonSpecies& species) {
  std::array<double, 3> w2 = {rf.wx * rf.wx, rf.wy * rf.wy, rf.wz * rf.wz};
  std::sort(w2.begin(), w2.end());
  const double r_low = w2[0] / w2[2], r_high = w2[1] / w2[2];
  Penning p;
  p.wz = wz;
  p.B = B;
  p.wall_delta = 0.5 * (r_high - r_low);
  // w_rot (w_c - w_rot) - wz^2 / 2 = wz^2 (r_low + r_high) / 2
  const double wc = species.charge * B / species.mass;
  const double target = wz * wz * 0.5 * (1.0 + r_low + r_high);
  const double disc = wc * wc - 4.0 * target;
  if (!(disc > 0)) throw InvalidInput("match_rf_anisotropy: magnetic field too weak for the requested confinement");
  p.w_rot = 0.5 * (wc - std::sqrt(disc));
  return p;
}

TrapModel dimensionless_model(const TrapConfig& trap) {
  validate(trap);
  const double w0 = reference_omega(trap);
  TrapModel m;
  if (const auto* rf = std::get_if<RfHarmonic>(&trap.variant)) {
    m.spring = Eigen::Vector3d(rf->wx, rf->wy, rf->wz).array().square() / (w0 * w0);
  } else if (const auto* an = std::get_if<RfAnharmonicAxial>(&trap.variant)) {
    const ScaleSet sc = make_scales(trap.species, w0);
    const double E0 = sc.E0;
    m.spring = Eigen::Vector3d(an->wx * an->wx / (w0 * w0), an->wy * an->wy / (w0 * w0), an->a2 * sc.l0 * sc.l0 / E0);
    m.quartic = an->a4 * std::pow(sc.l0, 4) / E0;
  } else {
    const auto& p = std::get<Penning>(trap.variant);
    const Eigen::Vector2d w2 = penning_planar_omega_sq(p, trap.species);
    m.spring = Eigen::Vector3d(w2[0], w2[1], p.wz * p.wz) / (w0 * w0);
    const double wc = trap.species.charge * p.B / trap.species.mass;
    m.cyclotron = (wc - 2.0 * p.w_rot) / w0;
    m.penning = true;
  }
  return m;
}

double potential_energy(const Eigen::VectorXd& pos, const TrapModel& model) {
  const int n = ion_count(pos);
  double u = 0.0;
  for (int a = 0; a < 3; ++a) u += 0.5 * model.spring[a] * pos.segment(a * n, n).squaredNorm();
  if (model.quartic != 0.0) u += 0.25 * model.quartic * pos.segment(2 * n, n).array().pow(4).sum();
  for_each_pair(pos, n, [&](int, int, const Eigen::Vector3d&, double d) { u += 1.0 / d; });
  return u;
}

double total_potential(const Eigen::VectorXd& pos, const TrapConfig& trap) {
  return 2.0 * potential_energy(pos, dimensionless_model(trap));
}

Eigen::VectorXd potential_gradient(const Eigen::VectorXd& pos, const TrapModel& model) {
  const int n = ion_count(pos);
  Eigen::VectorXd g(3 * n);
  for (int a = 0; a < 3; ++a) g.segment(a * n, n) = model.spring[a] * pos.segment(a * n, n);
  if (model.quartic != 0.0) g.segment(2 * n, n).array() += model.quartic * pos.segment(2 * n, n).array().cube();
  for_each_pair(pos, n, [&](int i, int j, const Eigen::Vector3d& r, double d) {
    const Eigen::Vector3d f = r / (d * d * d);
    for (int a = 0; a < 3; ++a) {
      g[a * n + i] -= f[a];
      g[a * n + j] += f[a];
    }
  });
  return g;
}

Eigen::MatrixXd potential_hessian(const Eigen::VectorXd& pos, const TrapModel& model) {
  const int n = ion_count(pos);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < n; ++i) h(a * n + i, a * n + i) = model.spring[a];
  if (model.quartic != 0.0)
    for (int i = 0; i < n; ++i) h(2 * n + i, 2 * n + i) += 3.0 * model.quartic * pos[2 * n + i] * pos[2 * n + i];
  for_each_pair(pos, n, [&](int i, int j, const Eigen::Vector3d& r, double d) {
    const double d2 = d * d, d5 = d2 * d2 * d;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double v = (3.0 * r[a] * r[b] - (a == b ? d2 : 0.0)) / d5;
        h(a * n + i, b * n + i) += v;
        h(a * n + j, b * n + j) += v;
        h(a * n + i, b * n + j) -= v;
        h(a * n + j, b * n + i) -= v;
      }
    }
  });
  return h;
}

namespace {

struct MinResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double gnorm = 0.0;
};

double safe_energy(const Eigen::VectorXd& x, const TrapModel& m) {
  try {
    return potential_energy(x, m);
  } catch (const SingularConfiguration&) {
    return std::numeric_limits<double>::infinity();
  }
}

// BFGS with Armijo backtracking, followed by Newton refinement.
MinResult minimize(Eigen::VectorXd x, const TrapModel& m, const EquilibriumOptions& opt) {
  const int dim = static_cast<int>(x.size());
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(dim, dim);
  double f = potential_energy(x, m);
  Eigen::VectorXd g = potential_gradient(x, m);
  for (int it = 0; it < opt.max_iterations && g.norm() > 1e-7; ++it) {
    Eigen::VectorXd p = -Hinv * g;
    if (p.dot(g) >= 0) {
      Hinv.setIdentity();
      p = -g;
    }
    // Keep steps well below typical inter-ion distances.
    const double pmax = p.cwiseAbs().maxCoeff();
    if (pmax > 0.3) p *= 0.3 / pmax;
    double step = 1.0;
    double fn = safe_energy(x + step * p, m);
    while (!(fn <= f + 1e-4 * step * p.dot(g)) && step > 1e-14) {
      step *= 0.5;
      fn = safe_energy(x + step * p, m);
    }
    if (step <= 1e-14) {
      Hinv.setIdentity();
      continue;
    }
    const Eigen::VectorXd s = step * p;
    x += s;
    const Eigen::VectorXd gn = potential_gradient(x, m);
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-16) {
      const double rho = 1.0 / sy;
      const Eigen::VectorXd Hy = Hinv * y;
      Hinv += rho * ((1.0 + rho * y.dot(Hy)) * s * s.transpose() - Hy * s.transpose() - s * Hy.transpose());
    }
    f = fn;
    g = gn;
  }
  // Newton polish; the Hessian is positive definite at a confining minimum.
  for (int it = 0; it < 50 && g.norm() > 0.1 * opt.gradient_tol; ++it) {
    const Eigen::MatrixXd h = potential_hessian(x, m);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    Eigen::VectorXd p = -ldlt.solve(g);
    if (!p.allFinite() || p.dot(g) >= 0) p = -g;
    double step = 1.0;
    Eigen::VectorXd xn = x + p;
    Eigen::VectorXd gn = potential_gradient(xn, m);
    while (gn.norm() > g.norm() && step > 1e-6) {
      step *= 0.5;
      xn = x + step * p;
      gn = potential_gradient(xn, m);
    }
    if (gn.norm() >= g.norm()) break;
    x = xn;
    g = gn;
  }
  return {x, potential_energy(x, m), g.norm()};
}

// Exact zeros on axes where every ion sits at the origin plane.
void snap_flat_axes(Eigen::VectorXd& x, int n) {
  for (int a = 0; a < 3; ++a) {
    auto seg = x.segment(a * n, n);
    if (seg.cwiseAbs().maxCoeff() < 1e-9) seg.setZero();
  }
}

bool ion_less(const Eigen::VectorXd& x, int n, int i, int j) {
  for (int a : {2, 1, 0}) {
    const double d = x[a * n + i] - x[a * n + j];
    if (std::abs(d) > 1e-8) return d < 0;
  }
  return i < j;
}

Eigen::VectorXd sort_ions(const Eigen::VectorXd& x, int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return ion_less(x, n, i, j); });
  Eigen::VectorXd out(3 * n);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < 3; ++a) out[a * n + k] = x[a * n + order[k]];
  return out;
}

// Axes ordered from weakest to strongest spring; ties keep z before y before x.
std::array<int, 3> axes_by_stiffness(const TrapModel& m) {
  std::array<int, 3> ax{2, 1, 0};
  std::stable_sort(ax.begin(), ax.end(), [&](int a, int b) { return m.spring[a] < m.spring[b]; });
  return ax;
}

// Seeds live in normalized coordinates (see normalized_model) and jitter is
// drawn per sorted axis, so traps with equal stiffness ratios get identical seeds.
Eigen::VectorXd line_seed(int n, const TrapModel& m, CounterRng& rng, double jitter) {
  const auto ax = axes_by_stiffness(m);
  const double k = std::max({m.spring[ax[0]], m.quartic, 1e-6});
  const double spacing = std::cbrt(2.0 / k) * std::pow(std::max(n, 2), -0.35);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3 * n);
  for (int i = 0; i < n; ++i) x[ax[0] * n + i] = (i - 0.5 * (n - 1)) * spacing;
  for (int a : ax)
    for (int i = 0; i < n; ++i) x[a * n + i] += jitter * spacing * (rng.uniform() - 0.5);
  return x;
}

Eigen::VectorXd disk_seed(int n, const TrapModel& m, CounterRng& rng, double jitter) {
  const auto ax = axes_by_stiffness(m);
  const double k = std::max(m.spring[ax[1]], 1e-6);
  const double a0 = std::cbrt(1.0 / k) * std::pow(n, -0.25) * 1.5;
  std::vector<Eigen::Vector2d> pts;
  const int R = static_cast<int>(std::ceil(std::sqrt(n))) + 2;
  for (int u = -R; u <= R; ++u)
    for (int v = -R; v <= R; ++v) pts.emplace_back(a0 * (u + 0.5 * v), a0 * (std::sqrt(3.0) / 2.0) * v);
  std::stable_sort(pts.begin(), pts.end(), [](const auto& p, const auto& q) { return p.squaredNorm() < q.squaredNorm() - 1e-12; });
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3 * n);
  for (int i = 0; i < n; ++i) {
    x[ax[0] * n + i] = pts[i][0];
    x[ax[1] * n + i] = pts[i][1];
  }
  for (int a : ax)
    for (int i = 0; i < n; ++i) x[a * n + i] += jitter * a0 * (rng.uniform() - 0.5);
  return x;
}

// Length unit L with the stiffest confinement set to one: U(x) = U_norm(x / L) / L.
double normalization_length(const TrapModel& m) {
  const double k = std::max(m.spring.cwiseAbs().maxCoeff(), m.quartic);
  return std::cbrt(1.0 / k);
}

TrapModel normalized_model(const TrapModel& m, double L) {
  TrapModel out = m;
  out.spring = m.spring * (L * L * L);
  out.quartic = m.quartic * std::pow(L, 5);
  return out;
}

bool is_line(const Eigen::VectorXd& x, int n) {
  int extended = 0;
  for (int a = 0; a < 3; ++a)
    if (x.segment(a * n, n).cwiseAbs().maxCoeff() > 1e-6) ++extended;
  return extended <= 1;
}

Equilibrium package(const TrapConfig& trap, const TrapModel& m, Eigen::VectorXd x, int n) {
  snap_flat_axes(x, n);
  x = sort_ions(x, n);
  Equilibrium eq;
  eq.positions = x;
  eq.scales = trap_scales(trap);
  eq.trap = trap;
  eq.model = m;
  eq.num_ions = n;
  eq.energy = potential_energy(x, m);
  eq.residual_gradient_norm = potential_gradient(x, m).norm();
  return eq;
}

}  // namespace

Equilibrium equilibrium_from_positions(const TrapConfig& trap, const Eigen::VectorXd& guess,
                                       const EquilibriumOptions& options) {
  const TrapModel m = dimensionless_model(trap);
  const int n = ion_count(guess);
  MinResult r = minimize(guess, m, options);
  Equilibrium eq = package(trap, m, r.x, n);
  if (eq.residual_gradient_norm > options.gradient_tol)
    throw ConvergenceError("equilibrium gradient norm " + std::to_string(eq.residual_gradient_norm) + " above tolerance");
  return eq;
}

Equilibrium find_equilibrium(const TrapConfig& trap, int num_ions, std::uint64_t seed,
                             const EquilibriumOptions& options) {
  if (num_ions < 1) throw InvalidInput("need at least one ion");
  const TrapModel m = dimensionless_model(trap);
  const int n = num_ions;
  if (n == 1) return package(trap, m, Eigen::VectorXd::Zero(3), 1);

  CounterRng rng(seed);
  const double L = normalization_length(m);
  const TrapModel mn = normalized_model(m, L);
  MinResult best;
  bool have = false;
  bool line_relaxed_off = false;
  std::vector<Eigen::VectorXd> seeds{line_seed(n, mn, rng, options.jitter)};
  if (n >= 3) seeds.push_back(disk_seed(n, mn, rng, options.jitter));
  EquilibriumOptions norm_opt = options;
  norm_opt.gradient_tol = 1e-3 * options.gradient_tol;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    MinResult r = minimize(seeds[s], mn, norm_opt);
    if (s == 0 && !is_line(r.x, n)) line_relaxed_off = true;
    if (!have || r.f < best.f - 1e-12 * std::abs(best.f)) {
      best = r;
      have = true;
    }
  }
  best = minimize(best.x * L, m, options);
  Equilibrium eq = package(trap, m, best.x, n);
  eq.structure_mismatch = line_relaxed_off;
  if (eq.residual_gradient_norm > options.gradient_tol)
    throw ConvergenceError("equilibrium gradient norm " + std::to_string(eq.residual_gradient_norm) + " above tolerance");
  return eq;
}

Eigen::MatrixXd positions_as_rows(const Equilibrium& eq) {
  Eigen::MatrixXd P(eq.num_ions, 3);
  for (int i = 0; i < eq.num_ions; ++i) P.row(i) = eq.ion(i).transpose();
  return P;
}

double procrustes_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw InvalidInput("procrustes: shape mismatch");
  const Eigen::MatrixXd a = A.rowwise() - A.colwise().mean();
  const Eigen::MatrixXd b = B.rowwise() - B.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd R = svd.matrixU() * svd.matrixV().transpose();
  const double s = svd.singularValues().sum() / a.squaredNorm();
  return (s * a * R - b).norm() / b.norm();
}

}  // namespace nomocou
