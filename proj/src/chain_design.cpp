#include "nomocou/chain_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "json.hpp"
#include "nomocou/errors.hpp"
#include "nomocou/parallel.hpp"

namespace nomocou {

namespace {

double chain_energy(const Eigen::VectorXd& z, double s, double k) {
  const int n = static_cast<int>(z.size());
  double e = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z2 = z[i] * z[i];
    e += 0.5 * s * z2 + 0.25 * k * z2 * z2;
    for (int j = i + 1; j < n; ++j) {
      const double d = z[j] - z[i];
      if (!(d > 0)) return std::numeric_limits<double>::infinity();  // ordering lost
      e += 1.0 / d;
    }
  }
  return e;
}

Eigen::VectorXd chain_gradient(const Eigen::VectorXd& z, double s, double k) {
  const int n = static_cast<int>(z.size());
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    double f = s * z[i] + k * z[i] * z[i] * z[i];
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = z[i] - z[j];
      f -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
    g[i] = f;
  }
  return g;
}

Eigen::VectorXd uniform_line(int n, double spacing) {
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = spacing * (i - 0.5 * (n - 1));
  return z;
}

}  // namespace

Eigen::MatrixXd chain_hessian(const Eigen::VectorXd& z, double s, double k) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = s + 3.0 * k * z[i] * z[i];
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double c = 2.0 / std::pow(std::abs(z[i] - z[j]), 3);
      h(i, i) += c;
      h(i, j) = -c;
    }
  }
  return h;
}

Eigen::VectorXd chain_equilibrium(int num_ions, double s, double k) {
  if (num_ions < 1) throw InvalidInput("chain_equilibrium: need at least one ion");
  if (k < 0 || (s <= 0 && k == 0)) throw InvalidInput("chain_equilibrium: potential does not confine");
  if (num_ions == 1) return Eigen::VectorXd::Zero(1);

  // Best uniform spacing on a coarse log grid seeds Newton.
  double best_c = 1.0, best_e = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 120; ++i) {
    const double c = std::pow(10.0, -3.0 + 6.0 * i / 120.0);
    const double e = chain_energy(uniform_line(num_ions, c), s, k);
    if (e < best_e) best_e = e, best_c = c;
  }
  Eigen::VectorXd z = uniform_line(num_ions, best_c);
  double e = best_e, last_size = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 20000; ++it) {
    const Eigen::VectorXd g = chain_gradient(z, s, k);
    // Saddle-free Newton: curvatures enter by magnitude, and a negative one
    // with no gradient along it (a symmetric chain with an ion on the central
    // hump of a double well) gets an explicit push.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain_hessian(z, s, k));
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::VectorXd gv = es.eigenvectors().transpose() * g;
    const double spacing = (z[num_ions - 1] - z[0]) / (num_ions - 1);
    const double floor = 1e-8 * lam.cwiseAbs().maxCoeff();
    Eigen::VectorXd sv(num_ions);
    bool indefinite = false;
    for (int i = 0; i < num_ions; ++i) {
      sv[i] = -gv[i] / std::max(std::abs(lam[i]), floor);
      if (lam[i] < -floor) indefinite = true;
    }
    if (indefinite && std::abs(sv[0]) < 1e-3 * spacing) sv[0] = 0.1 * spacing;
    const Eigen::VectorXd step = es.eigenvectors() * sv;
    const double shift = indefinite ? 1.0 : 0.0;
    const double size = step.cwiseAbs().maxCoeff() / spacing;
    // Quadratic regime: the energy comparison is round-off limited, take the
    // full step and stop once the step stalls at gradient precision.
    if (shift == 0.0 && size < 1e-6) {
      z += step;
      if (size < 1e-12 || size > 0.5 * last_size) return z;
      last_size = size;
      continue;
    }
    double a = 1.0;
    Eigen::VectorXd trial;
    double et = std::numeric_limits<double>::infinity();
    for (int bt = 0; bt < 60; ++bt, a *= 0.5) {
      trial = z + a * step;
      et = chain_energy(trial, s, k);
      if (et <= e + 1e-4 * a * std::min(0.0, g.dot(step))) break;
    }
    if (!(et <= e)) {
      if (indefinite) throw ConvergenceError("chain_equilibrium: line search failed");
      return z;  // at round-off level of the energy
    }
    z = trial;
    e = et;
  }
  throw ConvergenceError("chain_equilibrium: Newton did not converge");
}

double spacing_variance(const Eigen::VectorXd& z, int n_aux) {
  const int n = static_cast<int>(z.size());
  const int qubits = n - 2 * n_aux;
  if (n_aux < 0 || qubits < 2) throw InvalidInput("spacing_variance: need at least two qubit ions");
  double mean = 0.0;
  for (int i = n_aux; i < n - n_aux - 1; ++i) mean += z[i + 1] - z[i];
  mean /= qubits - 1;
  double s = 0.0;
  for (int i = n_aux; i < n - n_aux - 1; ++i) {
    const double r = (z[i + 1] - z[i]) / mean - 1.0;
    s += r * r;
  }
  return s / qubits;
}

double ChainDesign::mean_qubit_spacing() const {
  const int n = static_cast<int>(positions.size());
  return (positions[n - n_aux - 1] - positions[n_aux]) / (n - 2 * n_aux - 1);
}

TrapConfig ChainDesign::trap(double wx, double wy) const {
  TrapConfig t;
  t.variant = RfAnharmonicAxial{wx, wy, a2, a4};
  t.species = species;
  return t;
}

ChainDesign optimize_spacing(const ChainDesignOptions& opt) {
  if (opt.num_ions - 2 * opt.n_aux < 2 || opt.n_aux < 0)
    throw InvalidInput("optimize_spacing: need N - 2 n_aux >= 2");
  if (!(opt.target_spacing > 0)) throw InvalidInput("optimize_spacing: target spacing must be positive");
  if (!(opt.b_min > 0) || !(opt.b_max > opt.b_min) || opt.grid < 3)
    throw InvalidInput("optimize_spacing: invalid b search range");

  const auto objective = [&](double b) { return spacing_variance(chain_equilibrium_b(opt.num_ions, b), opt.n_aux); };

  // Grid: index 0..grid-1 is b > 0, grid..2 grid-1 is b < 0, each ascending in |b|.
  const int g = opt.grid;
  const double lo = std::log(opt.b_min), hi = std::log(opt.b_max);
  std::vector<double> bs(2 * g), vals(2 * g);
  for (int i = 0; i < g; ++i) {
    const double mag = std::exp(lo + (hi - lo) * i / (g - 1));
    bs[i] = mag;
    bs[g + i] = -mag;
  }
  parallel_for(2 * g, [&](int i) { vals[i] = objective(bs[i]); });

  ChainDesign d;
  for (int i = 0; i < 2 * g; ++i) d.samples.emplace_back(bs[i], vals[i]);
  std::sort(d.samples.begin(), d.samples.end());

  int best = -1;
  for (int sign = 0; sign < 2; ++sign)
    for (int i = 1; i < g - 1; ++i) {
      const int k = sign * g + i;
      if (vals[k] <= vals[k - 1] && vals[k] <= vals[k + 1] && (best < 0 || vals[k] < vals[best])) best = k;
    }
  const int overall = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  if (best < 0 || vals[overall] < vals[best])
    throw SearchFailure("optimize_spacing: no bracketed minimum of the spacing variance in the b range", d.samples);

  // Golden section on ln|b| inside the bracketing neighbours.
  const double sgn = best < g ? 1.0 : -1.0;
  const int i = best % g;
  double a = lo + (hi - lo) * (i - 1) / (g - 1), c = lo + (hi - lo) * (i + 1) / (g - 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  const auto f = [&](double u) { return objective(sgn * std::exp(u)); };
  double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
  double f1 = f(x1), f2 = f(x2);
  while (c - a > opt.log_tol) {
    if (f1 < f2) {
      c = x2, x2 = x1, f2 = f1;
      x1 = c - phi * (c - a), f1 = f(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + phi * (c - a), f2 = f(x2);
    }
  }
  d.b = sgn * std::exp(0.5 * (a + c));
  if (objective(d.b) > vals[best]) d.b = bs[best];

  d.num_ions = opt.num_ions;
  d.n_aux = opt.n_aux;
  d.species = opt.species;
  d.positions = chain_equilibrium_b(opt.num_ions, d.b);
  d.s_z = spacing_variance(d.positions, opt.n_aux);
  d.harmonic_s_z = spacing_variance(chain_equilibrium(opt.num_ions, 1.0, 0.0), opt.n_aux);

  // Rescale: the chain shape is scale free, so choosing l0 fixes the spacing.
  const double q2 = constants::k_e * opt.species.charge * opt.species.charge;
  d.l0 = opt.target_spacing / d.mean_qubit_spacing();
  d.a2 = sgn * q2 / std::pow(d.l0, 3);
  d.a4 = d.a2 / (d.b * d.l0 * d.l0);
  d.omega0 = std::sqrt(std::abs(d.a2) / opt.species.mass);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain_hessian(d.positions, sgn, 1.0 / std::abs(d.b)));
  d.axial_frequencies = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return d;
}

void write_design_json(std::ostream& out, const ChainDesign& d) {
  nlohmann::json j;
  j["num_ions"] = d.num_ions;
  j["n_aux"] = d.n_aux;
  j["species"] = d.species.name;
  j["b"] = d.b;
  j["s_z"] = d.s_z;
  j["harmonic_s_z"] = d.harmonic_s_z;
  j["l0_m"] = d.l0;
  j["a2_J_per_m2"] = d.a2;
  j["a4_J_per_m4"] = d.a4;
  j["omega0_rad_per_s"] = d.omega0;
  std::vector<double> um(d.positions.size()), w(d.axial_frequencies.size()), hz(w.size());
  for (Eigen::Index i = 0; i < d.positions.size(); ++i) um[i] = d.positions[i] * d.l0 * 1e6;
  for (Eigen::Index i = 0; i < d.axial_frequencies.size(); ++i) {
    w[i] = d.axial_frequencies[i];
    hz[i] = w[i] * d.omega0 / (2 * constants::pi);
  }
  j["positions_um"] = um;
  j["axial_frequencies_omega0"] = w;
  j["axial_frequencies_hz"] = hz;
  nlohmann::json s = nlohmann::json::array();
  for (const auto& [b, v] : d.samples) s.push_back({b, v});
  j["samples_b_sz"] = s;
  out << j.dump(2) << '\n';
}

}  // namespace nomocou
