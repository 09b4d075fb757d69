#include "nomocou/dynamics.hpp"

#include <cmath>
#include <complex>
#include <ostream>

#include "nomocou/errors.hpp"
#include "nomocou/rng.hpp"

namespace nomocou {

Eigen::VectorXd PhaseSpaceState::stacked() const {
  Eigen::VectorXd x(positions.size() + velocities.size());
  x << positions, velocities;
  return x;
}

ModeAmplitudes thermal_amplitudes(const ModeSpectrum& spec, const ScaleSet& scales, double kelvin, std::uint64_t seed) {
  if (kelvin < 0) throw InvalidInput("temperature must be non-negative");
  const int M = spec.num_modes();
  ModeAmplitudes a;
  a.energies = Eigen::VectorXd::Constant(M, constants::k_B * kelvin / scales.E0);
  a.phases.resize(M);
  CounterRng rng(seed, 1);
  for (int n = 0; n < M; ++n) a.phases[n] = rng.uniform(0.0, 2.0 * constants::pi);
  return a;
}

PhaseSpaceState init_modes(const ModeSpectrum& spec, const Equilibrium& eq, const ModeAmplitudes& amps) {
  const int M = spec.num_modes();
  if (amps.energies.size() != M || amps.phases.size() != M) throw InvalidInput("init_modes: one amplitude per mode required");
  Eigen::VectorXd Z(2 * M);
  for (int n = 0; n < M; ++n) {
    if (amps.energies[n] < 0) throw InvalidInput("init_modes: negative energy target");
    const double r = std::sqrt(2.0 * amps.energies[n] / spec.frequencies[n]);
    Z[n] = r * std::cos(amps.phases[n]);
    Z[M + n] = r * std::sin(amps.phases[n]);
  }
  // (R, V) = T^-1 S Z with T^-1 = 2I - T for the unit lower-triangular T.
  const Eigen::MatrixXd Tinv = 2.0 * Eigen::MatrixXd::Identity(2 * M, 2 * M) - spec.T;
  const Eigen::VectorXd X = Tinv * (spec.S * Z);
  PhaseSpaceState s;
  s.positions = eq.positions + X.head(M);
  s.velocities = X.tail(M);
  s.frame = eq.model.penning ? Frame::Rotating : Frame::Lab;
  return s;
}

double frame_rotation(const Equilibrium& eq) {
  if (const auto* p = std::get_if<Penning>(&eq.trap.variant)) return p->w_rot / eq.scales.omega0;
  return 0.0;
}

namespace {

void rotate_xy(Eigen::VectorXd& v, int n, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (int i = 0; i < n; ++i) {
    const double x = v[i], y = v[n + i];
    v[i] = c * x - s * y;
    v[n + i] = s * x + c * y;
  }
}

}  // namespace

PhaseSpaceState to_lab(const PhaseSpaceState& s, double rotation) {
  if (s.frame == Frame::Lab) return s;
  const int n = static_cast<int>(s.positions.size() / 3);
  PhaseSpaceState out = s;
  for (int i = 0; i < n; ++i) {
    out.velocities[i] -= rotation * s.positions[n + i];
    out.velocities[n + i] += rotation * s.positions[i];
  }
  rotate_xy(out.positions, n, rotation * s.time);
  rotate_xy(out.velocities, n, rotation * s.time);
  out.frame = Frame::Lab;
  return out;
}

PhaseSpaceState to_rotating(const PhaseSpaceState& s, double rotation) {
  if (s.frame == Frame::Rotating) return s;
  const int n = static_cast<int>(s.positions.size() / 3);
  PhaseSpaceState out = s;
  rotate_xy(out.positions, n, -rotation * s.time);
  rotate_xy(out.velocities, n, -rotation * s.time);
  for (int i = 0; i < n; ++i) {
    out.velocities[i] += rotation * out.positions[n + i];
    out.velocities[n + i] -= rotation * out.positions[i];
  }
  out.frame = Frame::Rotating;
  return out;
}

double total_energy(const PhaseSpaceState& s, const TrapModel& model) {
  return 0.5 * s.velocities.squaredNorm() + potential_energy(s.positions, model);
}

Trajectory integrate_md(const PhaseSpaceState& start, const Equilibrium& eq, const MdOptions& opt,
                        const ModeSpectrum* spec) {
  if (!(opt.dt > 0) || opt.steps < 0 || opt.stride < 1) throw InvalidInput("integrate_md: invalid step settings");
  const TrapModel& model = eq.model;
  const int n = eq.num_ions;
  PhaseSpaceState s = start;
  if (model.penning && s.frame == Frame::Lab) s = to_rotating(s, frame_rotation(eq));
  const double cyc = model.penning ? model.cyclotron : 0.0;
  const double dt = opt.dt;
  const std::complex<double> turn = std::exp(std::complex<double>(0.0, cyc * dt));
  const std::complex<double> drift = cyc != 0.0 ? (turn - 1.0) / std::complex<double>(0.0, cyc) : dt;

  Trajectory traj;
  std::vector<Eigen::VectorXd> rows;
  const double e_start = total_energy(s, model);
  auto record = [&] {
    const double e = total_energy(s, model);
    if (!std::isfinite(e) || std::abs(e - e_start) > opt.blowup_fraction * std::abs(e_start))
      throw IntegrationFailure("MD energy jump exceeds the blow-up threshold", s.time);
    traj.times.push_back(s.time);
    if (opt.keep_states) traj.states.push_back(s);
    traj.total_energy.push_back(e);
    if (spec) {
      Eigen::VectorXd X(2 * 3 * n);
      X << s.positions - eq.positions, s.velocities;
      rows.push_back(mode_energies(*spec, X));
    }
  };
  record();
  Eigen::VectorXd acc = -potential_gradient(s.positions, model);
  for (long k = 1; k <= opt.steps; ++k) {
    s.velocities += 0.5 * dt * acc;
    if (cyc == 0.0) {
      s.positions += dt * s.velocities;
    } else {
      for (int i = 0; i < n; ++i) {
        const std::complex<double> w(s.velocities[i], s.velocities[n + i]);
        const std::complex<double> dr = w * drift;
        s.positions[i] += dr.real();
        s.positions[n + i] += dr.imag();
        const std::complex<double> w2 = w * turn;
        s.velocities[i] = w2.real();
        s.velocities[n + i] = w2.imag();
        s.positions[2 * n + i] += dt * s.velocities[2 * n + i];
      }
    }
    acc = -potential_gradient(s.positions, model);
    s.velocities += 0.5 * dt * acc;
    s.time = start.time + k * dt;
    if (k % opt.stride == 0) record();
  }
  if (spec) {
    traj.mode_energy.resize(rows.size(), spec->num_modes());
    for (std::size_t k = 0; k < rows.size(); ++k) traj.mode_energy.row(k) = rows[k].transpose();
  }
  return traj;
}

Eigen::MatrixXd mode_energies(const Trajectory& traj, const ModeSpectrum& spec, const Equilibrium& eq) {
  const int M = spec.num_modes();
  Eigen::MatrixXd E(traj.states.size(), M);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    Eigen::VectorXd X(2 * M);
    X << s.positions - eq.positions, s.velocities;
    E.row(k) = mode_energies(spec, X).transpose();
  }
  return E;
}

ModeEnergyStats mode_energy_stats(const Eigen::MatrixXd& energies) {
  ModeEnergyStats st;
  st.mean = energies.colwise().mean().transpose();
  st.stddev.resize(energies.cols());
  for (int j = 0; j < energies.cols(); ++j) {
    const double var = (energies.col(j).array() - st.mean[j]).square().sum() / std::max<Eigen::Index>(1, energies.rows());
    st.stddev[j] = std::sqrt(var);
  }
  return st;
}

double ReducedHamiltonian::value(const Eigen::VectorXd& z) const {
  double h = 0.0;
  for (const auto& t : terms) {
    double v = t.coeff;
    for (std::size_t i = 0; i < t.powers.size(); ++i)
      if (t.powers[i]) v *= std::pow(z[i], t.powers[i]);
    h += v;
  }
  return h;
}

Eigen::VectorXd ReducedHamiltonian::gradient(const Eigen::VectorXd& z) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
  for (const auto& t : terms) {
    for (std::size_t i = 0; i < t.powers.size(); ++i) {
      if (!t.powers[i]) continue;
      double v = t.coeff * t.powers[i] * std::pow(z[i], t.powers[i] - 1);
      for (std::size_t j = 0; j < t.powers.size(); ++j)
        if (j != i && t.powers[j]) v *= std::pow(z[j], t.powers[j]);
      g[i] += v;
    }
  }
  return g;
}

ReducedHamiltonian reduce_hamiltonian(const ModeSpectrum& spec, const CubicModeTensor& tensor,
                                      const std::vector<int>& modes) {
  const int K = static_cast<int>(modes.size());
  const int M = spec.num_modes();
  ReducedHamiltonian h;
  h.num_modes = K;
  std::vector<int> global(2 * K);
  for (int k = 0; k < K; ++k) {
    if (modes[k] < 0 || modes[k] >= M) throw InvalidInput("reduce_hamiltonian: mode out of range");
    global[k] = modes[k];
    global[K + k] = M + modes[k];
    for (int q : {k, K + k}) {
      PolyTerm t{0.5 * spec.frequencies[modes[k]], std::vector<int>(2 * K, 0)};
      t.powers[q] = 2;
      h.terms.push_back(t);
    }
  }
  for (int u = 0; u < 2 * K; ++u)
    for (int v = u; v < 2 * K; ++v)
      for (int w = v; w < 2 * K; ++w) {
        const double c = tensor.monomial(global[u], global[v], global[w]);
        if (c == 0.0) continue;
        PolyTerm t{c, std::vector<int>(2 * K, 0)};
        ++t.powers[u];
        ++t.powers[v];
        ++t.powers[w];
        h.terms.push_back(t);
      }
  return h;
}

namespace {

struct Extended {
  Eigen::VectorXd q, p, x, y;
};

Eigen::VectorXd join(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd z(a.size() + b.size());
  z << a, b;
  return z;
}

void leapfrog(const ReducedHamiltonian& h, Extended& e, double tau) {
  const int K = h.num_modes;
  auto flow_a = [&](double t) {  // H(q, y): moves x and p
    const Eigen::VectorXd g = h.gradient(join(e.q, e.y));
    e.x += t * g.tail(K);
    e.p -= t * g.head(K);
  };
  auto flow_b = [&](double t) {  // H(x, p): moves q and y
    const Eigen::VectorXd g = h.gradient(join(e.x, e.p));
    e.q += t * g.tail(K);
    e.y -= t * g.head(K);
  };
  flow_a(0.5 * tau);
  flow_b(tau);
  flow_a(0.5 * tau);
}

}  // namespace

ReducedTrajectory integrate_crm(const ReducedHamiltonian& h, const Eigen::VectorXd& z0, const CrmOptions& opt) {
  const int K = h.num_modes;
  if (z0.size() != 2 * K) throw InvalidInput("integrate_crm: state size mismatch");
  if (opt.dt == 0.0 || opt.steps < 0 || opt.stride < 1) throw InvalidInput("integrate_crm: invalid step settings");
  if (opt.order != 2 && opt.order != 4) throw InvalidInput("integrate_crm: order must be 2 or 4");
  Extended e{z0.head(K), z0.tail(K), z0.head(K), z0.tail(K)};
  const double c1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double c0 = 1.0 - 2.0 * c1;
  ReducedTrajectory tr;
  const double e0 = h.value(z0);
  const double scale = std::max(std::abs(e0), 1e-300);
  auto record = [&](double t) {
    const Eigen::VectorXd z = join(e.q, e.p);
    const double en = h.value(z);
    if (!std::isfinite(en) || std::abs(en - e0) > opt.blowup_fraction * scale)
      throw IntegrationFailure("reduced-model energy jump exceeds the blow-up threshold", t);
    tr.times.push_back(t);
    tr.states.push_back(z);
    tr.energy.push_back(en);
  };
  record(0.0);
  for (long k = 1; k <= opt.steps; ++k) {
    if (opt.order == 2) {
      leapfrog(h, e, opt.dt);
    } else {
      leapfrog(h, e, c1 * opt.dt);
      leapfrog(h, e, c0 * opt.dt);
      leapfrog(h, e, c1 * opt.dt);
    }
    if (opt.mixing == Mixing::Average) {
      e.q = e.x = 0.5 * (e.q + e.x);
      e.p = e.y = 0.5 * (e.p + e.y);
    }
    if (k % opt.stride == 0) record(k * opt.dt);
  }
  return tr;
}

std::optional<std::size_t> first_maximum(const std::vector<double>& s, double drop_fraction, double floor_fraction) {
  double peak = 0.0;
  for (double v : s) peak = std::max(peak, v);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!(s[i] >= s[i - 1] && s[i] > s[i + 1])) continue;
    if (s[i] < floor_fraction * peak) continue;
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (s[j] > s[i]) break;
      if (s[j] < (1.0 - drop_fraction) * s[i]) return i;
    }
  }
  return std::nullopt;
}

void write_mode_energy_summary(std::ostream& out, const ModeSpectrum& spec, const ModeEnergyStats& st,
                               const ScaleSet& sc) {
  const double to_uK = sc.E0 / constants::k_B * 1e6;
  out << "mode,frequency_units_omega0,branch,mean_uK,stddev_uK\n";
  out.precision(10);
  for (int n = 0; n < spec.num_modes(); ++n)
    out << n << ',' << spec.frequencies[n] << ',' << branch_name(spec.branches[n]) << ',' << st.mean[n] * to_uK << ','
        << st.stddev[n] * to_uK << "\n";
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ScaleSet& sc, const std::string& header) {
  const double to_uK = sc.E0 / constants::k_B * 1e6;
  out << "# " << header << "\n";
  out << "time_s,total_energy_J";
  for (int j = 0; j < traj.mode_energy.cols(); ++j) out << ",E" << j << "_uK";
  out << "\n";
  out.precision(12);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << traj.times[k] / sc.omega0 << ',' << traj.total_energy[k] * sc.E0;
    for (int j = 0; j < traj.mode_energy.cols(); ++j) out << ',' << traj.mode_energy(k, j) * to_uK;
    out << "\n";
  }
}

}  // namespace nomocou
