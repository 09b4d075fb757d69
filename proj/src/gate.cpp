#include "nomocou/gate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nomocou/errors.hpp"
#include "nomocou/parallel.hpp"

namespace nomocou {

void validate(const FockConfig& cfg) {
  if (cfg.modes.empty()) throw InvalidInput("FockConfig: no modes");
  for (const auto& m : cfg.modes) {
    if (m.cutoff < 1) throw InvalidInput("FockConfig: cutoff of mode " + m.name + " must be >= 1");
    if (!(m.nbar >= 0)) throw InvalidInput("FockConfig: negative occupation for mode " + m.name);
  }
  if (!(cfg.weight_cutoff > 0 && cfg.weight_cutoff < 1)) throw InvalidInput("FockConfig: weight cutoff must lie in (0, 1)");
}

HilbertLayout layout_for(const FockConfig& cfg, const std::vector<int>& start_levels) {
  HilbertLayout h;
  h.spin_dim = cfg.qubits ? 4 : 1;
  for (std::size_t k = 0; k < cfg.modes.size(); ++k) {
    int d = cfg.modes[k].cutoff;
    if (cfg.adaptive_margin >= 0 && cfg.modes[k].nbar > 0) d = start_levels.at(k) + cfg.adaptive_margin;
    h.dims.push_back(d);
  }
  return h;
}

double GateConfig::delta() const { return 2 * M_PI * loops / t_gate; }
double GateConfig::omega_r() const { return delta() / (2 * std::sqrt(static_cast<double>(loops)) * eta); }

void validate(const GateConfig& g, const FockConfig& cfg) {
  if (!cfg.qubits) throw InvalidInput("gate needs two qubits");
  if (!(g.t_gate > 0)) throw InvalidInput("gate time must be positive");
  if (g.loops < 1) throw InvalidInput("loop count must be a positive integer");
  if (!(g.eta > 0)) throw InvalidInput("Lamb-Dicke parameter must be positive");
  if (g.bus < 0 || g.bus >= static_cast<int>(cfg.modes.size())) throw InvalidInput("bus mode index out of range");
}

double lamb_dicke(double dk, double mass, double omega, double participation) {
  return dk * std::abs(participation) * std::sqrt(constants::hbar / (2 * mass * omega));
}

Eigen::Matrix4cd collective_spin_y() {
  Eigen::Matrix2cd sy;
  sy << 0, cd(0, -1), cd(0, 1), 0;
  const Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
  Eigen::Matrix4cd J = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) J(2 * a + b, 2 * c + d) = 0.5 * (sy(a, c) * I(b, d) + I(a, c) * sy(b, d));
  return J;
}

Eigen::Vector4cd y_basis_state(int q1, int q2) {
  auto one = [](int q) {
    Eigen::Vector2cd v(1.0, q == 0 ? cd(0, -1) : cd(0, 1));
    return Eigen::Vector2cd(v / std::sqrt(2.0));
  };
  const Eigen::Vector2cd u = one(q1), w = one(q2);
  Eigen::Vector4cd s;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) s[2 * a + b] = u[a] * w[b];
  return s;
}

Eigen::Vector4cd bell_target(double phase) {
  Eigen::Vector4cd t = Eigen::Vector4cd::Zero();
  t[0] = 1.0 / std::sqrt(2.0);
  t[3] = std::polar(1.0 / std::sqrt(2.0), phase);
  return t;
}

Hamiltonian build_ms_hamiltonian(const HilbertLayout& h, const GateConfig& g) {
  if (h.spin_dim != 4) throw InvalidInput("MS drive needs two qubits");
  if (g.bus < 0 || g.bus >= static_cast<int>(h.dims.size())) throw InvalidInput("bus mode index out of range");
  const SparseOp J = spin_op(h, collective_spin_y());
  const double amp = -std::sqrt(2.0) * g.eta * g.omega_r();
  const SparseOp X = mode_op(h, g.bus, quadrature_x(h.dims[g.bus]));
  const SparseOp P = mode_op(h, g.bus, quadrature_p(h.dims[g.bus]));
  const double d = g.delta();
  Hamiltonian H;
  H.add(SparseOp(amp * (J * X)), [d](double t) { return cd(std::cos(d * t), 0); }, "ms_x");
  H.add(SparseOp(amp * (J * P)), [d](double t) { return cd(std::sin(d * t), 0); }, "ms_p");
  return H;
}

void add_triad_terms(Hamiltonian& H, const HilbertLayout& layout, const std::vector<TriadCoupling>& triads) {
  const int M = static_cast<int>(layout.dims.size());
  for (const auto& t : triads) {
    for (int i : {t.n, t.m, t.p})
      if (i < 0 || i >= M) throw InvalidInput("triad mode index outside the mode list");
    if (t.p == t.n || t.p == t.m) throw InvalidInput("triad output mode must differ from the input modes");
    if (t.strength == cd(0)) continue;
    SparseOp op = lower_op(layout, t.n) * lower_op(layout, t.m);
    op = op * raise_op(layout, t.p);
    SparseOp adj = op.adjoint();
    H.add(std::move(op), phase_coeff(t.strength, t.delta), "triad");
    H.add(std::move(adj), phase_coeff(std::conj(t.strength), -t.delta), "triad_hc");
  }
}

namespace {

// Average over distinct orderings of q x-factors and p p-factors.
Eigen::MatrixXcd symmetric_word(int q, int p, int dim) {
  const int pad = dim + q + p + 1;
  const Eigen::MatrixXcd X = quadrature_x(pad), P = quadrature_p(pad);
  std::vector<int> word(q, 0);
  word.insert(word.end(), p, 1);
  std::sort(word.begin(), word.end());
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(pad, pad);
  int count = 0;
  do {
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(pad, pad);
    for (int w : word) prod = prod * (w == 0 ? X : P);
    sum += prod;
    ++count;
  } while (std::next_permutation(word.begin(), word.end()));
  return sum.topLeftCorner(dim, dim) / count;
}

}  // namespace

void add_cubic_terms(Hamiltonian& H, const HilbertLayout& layout, const ReducedHamiltonian& poly,
                     const std::vector<int>& mode_map, const std::vector<double>& frequencies, double eps0,
                     bool rwa, double rwa_cut) {
  const int K = poly.num_modes;
  if (static_cast<int>(mode_map.size()) != K || static_cast<int>(frequencies.size()) != K)
    throw InvalidInput("add_cubic_terms: one layout index and frequency per reduced mode");
  for (int idx : mode_map)
    if (idx < 0 || idx >= static_cast<int>(layout.dims.size())) throw InvalidInput("add_cubic_terms: bad mode index");
  if (eps0 == 0.0) return;
  for (const auto& term : poly.terms) {
    int degree = 0;
    for (int e : term.powers) degree += e;
    if (degree != 3 || term.coeff == 0.0) continue;  // the harmonic part is the interaction picture
    struct Factor {
      int mode;
      std::vector<std::pair<int, Eigen::MatrixXcd>> parts;  // (level shift, matrix)
    };
    std::vector<Factor> factors;
    for (int k = 0; k < K; ++k) {
      const int q = term.powers[k], p = term.powers[K + k];
      if (q + p == 0) continue;
      const int dim = layout.dims[mode_map[k]];
      const Eigen::MatrixXcd L = symmetric_word(q, p, dim);
      Factor f{k, {}};
      for (int d = -(q + p); d <= q + p; ++d) {
        Eigen::MatrixXcd part = Eigen::MatrixXcd::Zero(dim, dim);
        bool any = false;
        for (int c = 0; c < dim; ++c) {
          const int r = c + d;
          if (r < 0 || r >= dim || std::abs(L(r, c)) < 1e-15) continue;
          part(r, c) = L(r, c);
          any = true;
        }
        if (any) f.parts.emplace_back(d, std::move(part));
      }
      factors.push_back(std::move(f));
    }
    // Cartesian product over the level-shift components of each factor.
    std::vector<std::size_t> pick(factors.size(), 0);
    while (true) {
      double freq = 0.0;
      for (std::size_t i = 0; i < factors.size(); ++i) freq += factors[i].parts[pick[i]].first * frequencies[factors[i].mode];
      if (!rwa || std::abs(freq) <= rwa_cut) {
        SparseOp op = identity_op(layout);
        for (std::size_t i = 0; i < factors.size(); ++i)
          op = op * mode_op(layout, mode_map[factors[i].mode], factors[i].parts[pick[i]].second);
        H.add(std::move(op), phase_coeff(term.coeff * eps0, freq), "cubic");
      }
      std::size_t i = 0;
      while (i < factors.size() && ++pick[i] == factors[i].parts.size()) pick[i++] = 0;
      if (i == factors.size()) break;
    }
  }
}

std::vector<EnsembleMember> thermal_members(const FockConfig& cfg) {
  validate(cfg);
  const int M = static_cast<int>(cfg.modes.size());
  std::vector<std::vector<double>> dist(M);
  for (int k = 0; k < M; ++k) {
    const auto& md = cfg.modes[k];
    if (md.nbar <= 0) {
      dist[k] = {1.0};
      continue;
    }
    const double r = md.nbar / (md.nbar + 1);
    // Tail beyond n_max is r^(n_max + 1).
    const int n_max = std::max(0, static_cast<int>(std::ceil(std::log(cfg.weight_cutoff) / std::log(r))) - 1);
    const int need = cfg.adaptive_margin >= 0 ? n_max + cfg.adaptive_margin : n_max + 1;
    const int limit = cfg.adaptive_margin >= 0 ? cfg.max_cutoff : md.cutoff;
    if (need > limit)
      throw ConfigError("thermal weight budget for mode " + md.name + " needs " + std::to_string(need) +
                        " levels, limit is " + std::to_string(limit));
    for (int n = 0; n <= n_max; ++n) dist[k].push_back(std::pow(r, n) / (md.nbar + 1));
  }
  std::vector<EnsembleMember> out{{std::vector<int>(M, 0), 1.0}};
  for (int k = 0; k < M; ++k) {
    if (dist[k].size() == 1 && cfg.modes[k].nbar <= 0) continue;
    std::vector<EnsembleMember> next;
    for (const auto& e : out)
      for (std::size_t n = 0; n < dist[k].size(); ++n) {
        EnsembleMember x = e;
        x.levels[k] = static_cast<int>(n);
        x.weight *= dist[k][n];
        next.push_back(std::move(x));
      }
    out = std::move(next);
  }
  return out;
}

namespace {

// Motional operators reused across the output times of one member.
class MomentEvaluator {
 public:
  MomentEvaluator(const HilbertLayout& h, const ObservableSpec& obs) : h_(h), obs_(obs) {
    motion_.dims = h.dims;
    motion_.spin_dim = 1;
    if (h.spin_dim == 4 && obs.bus >= 0) {
      x_ = mode_op(motion_, obs.bus, quadrature_x(h.dims[obs.bus]));
      p_ = mode_op(motion_, obs.bus, quadrature_p(h.dims[obs.bus]));
    }
    if (h.spin_dim == 4 && obs.spectator_b >= 0 && obs.spectator_c >= 0)
      cb_ = lower_op(motion_, obs.spectator_c) * lower_op(motion_, obs.spectator_b);
    levels_.resize(h.dims.size());
    const long D = motion_.total();
    for (std::size_t k = 0; k < h.dims.size(); ++k) {
      levels_[k].resize(D);
      for (long i = 0; i < D; ++i) levels_[k][i] = motion_.level(i, static_cast<int>(k));
    }
    branches_[0] = y_basis_state(0, 0);
    branches_[1] = y_basis_state(1, 1);
  }

  StateMoments pure(const Eigen::VectorXcd& psi) const {
    StateMoments s;
    const long D = motion_.total();
    const int S = h_.spin_dim;
    Eigen::Map<const Eigen::MatrixXcd> M(psi.data(), D, S);
    Eigen::VectorXd prob = Eigen::VectorXd::Zero(D);
    for (int q = 0; q < S; ++q) prob += M.col(q).cwiseAbs2();
    s.number.resize(h_.dims.size());
    for (std::size_t k = 0; k < h_.dims.size(); ++k) s.number[k] = prob.dot(levels_[k]);
    if (S != 4) return s;
    s.spin_rho = M.transpose() * M.conjugate();
    for (int b = 0; b < 2; ++b) {
      const Eigen::VectorXcd phi = M * branches_[b].conjugate();
      s.pop[b] = phi.squaredNorm();
      if (x_.size()) {
        s.x[b] = phi.dot(x_ * phi).real();
        s.p[b] = phi.dot(p_ * phi).real();
      }
      if (b == 1 && cb_.size()) s.cb11 = phi.dot(cb_ * phi);
    }
    return s;
  }

  StateMoments density(const Eigen::MatrixXcd& rho) const {
    StateMoments s;
    const long D = motion_.total();
    const int S = h_.spin_dim;
    auto block = [&](int r, int c) { return rho.block(r * D, c * D, D, D); };
    s.number.assign(h_.dims.size(), 0.0);
    for (int q = 0; q < S; ++q) {
      const Eigen::VectorXd diag = block(q, q).diagonal().real();
      for (std::size_t k = 0; k < h_.dims.size(); ++k) s.number[k] += diag.dot(levels_[k]);
    }
    if (S != 4) return s;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) s.spin_rho(r, c) = block(r, c).trace();
    for (int b = 0; b < 2; ++b) {
      const Eigen::Vector4cd& y = branches_[b];
      cd pop = 0, xs = 0, ps = 0, cb = 0;
      for (int q = 0; q < 4; ++q)
        for (int qq = 0; qq < 4; ++qq) {
          const cd a = y[q] * std::conj(y[qq]);
          if (a == cd(0)) continue;
          const Eigen::MatrixXcd blk = block(qq, q);
          pop += a * blk.trace();
          if (x_.size()) {
            xs += a * (x_ * blk).trace();
            ps += a * (p_ * blk).trace();
          }
          if (b == 1 && cb_.size()) cb += a * (cb_ * blk).trace();
        }
      s.pop[b] = pop.real();
      s.x[b] = xs.real();
      s.p[b] = ps.real();
      if (b == 1) s.cb11 = cb;
    }
    return s;
  }

 private:
  HilbertLayout h_, motion_;
  ObservableSpec obs_;
  SparseOp x_, p_, cb_;
  std::vector<Eigen::VectorXd> levels_;
  std::array<Eigen::Vector4cd, 2> branches_;
};

}  // namespace

StateMoments state_moments(const HilbertLayout& h, const Eigen::VectorXcd& psi, const ObservableSpec& obs) {
  if (psi.size() != h.total()) throw InvalidInput("state_moments: size mismatch");
  return MomentEvaluator(h, obs).pure(psi);
}

StateMoments density_moments(const HilbertLayout& h, const Eigen::MatrixXcd& rho, const ObservableSpec& obs) {
  if (rho.rows() != h.total()) throw InvalidInput("density_moments: size mismatch");
  return MomentEvaluator(h, obs).density(rho);
}

Eigen::Matrix4cd reduced_spin(const HilbertLayout& h, const Eigen::VectorXcd& psi) {
  if (h.spin_dim != 4) throw InvalidInput("reduced_spin needs two qubits");
  Eigen::Map<const Eigen::MatrixXcd> M(psi.data(), h.motional(), 4);
  return M.transpose() * M.conjugate();
}

double bell_fidelity(const Eigen::Matrix4cd& rho, double phase) {
  const Eigen::Vector4cd t = bell_target(phase);
  double f = t.dot(rho * t).real();
  if (f < 0 && f > -1e-12) f = 0;
  if (f > 1 && f < 1 + 1e-12) f = 1;
  return f;
}

double spin_entropy(const Eigen::Matrix4cd& rho) {
  const Eigen::Matrix4cd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(herm, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double l = es.eigenvalues()[i];
    if (l > 1e-15) s -= l * std::log2(l);
  }
  return s;
}

EnsembleResult thermal_ensemble_run(const FockConfig& cfg, const HamiltonianBuilder& build,
                                    const std::vector<double>& times, const ObservableSpec& obs,
                                    const EvolveOptions& opt) {
  const auto members = thermal_members(cfg);
  double wsum = 0.0;
  for (const auto& m : members) wsum += m.weight;
  const int nm = static_cast<int>(members.size());
  const std::size_t nt = times.size();
  std::vector<std::vector<StateMoments>> moments(nm);
  std::vector<EvolveStats> stats(nm);
  parallel_for(nm, [&](int i) {
    const HilbertLayout h = layout_for(cfg, members[i].levels);
    const Hamiltonian H = build(h);
    const Eigen::VectorXcd psi0 = fock_state(h, 0, members[i].levels);
    const auto states = evolve(psi0, H, times, opt, &stats[i]);
    const MomentEvaluator ev(h, obs);
    moments[i].reserve(nt);
    for (const auto& s : states) moments[i].push_back(ev.pure(s));
  });

  EnsembleResult r;
  r.times = times;
  r.members = nm;
  r.weight_kept = wsum;
  const int M = static_cast<int>(cfg.modes.size());
  r.mode_number = Eigen::MatrixXd::Zero(nt, M);
  r.fidelity.resize(nt);
  r.entropy.resize(nt);
  r.backaction.resize(nt);
  r.spin_rho.resize(nt);
  for (int b = 0; b < 2; ++b) {
    r.cond_x[b].resize(nt);
    r.cond_p[b].resize(nt);
    r.branch_population[b].resize(nt);
  }
  for (const auto& s : stats) {
    r.max_norm_error = std::max(r.max_norm_error, s.max_norm_error);
    r.max_subspace = std::max(r.max_subspace, s.subspace_dim);
  }
  for (std::size_t t = 0; t < nt; ++t) {
    StateMoments acc;
    acc.number.assign(M, 0.0);
    for (int i = 0; i < nm; ++i) {
      const double w = members[i].weight / wsum;
      const StateMoments& s = moments[i][t];
      acc.spin_rho += w * s.spin_rho;
      for (int k = 0; k < M; ++k) acc.number[k] += w * s.number[k];
      for (int b = 0; b < 2; ++b) {
        acc.pop[b] += w * s.pop[b];
        acc.x[b] += w * s.x[b];
        acc.p[b] += w * s.p[b];
      }
      acc.cb11 += w * s.cb11;
    }
    for (int k = 0; k < M; ++k) r.mode_number(t, k) = acc.number[k];
    r.spin_rho[t] = acc.spin_rho;
    if (cfg.qubits) {
      r.fidelity[t] = bell_fidelity(acc.spin_rho, obs.bell_phase);
      r.entropy[t] = spin_entropy(acc.spin_rho);
    }
    for (int b = 0; b < 2; ++b) {
      r.branch_population[b][t] = acc.pop[b];
      const bool ok = acc.pop[b] >= 1e-12;
      r.cond_x[b][t] = ok ? acc.x[b] / acc.pop[b] : std::nan("");
      r.cond_p[b][t] = ok ? acc.p[b] / acc.pop[b] : std::nan("");
    }
    r.backaction[t] = acc.pop[1] >= 1e-12 ? obs.backaction_scale * std::abs(acc.cb11 / acc.pop[1]) : std::nan("");
  }
  return r;
}

double ThreeModeModel::g() const { return M_PI / t_tl; }

FockConfig three_mode_fock(const ThreeModeModel& m, double weight_cutoff, bool adaptive) {
  FockConfig cfg;
  cfg.modes = {{"a", m.wa, m.cut_a, 0.0}, {"b", m.wb, m.cut_b, 0.0}, {"c", m.wc, m.cut_c, m.nbar_c}};
  cfg.qubits = true;
  cfg.weight_cutoff = weight_cutoff;
  cfg.adaptive_margin = adaptive ? m.margin_c : -1;
  return cfg;
}

HamiltonianBuilder three_mode_builder(const ThreeModeModel& m, const GateConfig& gate) {
  if (!(m.t_tl > 0)) throw InvalidInput("three-mode model needs a positive two-level period");
  return [m, gate](const HilbertLayout& h) {
    Hamiltonian H = build_ms_hamiltonian(h, gate);
    add_triad_terms(H, h, {{2, 1, 0, cd(m.g(), 0), m.detuning()}});
    return H;
  };
}

namespace {

std::vector<double> uniform_grid(double t_end, int samples) {
  if (samples < 1) throw InvalidInput("need at least one output sample");
  std::vector<double> t(samples + 1);
  for (int i = 0; i <= samples; ++i) t[i] = t_end * i / samples;
  t.back() = t_end;
  return t;
}

}  // namespace

EnsembleResult run_three_mode_gate(const ThreeModeModel& m, const GateConfig& gate_in, int samples,
                                   double weight_cutoff, bool adaptive, const EvolveOptions& opt) {
  GateConfig gate = gate_in;
  gate.bus = 0;
  const FockConfig cfg = three_mode_fock(m, weight_cutoff, adaptive);
  validate(gate, cfg);
  ObservableSpec obs;
  obs.bus = 0;
  obs.spectator_b = 1;
  obs.spectator_c = 2;
  obs.backaction_scale = m.g() / (gate.eta * gate.omega_r() * std::sqrt(2.0));
  obs.bell_phase = gate.bell_phase;
  return thermal_ensemble_run(cfg, three_mode_builder(m, gate), uniform_grid(gate.t_gate, samples), obs, opt);
}

EnsembleResult run_two_ion_gate(const TwoIonGateModel& m, const GateConfig& gate_in, int samples,
                                const EvolveOptions& opt) {
  GateConfig gate = gate_in;
  gate.bus = 0;
  FockConfig cfg;
  cfg.modes = {{"breathing", m.w_breathing, m.cut_breathing, 0.0}, {"tilt", m.w_tilt, m.cut_tilt, m.nbar_tilt}};
  cfg.qubits = true;
  cfg.weight_cutoff = m.weight_cutoff;
  validate(gate, cfg);
  if (!m.rwa && m.poly.num_modes != 2) throw InvalidInput("two-ion non-RWA model needs a two-mode polynomial");
  auto build = [m, gate](const HilbertLayout& h) {
    Hamiltonian H = build_ms_hamiltonian(h, gate);
    if (m.rwa) {
      add_triad_terms(H, h, {{1, 1, 0, m.eps0 * m.c_rwa, m.w_breathing - 2 * m.w_tilt}});
    } else {
      add_cubic_terms(H, h, m.poly, {1, 0}, {m.w_tilt, m.w_breathing}, m.eps0, false);
    }
    return H;
  };
  ObservableSpec obs;
  obs.bus = 0;
  obs.bell_phase = gate.bell_phase;
  return thermal_ensemble_run(cfg, build, uniform_grid(gate.t_gate, samples), obs, opt);
}

GateSummary summarize(const EnsembleResult& r, int spectator_mode, double spectator_frequency) {
  GateSummary s;
  if (r.times.empty()) return s;
  s.fidelity = r.fidelity.back();
  s.entropy = r.entropy.back();
  if (spectator_mode >= 0) s.spectator_energy = spectator_frequency * r.mode_number(r.mode_number.rows() - 1, spectator_mode);
  return s;
}

}  // namespace nomocou
