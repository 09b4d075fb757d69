#include "nomocou/runner.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "nomocou/chain_design.hpp"
#include "nomocou/correspondence.hpp"
#include "nomocou/dynamics.hpp"
#include "nomocou/errors.hpp"
#include "nomocou/gate.hpp"
#include "nomocou/parallel.hpp"
#include "nomocou/resonance.hpp"

namespace nomocou {

using nlohmann::json;

namespace {

Equilibrium equilibrium_of(const Config& c) {
  const TrapConfig trap = trap_from_config(c);
  return find_equilibrium(trap, get_int(c, "num_ions"), static_cast<std::uint64_t>(get_int(c, "seed")));
}

json triad_summary(const std::vector<ResonanceTriad>& triads) {
  std::map<std::string, int> by_class;
  double min_axial = std::numeric_limits<double>::infinity();
  for (const auto& t : triads) {
    ++by_class[std::string(triad_class_name(t.triad_class()))];
    if (is_axial(t.branch_n) || is_axial(t.branch_m) || is_axial(t.branch_p))
      min_axial = std::min(min_axial, t.t_tl_seconds);
  }
  json j;
  j["triads"] = triads.size();
  j["by_class"] = by_class;
  j["min_axial_t_tl_s"] = std::isfinite(min_axial) ? json(min_axial) : json(nullptr);
  return j;
}

void cmd_modes(const Config& c, ArtifactWriter& out) {
  const Equilibrium eq = equilibrium_of(c);
  const ModeSpectrum spec = normal_modes(eq);
  {
    auto f = out.open("positions.csv");
    write_positions_csv(f, eq);
  }
  auto f = out.open("spectrum.csv");
  write_spectrum_csv(f, spec, eq.scales);
  out.write_json("summary.json", {{"num_ions", eq.num_ions},
                                  {"omega0_rad_per_s", eq.scales.omega0},
                                  {"l0_m", eq.scales.l0},
                                  {"eps0", eq.scales.eps0},
                                  {"structure_mismatch", eq.structure_mismatch},
                                  {"residual_gradient_norm", eq.residual_gradient_norm},
                                  {"diag_residual", spec.diag_residual},
                                  {"symplectic_residual", spec.symplectic_residual}});
}

void cmd_tressian(const Config& c, ArtifactWriter& out) {
  const Equilibrium eq = equilibrium_of(c);
  const ModeSpectrum spec = normal_modes(eq);
  const CartesianTressian cart = full_tressian(eq);
  {
    auto f = out.open("tressian_cartesian.csv");
    write_cartesian_csv(f, cart, eq.num_ions);
  }
  // The mode-basis tensor is dense in general; keep it to small crystals.
  if (spec.num_modes() <= 30) {
    auto f = out.open("tressian_modes.csv");
    write_tensor_csv(f, to_mode_basis(cart, spec), "mode-basis cubic tensor, indices 0..M-1 are Q, M..2M-1 are P");
  }
  auto f = out.open("spectrum.csv");
  write_spectrum_csv(f, spec, eq.scales);
}

ScanThresholds thresholds_of(const Config& c) {
  return {get_number(c, "scan.delta_cut"), get_number(c, "scan.tensor_min"), get_number(c, "scan.s_min")};
}

void cmd_scan_triads(const Config& c, ArtifactWriter& out) {
  const ScanThresholds th = thresholds_of(c);
  const std::vector<double> betas = get_axis(c, "beta_scan.beta");
  if (betas.empty()) {
    const Equilibrium eq = equilibrium_of(c);
    const ModeSpectrum spec = normal_modes(eq);
    const auto triads = scan_triads(spec, full_tressian(eq), eq.scales.eps0, th, eq.scales.omega0);
    {
      auto f = out.open("spectrum.csv");
      write_spectrum_csv(f, spec, eq.scales);
    }
    {
      auto f = out.open("triads.csv");
      write_triads_csv(f, triads);
    }
    json s = triad_summary(triads);
    s["structure_mismatch"] = eq.structure_mismatch;
    out.write_json("summary.json", s);
    return;
  }
  // Axial confinement scan at fixed radial frequencies: wz = wy / beta.
  const TrapConfig base = trap_from_config(c);
  const auto* rf = std::get_if<RfHarmonic>(&base.variant);
  if (!rf) throw ConfigError("beta_scan: needs trap.kind = rf");
  const int n = static_cast<int>(betas.size());
  std::vector<std::vector<ResonanceTriad>> found(n);
  std::vector<Equilibrium> eqs(n);
  parallel_for(n, [&](int i) {
    TrapConfig t = base;
    t.variant = RfHarmonic{rf->wx, rf->wy, rf->wy / betas[i]};
    eqs[i] = find_equilibrium(t, get_int(c, "num_ions"), static_cast<std::uint64_t>(get_int(c, "seed")));
    const ModeSpectrum spec = normal_modes(eqs[i]);
    found[i] = scan_triads(spec, full_tressian(eqs[i]), eqs[i].scales.eps0, th, eqs[i].scales.omega0);
  });
  auto f = out.open("beta_scan.csv");
  f << "beta,wz_hz,triads,radial_radial,radial_axial,axial_axial,min_t_tl_s,structure_mismatch\n";
  auto g = out.open("triads.csv");
  bool header = true;
  for (int i = 0; i < n; ++i) {
    int cls[3] = {0, 0, 0};
    double min_t = std::numeric_limits<double>::infinity();
    for (const auto& t : found[i]) {
      ++cls[static_cast<int>(t.triad_class())];
      min_t = std::min(min_t, t.t_tl_seconds);
    }
    f << fmt(betas[i]) << ',' << fmt(rf->wy / betas[i] / (2 * M_PI)) << ',' << found[i].size() << ',' << cls[0] << ','
      << cls[1] << ',' << cls[2] << ',' << fmt(found[i].empty() ? NAN : min_t) << ','
      << (eqs[i].structure_mismatch ? 1 : 0) << '\n';
    std::ostringstream s;
    write_triads_csv(s, found[i]);
    std::istringstream lines(s.str());
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
      if (first) {
        if (header) g << "beta," << line << '\n';
        header = false;
        first = false;
        continue;
      }
      g << fmt(betas[i]) << ',' << line << '\n';
    }
  }
}

struct ThermalStart {
  Equilibrium eq;
  ModeSpectrum spec;
  PhaseSpaceState state;
  double kT = 0.0;  // units of E0
};

ThermalStart thermal_start(const Config& c) {
  ThermalStart s;
  s.eq = equilibrium_of(c);
  s.spec = normal_modes(s.eq);
  const double kelvin = get_number(c, "md.temperature_uK") * 1e-6;
  ModeAmplitudes amps = thermal_amplitudes(s.spec, s.eq.scales, kelvin, static_cast<std::uint64_t>(get_int(c, "seed")));
  const std::vector<double> excite = get_axis(c, "md.excite_modes");
  if (!excite.empty()) {
    Eigen::VectorXd keep = Eigen::VectorXd::Zero(amps.energies.size());
    for (double m : excite) {
      const int k = static_cast<int>(m);
      if (k < 0 || k >= amps.energies.size()) throw ConfigError("md.excite_modes: mode index out of range");
      keep[k] = amps.energies[k];
    }
    amps.energies = keep;
  }
  s.state = init_modes(s.spec, s.eq, amps);
  s.kT = constants::k_B * kelvin / s.eq.scales.E0;
  return s;
}

MdOptions md_options(const Config& c, const ScaleSet& sc) {
  MdOptions o;
  o.dt = get_number(c, "md.dt_ns") * 1e-9 * sc.omega0;
  const double t_end = get_number(c, "md.duration_us") * 1e-6 * sc.omega0;
  if (!(o.dt > 0) || !(t_end > 0)) throw ConfigError("md: dt_ns and duration_us must be positive");
  o.steps = static_cast<long>(std::llround(t_end / o.dt));
  o.stride = get_int(c, "md.stride");
  o.keep_states = false;
  return o;
}

void cmd_md(const Config& c, ArtifactWriter& out) {
  const ThermalStart s = thermal_start(c);
  const MdOptions o = md_options(c, s.eq.scales);
  const Trajectory tr = integrate_md(s.state, s.eq, o, &s.spec);
  {
    auto f = out.open("mode_energy_summary.csv");
    write_mode_energy_summary(f, s.spec, mode_energy_stats(tr.mode_energy), s.eq.scales);
  }
  if (get_bool(c, "md.write_series")) {
    auto f = out.open("mode_energy.csv");
    const double to_uK = s.eq.scales.E0 / constants::k_B * 1e6;
    f << "time_us";
    for (int n = 0; n < tr.mode_energy.cols(); ++n) f << ",E" << n << "_uK";
    f << '\n';
    for (Eigen::Index i = 0; i < tr.mode_energy.rows(); ++i) {
      f << fmt(tr.times[i] / s.eq.scales.omega0 * 1e6);
      for (int n = 0; n < tr.mode_energy.cols(); ++n) f << ',' << fmt(tr.mode_energy(i, n) * to_uK);
      f << '\n';
    }
  }
  const double e0 = tr.total_energy.front();
  double drift = 0.0;
  for (double e : tr.total_energy) drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
  out.write_json("summary.json", {{"steps", o.steps}, {"samples", tr.times.size()}, {"max_relative_energy_drift", drift}});
}

std::vector<double> column(const std::vector<Eigen::VectorXd>& states, const ModeSpectrum& spec,
                           const std::vector<int>& modes, int k) {
  const int K = static_cast<int>(modes.size());
  std::vector<double> v;
  for (const auto& z : states) v.push_back(0.5 * spec.frequencies[modes[k]] * (z[k] * z[k] + z[K + k] * z[K + k]));
  return v;
}

void cmd_crm(const Config& c, ArtifactWriter& out) {
  const ThermalStart s = thermal_start(c);
  std::vector<int> modes;
  for (double m : get_axis(c, "crm.modes")) {
    const int k = static_cast<int>(m);
    if (k < 0 || k >= s.spec.num_modes()) throw ConfigError("crm.modes: mode index out of range");
    modes.push_back(k);
  }
  if (modes.empty()) throw ConfigError("crm.modes: need at least one mode");
  const CubicModeTensor tensor = to_mode_basis(full_tressian(s.eq), s.spec);
  const ReducedHamiltonian h = reduce_hamiltonian(s.spec, tensor, modes);
  const int M = s.spec.num_modes(), K = static_cast<int>(modes.size());
  Eigen::VectorXd X(2 * M);
  X << s.state.positions - s.eq.positions, s.state.velocities;
  const Eigen::VectorXd Z = s.spec.A * X;
  Eigen::VectorXd z0(2 * K);
  for (int k = 0; k < K; ++k) z0[k] = Z[modes[k]], z0[K + k] = Z[M + modes[k]];

  const MdOptions md = md_options(c, s.eq.scales);
  const double sample_dt = md.dt * md.stride;
  CrmOptions co;
  co.order = get_int(c, "crm.order");
  const double crm_dt = get_number(c, "crm.dt_ns") * 1e-9 * s.eq.scales.omega0;
  co.stride = std::max(1, static_cast<int>(std::llround(sample_dt / crm_dt)));
  co.dt = sample_dt / co.stride;
  co.steps = md.steps / md.stride * co.stride;
  const ReducedTrajectory cr = integrate_crm(h, z0, co);

  std::vector<std::vector<double>> crm_e(K), md_e(K);
  for (int k = 0; k < K; ++k) crm_e[k] = column(cr.states, s.spec, modes, k);
  std::vector<double> times = cr.times;
  const bool compare = get_bool(c, "crm.compare_md");
  if (compare) {
    const Trajectory tr = integrate_md(s.state, s.eq, md, &s.spec);
    for (int k = 0; k < K; ++k)
      for (Eigen::Index i = 0; i < tr.mode_energy.rows(); ++i) md_e[k].push_back(tr.mode_energy(i, modes[k]));
  }
  const double to_kT = s.kT > 0 ? 1.0 / s.kT : 1.0;
  auto f = out.open("exchange.csv");
  f << "time_us";
  for (int k = 0; k < K; ++k) f << ",crm_E" << modes[k] << "_kT";
  if (compare)
    for (int k = 0; k < K; ++k) f << ",md_E" << modes[k] << "_kT";
  f << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    f << fmt(times[i] / s.eq.scales.omega0 * 1e6);
    for (int k = 0; k < K; ++k) f << ',' << fmt(crm_e[k][i] * to_kT);
    if (compare)
      for (int k = 0; k < K; ++k) f << ',' << (i < md_e[k].size() ? fmt(md_e[k][i] * to_kT) : std::string("nan"));
    f << '\n';
  }
  // First maximum of the last listed mode (the receiving mode).
  json j;
  const auto peak = [&](const std::vector<double>& e) -> json {
    const auto i = first_maximum(e);
    if (!i) return nullptr;
    return {{"time_us", times[*i] / s.eq.scales.omega0 * 1e6}, {"energy_kT", e[*i] * to_kT}};
  };
  j["crm_first_maximum"] = peak(crm_e[K - 1]);
  if (compare) j["md_first_maximum"] = peak(md_e[K - 1]);
  j["crm_relative_energy_drift"] = (cr.energy.back() - cr.energy.front()) / cr.energy.front();
  out.write_json("summary.json", j);
}

void cmd_gate_two_ion(const Config& c, ArtifactWriter& out) {
  const TrapConfig base = trap_from_config(c);
  const auto* rf = std::get_if<RfHarmonic>(&base.variant);
  if (!rf || get_int(c, "num_ions") != 2) throw ConfigError("gate two_ion: needs num_ions = 2 and trap.kind = rf");
  const std::vector<double> periods = get_axis(c, "gate.n_period"), detunings = get_axis(c, "gate.detuning_khz"),
                            nbars = get_axis(c, "gate.nbar_tilt"), loops = get_axis(c, "gate.loops");
  const int nd = static_cast<int>(detunings.size());
  std::vector<TwoIonCoupling> couplings(nd);
  parallel_for(nd, [&](int i) {
    TrapConfig t = base;
    t.variant = RfHarmonic{rf->wx, rf->wy + 2 * M_PI * 1e3 * detunings[i], rf->wz};
    couplings[i] = two_ion_coupling(t);
  });
  struct Point {
    double n_period, detuning, nbar, loops;
    int coupling;
    GateSummary s;
    double t_gate_us;
  };
  std::vector<Point> pts;
  for (double nb : nbars)
    for (double k : loops)
      for (int d = 0; d < nd; ++d)
        for (double np : periods) pts.push_back({np, detunings[d], nb, k, d, {}, 0.0});
  const bool rwa = get_bool(c, "gate.rwa");
  const int samples = get_int(c, "gate.samples");
  const double eta_cfg = get_number(c, "gate.eta"), dk = 2 * 2 * M_PI / (get_number(c, "gate.wavelength_nm") * 1e-9);
  for (double k : loops)
    if (k < 1 || k != std::floor(k)) throw ConfigError("gate.loops: must be positive integers");
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    Point& p = pts[i];
    const TwoIonCoupling& cp = couplings[p.coupling];
    TwoIonGateModel m;
    m.w_tilt = cp.w_tilt;
    m.w_breathing = cp.w_breathing;
    m.eps0 = cp.eps0;
    m.c_rwa = cp.c_rwa;
    m.poly = cp.poly;
    m.rwa = rwa;
    m.cut_tilt = get_int(c, "gate.cut_tilt");
    m.cut_breathing = get_int(c, "gate.cut_breathing");
    m.nbar_tilt = p.nbar;
    m.weight_cutoff = get_number(c, "gate.weight_cutoff");
    GateConfig g;
    g.bus_frequency = cp.w_breathing;
    g.t_gate = p.n_period * g.t_bus();
    g.loops = static_cast<int>(p.loops);
    g.omega0 = cp.omega0;
    g.eta = eta_cfg > 0 ? eta_cfg : lamb_dicke(dk, cp.mass, cp.w_breathing * cp.omega0, 1.0 / std::sqrt(2.0));
    p.s = summarize(run_two_ion_gate(m, g, samples), 1, cp.w_tilt);
    p.t_gate_us = g.t_gate_seconds() * 1e6;
  });
  auto f = out.open("gate_scan.csv");
  f << "n_period,t_gate_us,detuning_khz,nbar_tilt,loops,fidelity,entropy,spectator_energy\n";
  for (const auto& p : pts) {
    f << fmt(p.n_period) << ',' << fmt(p.t_gate_us) << ',' << fmt(p.detuning) << ',' << fmt(p.nbar) << ','
      << fmt(p.loops) << ',' << fmt(p.s.fidelity) << ',' << fmt(p.s.entropy) << ',' << fmt(p.s.spectator_energy)
      << '\n';
  }
  const Point& last = pts.back();
  out.write_json("summary.json", {{"points", pts.size()},
                                  {"final_fidelity", last.s.fidelity},
                                  {"final_entropy", last.s.entropy},
                                  {"final_spectator_energy", last.s.spectator_energy},
                                  {"min_fidelity", std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) {
                                                     return a.s.fidelity < b.s.fidelity;
                                                   })->s.fidelity}});
}

void cmd_gate_three_mode(const Config& c, ArtifactWriter& out) {
  const std::vector<double> ttl = get_axis(c, "gate.t_tl_bus"), tg = get_axis(c, "gate.t_gate_bus"),
                            loops = get_axis(c, "gate.loops"), nbars = get_axis(c, "gate.nbar"),
                            dmot = get_axis(c, "gate.delta_mot");
  for (double k : loops)
    if (k < 1 || k != std::floor(k)) throw ConfigError("gate.loops: must be positive integers");
  const double eta = get_number(c, "gate.eta");
  if (!(eta > 0)) throw ConfigError("gate.eta: three-mode model needs an explicit Lamb-Dicke parameter");
  struct Point {
    double ttl, tg, loops, nbar, dmot;
    EnsembleResult r;
  };
  std::vector<Point> pts;
  for (double nb : nbars)
    for (double k : loops)
      for (double d : dmot)
        for (double a : ttl)
          for (double b : tg) pts.push_back({a, b, k, nb, d, {}});
  const double split = get_number(c, "gate.w_split");
  const int samples = get_int(c, "gate.samples");
  const bool adaptive = get_bool(c, "gate.adaptive");
  const double wcut = get_number(c, "gate.weight_cutoff");
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    Point& p = pts[i];
    ThreeModeModel m;
    m.wa = 1.0;
    m.wb = 1.0 - split;
    m.wc = split - p.dmot;
    m.t_tl = p.ttl * 2 * M_PI;
    m.nbar_c = p.nbar;
    m.cut_a = get_int(c, "gate.cut_a");
    m.cut_b = get_int(c, "gate.cut_b");
    m.cut_c = get_int(c, "gate.cut_c");
    m.margin_c = get_int(c, "gate.margin_c");
    GateConfig g;
    g.t_gate = p.tg * 2 * M_PI;
    g.loops = static_cast<int>(p.loops);
    g.eta = eta;
    p.r = run_three_mode_gate(m, g, samples, wcut, adaptive && p.nbar > 0);
  });
  auto f = out.open("gate_scan.csv");
  f << "t_tl_bus,t_gate_bus,loops,nbar_c,delta_mot,fidelity,entropy,n_b,n_c,max_excursion_11y,members\n";
  for (const auto& p : pts) {
    const GateSummary s = summarize(p.r, 2, 0.0);
    double exc = 0.0;
    for (std::size_t t = 0; t < p.r.times.size(); ++t)
      if (std::isfinite(p.r.cond_x[1][t])) exc = std::max(exc, std::hypot(p.r.cond_x[1][t], p.r.cond_p[1][t]));
    const Eigen::Index last = p.r.mode_number.rows() - 1;
    f << fmt(p.ttl) << ',' << fmt(p.tg) << ',' << fmt(p.loops) << ',' << fmt(p.nbar) << ',' << fmt(p.dmot) << ','
      << fmt(s.fidelity) << ',' << fmt(s.entropy) << ',' << fmt(p.r.mode_number(last, 1)) << ','
      << fmt(p.r.mode_number(last, 2)) << ',' << fmt(exc) << ',' << p.r.members << '\n';
  }
  if (get_bool(c, "gate.write_series"))
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto g = out.open("gate_series_" + std::to_string(i) + ".csv");
      write_gate_series_csv(g, pts[i].r, {"a", "b", "c"});
    }
  // Spectator energy: modes b and c, units of hbar omega0, zero point excluded.
  const Point& last = pts.back();
  const Eigen::Index t = last.r.mode_number.rows() - 1;
  const double wb = 1.0 - split, wc = split - last.dmot;
  out.write_json("summary.json", {{"points", pts.size()},
                                  {"final_fidelity", last.r.fidelity.back()},
                                  {"final_entropy", last.r.entropy.back()},
                                  {"final_spectator_energy", wb * last.r.mode_number(t, 1) + wc * last.r.mode_number(t, 2)}});
}

void cmd_gate(const Config& c, ArtifactWriter& out) {
  const std::string model = get_string(c, "gate.model");
  if (model == "two_ion") return cmd_gate_two_ion(c, out);
  if (model == "three_mode") return cmd_gate_three_mode(c, out);
  throw ConfigError("gate.model: expected two_ion or three_mode");
}

void cmd_correspondence(const Config& c, ArtifactWriter& out) {
  json rows = json::array();
  for (double e : get_axis(c, "correspondence.eps0")) {
    CorrespondenceConfig cc;
    cc.eps0 = e;
    cc.coupling = get_number(c, "correspondence.coupling");
    cc.energy = get_number(c, "correspondence.energy");
    cc.periods = get_int(c, "correspondence.periods");
    cc.samples = get_int(c, "correspondence.samples");
    cc.crm_dt = get_number(c, "correspondence.crm_dt");
    cc.cut0 = get_int(c, "correspondence.cut0");
    cc.cut1 = get_int(c, "correspondence.cut1");
    const CorrespondenceResult r = correspondence_study(cc);
    char name[64];
    std::snprintf(name, sizeof name, "correspondence_eps%.4g.csv", e);
    auto f = out.open(name);
    write_correspondence_csv(f, r);
    rows.push_back({{"eps0", e},
                    {"l2_distance", r.l2_distance},
                    {"divergence_time", std::isfinite(r.divergence_time) ? json(r.divergence_time) : json(nullptr)},
                    {"cut0", r.cut0},
                    {"cut1", r.cut1},
                    {"max_norm_error", r.max_norm_error}});
  }
  out.write_json("summary.json", {{"runs", rows}});
}

void cmd_chain_design(const Config& c, ArtifactWriter& out) {
  ChainDesignOptions o;
  o.num_ions = get_int(c, "num_ions");
  o.n_aux = get_int(c, "design.n_aux");
  o.target_spacing = get_number(c, "design.target_spacing_um") * 1e-6;
  o.species = species_by_name(get_string(c, "species"));
  o.b_min = get_number(c, "design.b_min");
  o.b_max = get_number(c, "design.b_max");
  o.grid = get_int(c, "design.grid");
  const ChainDesign d = optimize_spacing(o);
  auto f = out.open("design.json");
  write_design_json(f, d);
}

void cmd_resonance_count(const Config& c, ArtifactWriter& out) {
  const std::vector<double> ions = get_axis(c, "resonance_count.ions"), windows = get_axis(c, "resonance_count.windows");
  const int trials = get_int(c, "resonance_count.trials");
  const auto seed = static_cast<std::uint64_t>(get_int(c, "seed"));
  struct Row {
    int n;
    double w;
    CountEstimate e;
  };
  std::vector<Row> rows;
  for (double w : windows)
    for (double n : ions) rows.push_back({static_cast<int>(n), w, {}});
  parallel_for(static_cast<int>(rows.size()),
               [&](int i) { rows[i].e = expected_resonance_count(rows[i].n, rows[i].w, trials, seed + i); });
  auto f = out.open("resonance_count.csv");
  f << "num_ions,window,mean_count,stderr,trials\n";
  for (const auto& r : rows)
    f << r.n << ',' << fmt(r.w) << ',' << fmt(r.e.mean) << ',' << fmt(r.e.stderr_) << ',' << r.e.trials << '\n';
  json slopes = json::array();
  for (double w : windows) {
    std::vector<double> x, y;
    for (const auto& r : rows)
      if (r.w == w && r.e.mean > 0) x.push_back(std::log(r.n)), y.push_back(std::log(r.e.mean));
    slopes.push_back({{"window", w}, {"loglog_slope", x.size() >= 2 ? json(fit_line(x, y).slope) : json(nullptr)}});
  }
  out.write_json("summary.json", {{"slopes", slopes}});
}

}  // namespace

TwoIonCoupling two_ion_coupling(const TrapConfig& trap) {
  const Equilibrium eq = find_equilibrium(trap, 2, 1);
  const ModeSpectrum spec = normal_modes(eq);
  int tilt = -1, breathing = -1;
  // Tilt: lowest radial mode; breathing: the higher axial mode.
  for (int n = 0; n < spec.num_modes(); ++n) {
    if (!is_axial(spec.branches[n]) && tilt < 0) tilt = n;
    if (is_axial(spec.branches[n])) breathing = n;
  }
  if (tilt < 0 || breathing < 0) throw InvalidInput("two_ion_coupling: modes not identified");
  const CubicModeTensor tensor = to_mode_basis(full_tressian(eq), spec);
  TwoIonCoupling c;
  c.w_tilt = spec.frequencies[tilt];
  c.w_breathing = spec.frequencies[breathing];
  c.eps0 = eq.scales.eps0;
  c.omega0 = eq.scales.omega0;
  c.mass = trap.species.mass;
  bool found = false;
  for (const auto& t : rwa_coefficients(tensor, spec, 10.0))
    if (t.kind == TriadKind::TwoMode && t.n == tilt && t.m == tilt && t.p == breathing) c.c_rwa = t.c_rwa, found = true;
  if (!found) throw NumericalFailure("two_ion_coupling: tilt-tilt-breathing triad missing");
  c.poly = reduce_hamiltonian(spec, tensor, {tilt, breathing});
  return c;
}

void run_command(const Config& cfg, ArtifactWriter& out) {
  const std::string cmd = get_string(cfg, "command");
  if (cmd == "modes") return cmd_modes(cfg, out);
  if (cmd == "tressian") return cmd_tressian(cfg, out);
  if (cmd == "scan-triads") return cmd_scan_triads(cfg, out);
  if (cmd == "md") return cmd_md(cfg, out);
  if (cmd == "crm") return cmd_crm(cfg, out);
  if (cmd == "gate") return cmd_gate(cfg, out);
  if (cmd == "correspondence") return cmd_correspondence(cfg, out);
  if (cmd == "chain-design") return cmd_chain_design(cfg, out);
  if (cmd == "resonance-count") return cmd_resonance_count(cfg, out);
  throw ConfigError("command: unknown '" + cmd + "'");
}

}  // namespace nomocou
