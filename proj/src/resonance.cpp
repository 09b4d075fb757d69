#include "nomocou/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "nomocou/errors.hpp"
#include "nomocou/parallel.hpp"
#include "nomocou/rng.hpp"

namespace nomocou {

using cd = std::complex<double>;

std::string_view triad_kind_name(TriadKind k) { return k == TriadKind::TwoMode ? "two-mode" : "three-mode"; }

std::string_view triad_class_name(TriadClass c) {
  switch (c) {
    case TriadClass::RadialRadial: return "radial-radial";
    case TriadClass::RadialAxial: return "radial-axial";
    case TriadClass::AxialAxial: return "axial-axial";
  }
  return "radial-radial";
}

TriadClass ResonanceTriad::triad_class() const {
  const int axial = int(is_axial(branch_n)) + int(is_axial(branch_m)) + int(is_axial(branch_p));
  if (axial == 0) return TriadClass::RadialRadial;
  if (axial == 3) return TriadClass::AxialAxial;
  return TriadClass::RadialAxial;
}

std::complex<double> rwa_coefficient(const QuadratureBlock& block, bool two_mode) {
  // Ladder weights: a from Q is 1, from P is -i; a^dagger from Q is 1, from P is +i.
  const cd lower[2] = {cd(1, 0), cd(0, -1)};
  const cd upper[2] = {cd(1, 0), cd(0, 1)};
  cd s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) s += block.v[x][y][z] * lower[x] * lower[y] * upper[z];
  const double weight = two_mode ? 0.5 : 1.0;  // distinct orderings / 6
  return weight * s / (2.0 * std::sqrt(2.0));
}

namespace {

ResonanceTriad make_triad(int n, int m, int p, const ModeSpectrum& spec, const QuadratureBlock& b) {
  ResonanceTriad t;
  t.n = n;
  t.m = m;
  t.p = p;
  t.kind = n == m ? TriadKind::TwoMode : TriadKind::ThreeMode;
  t.delta = spec.frequencies[p] - spec.frequencies[n] - spec.frequencies[m];
  t.tensor_norm = b.norm();
  t.c_rwa = rwa_coefficient(b, n == m);
  if (!spec.branches.empty()) {
    t.branch_n = spec.branches[n];
    t.branch_m = spec.branches[m];
    t.branch_p = spec.branches[p];
  }
  return t;
}

// Pairs n <= m < p with |w_p - w_n - w_m| <= cut; frequencies ascending.
std::vector<std::pair<int, int>> candidate_pairs(const Eigen::VectorXd& w, int p, double cut) {
  std::vector<std::pair<int, int>> out;
  const double* begin = w.data();
  for (int n = 0; n < p; ++n) {
    const double target = w[p] - w[n];
    if (target < w[n] - cut) break;
    const int lo = static_cast<int>(std::lower_bound(begin + n, begin + p, target - cut) - begin);
    for (int m = lo; m < p && w[m] <= target + cut; ++m) out.emplace_back(n, m);
  }
  return out;
}

bool triad_order(const ResonanceTriad& a, const ResonanceTriad& b) {
  if (a.s_tl != b.s_tl) return a.s_tl > b.s_tl;
  if (a.n != b.n) return a.n < b.n;
  if (a.m != b.m) return a.m < b.m;
  return a.p < b.p;
}

void check_sorted(const Eigen::VectorXd& w) {
  for (int i = 1; i < w.size(); ++i)
    if (w[i] < w[i - 1]) throw InvalidInput("mode frequencies must be ascending");
}

}  // namespace

std::vector<ResonanceTriad> rwa_coefficients(const CubicModeTensor& tensor, const ModeSpectrum& spec, double delta_cut) {
  const int M = spec.num_modes();
  if (tensor.num_modes != M) throw InvalidInput("rwa_coefficients: tensor and spectrum sizes differ");
  check_sorted(spec.frequencies);
  std::vector<ResonanceTriad> out;
  for (int p = 0; p < M; ++p) {
    for (auto [n, m] : candidate_pairs(spec.frequencies, p, delta_cut)) {
      QuadratureBlock b;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int z = 0; z < 2; ++z)
            b.v[x][y][z] = tensor.element(n, Quadrature(x), m, Quadrature(y), p, Quadrature(z));
      out.push_back(make_triad(n, m, p, spec, b));
    }
  }
  return out;
}

ResonanceTriad tl_reduce(ResonanceTriad t, double eps0, double omega0) {
  const double mag = std::abs(t.c_rwa);
  t.c_tl = (t.kind == TriadKind::TwoMode ? std::sqrt(2.0) : 1.0) * eps0 * mag;
  t.omega_tl = std::hypot(t.c_tl, 0.5 * t.delta);
  t.s_tl = t.omega_tl > 0 ? std::pow(t.c_tl / t.omega_tl, 2) : 0.0;
  t.t_tl = t.omega_tl > 0 ? constants::pi / t.omega_tl : std::numeric_limits<double>::infinity();
  t.t_tl_seconds = omega0 > 0 ? t.t_tl / omega0 : 0.0;
  return t;
}

double tl_population(double c_tl, double delta, double t) {
  const double omega = std::hypot(c_tl, 0.5 * delta);
  if (omega == 0.0) return 0.0;
  const double s = std::pow(c_tl / omega, 2);
  return s * std::pow(std::sin(omega * t), 2);
}

std::vector<ResonanceTriad> scan_triads(const ModeSpectrum& spec, const CartesianTressian& cart, double eps0,
                                        const ScanThresholds& th, double omega0) {
  if (th.delta_cut < 0 || th.tensor_min < 0 || th.s_min < 0) throw InvalidInput("scan thresholds must be non-negative");
  const int M = spec.num_modes();
  check_sorted(spec.frequencies);
  std::vector<std::vector<ResonanceTriad>> per_p(M);
  parallel_for(M, [&](int p) {
    const auto pairs = candidate_pairs(spec.frequencies, p, th.delta_cut);
    if (pairs.empty()) return;
    TriadContractor tc(cart, spec);
    tc.select(p);
    for (auto [n, m] : pairs) {
      const QuadratureBlock b = tc.block(n, m);
      if (!(b.norm() > th.tensor_min)) continue;
      ResonanceTriad t = tl_reduce(make_triad(n, m, p, spec, b), eps0, omega0);
      if (t.s_tl >= th.s_min) per_p[p].push_back(t);
    }
  });
  std::vector<ResonanceTriad> out;
  for (auto& v : per_p) out.insert(out.end(), v.begin(), v.end());
  std::sort(out.begin(), out.end(), triad_order);
  return out;
}

CountEstimate expected_resonance_count(int num_ions, double window, int trials, std::uint64_t seed) {
  if (num_ions < 1 || trials < 1 || window < 0) throw InvalidInput("expected_resonance_count: invalid arguments");
  const int M = 3 * num_ions;
  std::vector<double> counts(trials);
  parallel_for(trials, [&](int trial) {
    CounterRng rng(seed, static_cast<std::uint64_t>(trial));
    std::vector<double> w(M);
    for (auto& x : w) x = rng.uniform();
    std::sort(w.begin(), w.end());
    long count = 0;
    for (int p = 2; p < M; ++p) {
      for (int n = 0; n < p; ++n) {
        const double target = w[p] - w[n];
        if (target < w[n]) break;
        auto lo = std::lower_bound(w.begin() + n + 1, w.begin() + p, target - window);
        auto hi = std::upper_bound(w.begin() + n + 1, w.begin() + p, target + window);
        if (hi > lo) count += hi - lo;
      }
    }
    counts[trial] = static_cast<double>(count);
  });
  CountEstimate est;
  est.trials = trials;
  est.mean = std::accumulate(counts.begin(), counts.end(), 0.0) / trials;
  double var = 0.0;
  for (double c : counts) var += (c - est.mean) * (c - est.mean);
  var = trials > 1 ? var / (trials - 1) : 0.0;
  est.stderr_ = std::sqrt(var / trials);
  return est;
}

void write_triads_csv(std::ostream& out, const std::vector<ResonanceTriad>& triads) {
  out << "n,m,p,kind,branch_n,branch_m,branch_p,delta_units_omega0,C_RWA_re,C_RWA_im,S_TL,T_TL_seconds\n";
  out.precision(12);
  for (const auto& t : triads) {
    out << t.n << ',' << t.m << ',' << t.p << ',' << triad_kind_name(t.kind) << ',' << branch_name(t.branch_n) << ','
        << branch_name(t.branch_m) << ',' << branch_name(t.branch_p) << ',' << t.delta << ',' << t.c_rwa.real() << ','
        << t.c_rwa.imag() << ',' << t.s_tl << ',' << t.t_tl_seconds << "\n";
  }
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw InvalidInput("fit_line: need at least two matching points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  if (!(sxx > 0)) throw InvalidInput("fit_line: abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      ss += r * r;
    }
    f.slope_stderr = std::sqrt(ss / (n - 2) / sxx);
  }
  return f;
}

}  // namespace nomocou
