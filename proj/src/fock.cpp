#include "nomocou/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

#include "nomocou/errors.hpp"

namespace nomocou {

long HilbertLayout::motional() const {
  long m = 1;
  for (int d : dims) m *= d;
  return m;
}

long HilbertLayout::total() const { return spin_dim * motional(); }

long HilbertLayout::stride(int mode) const {
  long s = 1;
  for (int k = static_cast<int>(dims.size()) - 1; k > mode; --k) s *= dims[k];
  return s;
}

int HilbertLayout::level(long index, int mode) const {
  return static_cast<int>((index / stride(mode)) % dims[mode]);
}

namespace {

void check_mode(const HilbertLayout& h, int mode) {
  if (mode < 0 || mode >= static_cast<int>(h.dims.size())) throw InvalidInput("mode index out of range");
  if (h.dims[mode] < 1) throw InvalidInput("Fock cutoff must be at least 1");
}

}  // namespace

SparseOp identity_op(const HilbertLayout& h) {
  SparseOp I(h.total(), h.total());
  I.setIdentity();
  return I;
}

SparseOp mode_op(const HilbertLayout& h, int mode, const Eigen::MatrixXcd& local) {
  check_mode(h, mode);
  const int d = h.dims[mode];
  if (local.rows() != d || local.cols() != d) throw InvalidInput("mode_op: local matrix has the wrong size");
  const long inner = h.stride(mode);
  const long outer = h.total() / (inner * d);
  std::vector<Eigen::Triplet<cd>> trip;
  long nnz_local = 0;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if (local(r, c) != cd(0)) ++nnz_local;
  trip.reserve(static_cast<std::size_t>(nnz_local * outer * inner));
  for (long o = 0; o < outer; ++o)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        const cd v = local(r, c);
        if (v == cd(0)) continue;
        const long base_r = (o * d + r) * inner, base_c = (o * d + c) * inner;
        for (long i = 0; i < inner; ++i) trip.emplace_back(base_r + i, base_c + i, v);
      }
  SparseOp op(h.total(), h.total());
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

SparseOp spin_op(const HilbertLayout& h, const Eigen::Matrix4cd& local) {
  if (h.spin_dim != 4) throw InvalidInput("spin_op needs a two-qubit layout");
  const long inner = h.motional();
  std::vector<Eigen::Triplet<cd>> trip;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      if (local(r, c) == cd(0)) continue;
      for (long i = 0; i < inner; ++i) trip.emplace_back(r * inner + i, c * inner + i, local(r, c));
    }
  SparseOp op(h.total(), h.total());
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

Eigen::MatrixXcd ladder_lower(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXcd quadrature_x(int dim) {
  const Eigen::MatrixXcd a = ladder_lower(dim);
  return (a + a.adjoint()) / std::sqrt(2.0);
}

Eigen::MatrixXcd quadrature_p(int dim) {
  const Eigen::MatrixXcd a = ladder_lower(dim);
  return cd(0, -1) * (a - a.adjoint()) / std::sqrt(2.0);
}

SparseOp lower_op(const HilbertLayout& h, int mode) {
  check_mode(h, mode);
  return mode_op(h, mode, ladder_lower(h.dims[mode]));
}

SparseOp raise_op(const HilbertLayout& h, int mode) {
  check_mode(h, mode);
  return mode_op(h, mode, ladder_lower(h.dims[mode]).adjoint());
}

SparseOp number_op(const HilbertLayout& h, int mode) {
  check_mode(h, mode);
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(h.dims[mode], h.dims[mode]);
  for (int k = 0; k < h.dims[mode]; ++k) n(k, k) = k;
  return mode_op(h, mode, n);
}

Eigen::VectorXcd fock_state(const HilbertLayout& h, int spin, const std::vector<int>& levels) {
  if (levels.size() != h.dims.size()) throw InvalidInput("fock_state: one level per mode required");
  if (spin < 0 || spin >= h.spin_dim) throw InvalidInput("fock_state: spin index out of range");
  long idx = 0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < 0 || levels[k] >= h.dims[k]) throw InvalidInput("fock_state: level beyond cutoff");
    idx = idx * h.dims[k] + levels[k];
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(h.total());
  v[spin * h.motional() + idx] = 1.0;
  return v;
}

Eigen::VectorXcd coherent_amplitudes(int dim, cd alpha) {
  // Truncated and renormalized within the kept levels.
  Eigen::VectorXcd v(dim);
  v[0] = 1.0;
  for (int n = 1; n < dim; ++n) v[n] = v[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return v / v.norm();
}

Eigen::VectorXcd product_state(const HilbertLayout& h, const Eigen::Vector4cd& spin,
                               const std::vector<Eigen::VectorXcd>& modes) {
  if (modes.size() != h.dims.size()) throw InvalidInput("product_state: one vector per mode required");
  Eigen::VectorXcd m = Eigen::VectorXcd::Ones(1);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (modes[k].size() != h.dims[k]) throw InvalidInput("product_state: mode vector has the wrong size");
    Eigen::VectorXcd next(m.size() * modes[k].size());
    for (long i = 0; i < m.size(); ++i) next.segment(i * modes[k].size(), modes[k].size()) = m[i] * modes[k];
    m = std::move(next);
  }
  if (h.spin_dim == 1) return m;
  Eigen::VectorXcd out(h.total());
  for (int s = 0; s < 4; ++s) out.segment(s * m.size(), m.size()) = spin[s] * m;
  return out;
}

Coefficient constant_coeff(cd c) {
  return [c](double) { return c; };
}

Coefficient phase_coeff(cd c, double frequency) {
  if (frequency == 0.0) return constant_coeff(c);
  return [c, frequency](double t) { return c * std::polar(1.0, frequency * t); };
}

void Hamiltonian::add(SparseOp op, Coefficient c, std::string label) {
  if (!terms.empty() && op.rows() != terms.front().op.rows()) throw InvalidInput("Hamiltonian terms differ in size");
  if (op.rows() != op.cols()) throw InvalidInput("Hamiltonian term is not square");
  terms.push_back({std::move(op), std::move(c), std::move(label)});
}

void Hamiltonian::apply_generator(double t, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  out.setZero(in.size());
  for (const auto& term : terms) {
    const cd c = cd(0, -1) * term.coeff(t);
    if (c == cd(0)) continue;
    out.noalias() += c * (term.op * in);
  }
}

Eigen::MatrixXcd Hamiltonian::dense(double t) const {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim(), dim());
  for (const auto& term : terms) H += term.coeff(t) * Eigen::MatrixXcd(term.op);
  return H;
}

std::vector<long> reachable_subspace(const Hamiltonian& h, const std::vector<Eigen::VectorXcd>& starts) {
  const long D = h.dim();
  std::vector<char> seen(static_cast<std::size_t>(D), 0);
  std::deque<long> queue;
  for (const auto& v : starts) {
    if (v.size() != D) throw InvalidInput("reachable_subspace: start vector has the wrong size");
    for (long i = 0; i < D; ++i)
      if (v[i] != cd(0) && !seen[i]) {
        seen[i] = 1;
        queue.push_back(i);
      }
  }
  // Column-major copies give the images of a basis vector directly.
  std::vector<Eigen::SparseMatrix<cd, Eigen::ColMajor>> cols;
  cols.reserve(h.terms.size());
  for (const auto& term : h.terms) cols.emplace_back(term.op);
  while (!queue.empty()) {
    const long j = queue.front();
    queue.pop_front();
    for (const auto& op : cols)
      for (Eigen::SparseMatrix<cd, Eigen::ColMajor>::InnerIterator it(op, j); it; ++it) {
        if (it.value() == cd(0) || seen[it.row()]) continue;
        seen[it.row()] = 1;
        queue.push_back(it.row());
      }
  }
  std::vector<long> out;
  for (long i = 0; i < D; ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

Hamiltonian restrict_hamiltonian(const Hamiltonian& h, const std::vector<long>& subspace) {
  const long D = h.dim();
  std::vector<long> pos(static_cast<std::size_t>(D), -1);
  for (std::size_t k = 0; k < subspace.size(); ++k) pos[subspace[k]] = static_cast<long>(k);
  const long d = static_cast<long>(subspace.size());
  Hamiltonian out;
  for (const auto& term : h.terms) {
    std::vector<Eigen::Triplet<cd>> trip;
    for (long k = 0; k < d; ++k)
      for (SparseOp::InnerIterator it(term.op, subspace[k]); it; ++it) {
        const long c = pos[it.col()];
        if (c < 0) {
          if (it.value() != cd(0)) throw InvalidInput("restrict_hamiltonian: subspace is not invariant");
          continue;
        }
        trip.emplace_back(k, c, it.value());
      }
    SparseOp op(d, d);
    op.setFromTriplets(trip.begin(), trip.end());
    out.terms.push_back({std::move(op), term.coeff, term.label});
  }
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

// Generic adaptive driver over an Eigen vector; rhs(t, y, dy). The error is the
// 2-norm of the embedded difference, compared with tol (states have unit scale).
template <class Rhs, class Check>
std::vector<Eigen::VectorXcd> dp45(Eigen::VectorXcd y, Rhs rhs, const std::vector<double>& times,
                                   const EvolveOptions& opt, EvolveStats& stats, Check check) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0 || (i > 0 && times[i] < times[i - 1])) throw InvalidInput("evolve: output times must ascend from 0");
  }
  if (!(opt.tol > 0)) throw InvalidInput("evolve: tolerance must be positive");
  const long n = y.size();
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);
  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  double t = 0.0;
  rhs(t, y, k1);
  double h = std::min(1.0, 0.01 * opt.tol / std::max(k1.cwiseAbs().maxCoeff(), 1e-300));
  h = std::max(h, 1e-6);
  for (double target : times) {
    while (t < target) {
      if (stats.steps + stats.rejected > opt.max_steps) throw IntegrationFailure("evolve: step limit exceeded", t);
      bool last = false;
      double step = h;
      if (t + step >= target) {
        step = target - t;
        last = true;
      }
      if (step < opt.min_step && !last) throw IntegrationFailure("evolve: step size underflow", t);
      tmp = y + step * a21 * k1;
      rhs(t + c2 * step, tmp, k2);
      tmp = y + step * (a31 * k1 + a32 * k2);
      rhs(t + c3 * step, tmp, k3);
      tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
      rhs(t + c4 * step, tmp, k4);
      tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      rhs(t + c5 * step, tmp, k5);
      tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      rhs(t + step, tmp, k6);
      y5 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      rhs(t + step, y5, k7);
      tmp = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double err = tmp.norm() / opt.tol;
      if (!std::isfinite(err)) throw IntegrationFailure("evolve: non-finite state", t);
      if (err <= 1.0) {
        t = last ? target : t + step;
        y.swap(y5);
        k1.swap(k7);
        ++stats.steps;
        check(t, y);
        const double grow = err > 0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
        if (!last) h = step * grow;
        else h = std::max(h, step * grow);
      } else {
        ++stats.rejected;
        h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace

std::vector<Eigen::VectorXcd> evolve(const Eigen::VectorXcd& psi0, const Hamiltonian& h,
                                     const std::vector<double>& times, const EvolveOptions& opt,
                                     EvolveStats* stats_out) {
  if (psi0.size() != h.dim()) throw InvalidInput("evolve: state and Hamiltonian sizes differ");
  EvolveStats stats;
  const double norm0 = psi0.norm();
  auto check = [&](double t, const Eigen::VectorXcd& y) {
    const double e = std::abs(y.norm() - norm0);
    stats.max_norm_error = std::max(stats.max_norm_error, e);
    if (e > opt.norm_tol) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "evolve: norm drift %.3e at t = %.6g", e, t);
      throw NumericalFailure(buf);
    }
  };
  std::vector<Eigen::VectorXcd> out;
  if (opt.restrict_to_reachable) {
    const auto sub = reachable_subspace(h, {psi0});
    const Hamiltonian hr = restrict_hamiltonian(h, sub);
    stats.subspace_dim = static_cast<long>(sub.size());
    Eigen::VectorXcd y0(sub.size());
    for (std::size_t k = 0; k < sub.size(); ++k) y0[k] = psi0[sub[k]];
    auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) { hr.apply_generator(t, y, dy); };
    const auto small = dp45(y0, rhs, times, opt, stats, check);
    out.reserve(small.size());
    for (const auto& s : small) {
      Eigen::VectorXcd full = Eigen::VectorXcd::Zero(h.dim());
      for (std::size_t k = 0; k < sub.size(); ++k) full[sub[k]] = s[k];
      out.push_back(std::move(full));
    }
  } else {
    stats.subspace_dim = h.dim();
    auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) { h.apply_generator(t, y, dy); };
    out = dp45(psi0, rhs, times, opt, stats, check);
  }
  if (stats_out) *stats_out = stats;
  return out;
}

std::vector<Eigen::MatrixXcd> evolve_density(const Eigen::MatrixXcd& rho0, const Hamiltonian& h,
                                             const std::vector<double>& times, const EvolveOptions& opt) {
  const long D = h.dim();
  if (rho0.rows() != D || rho0.cols() != D) throw InvalidInput("evolve_density: size mismatch");
  EvolveStats stats;
  const double tr0 = rho0.trace().real();
  auto check = [&](double t, const Eigen::VectorXcd& y) {
    double tr = 0.0;
    for (long i = 0; i < D; ++i) tr += y[i * D + i].real();
    if (std::abs(tr - tr0) > opt.norm_tol)
      throw NumericalFailure("evolve_density: trace drift at t = " + std::to_string(t));
  };
  // rho stored column-major as a vector; -i [H, rho].
  auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    Eigen::Map<const Eigen::MatrixXcd> rho(y.data(), D, D);
    Eigen::MatrixXcd comm = Eigen::MatrixXcd::Zero(D, D);
    for (const auto& term : h.terms) {
      const cd c = term.coeff(t);
      if (c == cd(0)) continue;
      Eigen::MatrixXcd hr = term.op * rho;
      comm += c * hr;
      comm -= c * (term.op.adjoint() * rho.adjoint()).adjoint();
    }
    dy.resize(D * D);
    Eigen::Map<Eigen::MatrixXcd>(dy.data(), D, D) = cd(0, -1) * comm;
  };
  Eigen::VectorXcd y0 = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), D * D);
  const auto vecs = dp45(y0, rhs, times, opt, stats, check);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(vecs.size());
  for (const auto& v : vecs) out.push_back(Eigen::Map<const Eigen::MatrixXcd>(v.data(), D, D));
  return out;
}

}  // namespace nomocou
