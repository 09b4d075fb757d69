#include "nomocou/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "nomocou/errors.hpp"
#include "nomocou/parallel.hpp"

namespace nomocou {

namespace {

void sort3(int& a, int& b, int& c) {
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
}

bool entry_less(const TensorEntry& x, const TensorEntry& y) {
  if (x.a != y.a) return x.a < y.a;
  if (x.b != y.b) return x.b < y.b;
  return x.c < y.c;
}

// Third derivatives of 1/|r| with respect to the components of r.
double inverse_distance_third(const Eigen::Vector3d& r, double d, int a, int b, int c) {
  const double d5 = std::pow(d, 5), d7 = d5 * d * d;
  double v = -15.0 * r[a] * r[b] * r[c] / d7;
  if (a == b) v += 3.0 * r[c] / d5;
  if (a == c) v += 3.0 * r[b] / d5;
  if (b == c) v += 3.0 * r[a] / d5;
  return v;
}

using Accumulator = std::unordered_map<std::uint64_t, double>;

std::uint64_t key(int a, int b, int c, int dim) {
  return (static_cast<std::uint64_t>(a) * dim + b) * dim + c;
}

SymmetricTensor3 from_map(int dim, const Accumulator& acc, double floor) {
  std::vector<TensorEntry> raw;
  raw.reserve(acc.size());
  for (const auto& [k, v] : acc) {
    const int c = static_cast<int>(k % dim);
    const int b = static_cast<int>((k / dim) % dim);
    const int a = static_cast<int>(k / dim / dim);
    raw.push_back({a, b, c, v});
  }
  return SymmetricTensor3::from_accumulator(dim, std::move(raw), floor);
}

}  // namespace

double SymmetricTensor3::operator()(int a, int b, int c) const {
  sort3(a, b, c);
  const TensorEntry probe{a, b, c, 0.0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, entry_less);
  if (it != entries_.end() && it->a == a && it->b == b && it->c == c) return it->value;
  return 0.0;
}

SymmetricTensor3 SymmetricTensor3::from_accumulator(int dim, std::vector<TensorEntry> raw, double floor) {
  for (auto& e : raw) sort3(e.a, e.b, e.c);
  std::sort(raw.begin(), raw.end(), entry_less);
  SymmetricTensor3 t(dim);
  for (const auto& e : raw) {
    if (!t.entries_.empty() && !entry_less(t.entries_.back(), e)) t.entries_.back().value += e.value;
    else t.entries_.push_back(e);
  }
  auto tiny = [floor](const TensorEntry& e) { return !(std::abs(e.value) > floor); };
  t.entries_.erase(std::remove_if(t.entries_.begin(), t.entries_.end(), tiny), t.entries_.end());
  return t;
}

Eigen::MatrixXd SymmetricTensor3::contract(const Eigen::VectorXd& w) const {
  if (w.size() != dim_) throw InvalidInput("tensor contraction: dimension mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const auto& e : entries_) {
    const int a = e.a, b = e.b, c = e.c;
    const double t = e.value;
    if (a == b && b == c) {
      out(a, a) += t * w[a];
    } else if (a == b) {  // (a, a, c)
      out(a, a) += t * w[c];
      out(a, c) += t * w[a];
      out(c, a) += t * w[a];
    } else if (b == c) {  // (a, b, b)
      out(b, b) += t * w[a];
      out(a, b) += t * w[b];
      out(b, a) += t * w[b];
    } else {
      out(a, b) += t * w[c];
      out(b, a) += t * w[c];
      out(a, c) += t * w[b];
      out(c, a) += t * w[b];
      out(b, c) += t * w[a];
      out(c, b) += t * w[a];
    }
  }
  return out;
}

double SymmetricTensor3::cubic_form(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw InvalidInput("tensor cubic form: dimension mismatch");
  double s = 0.0;
  for (const auto& e : entries_) s += multiplicity(e.a, e.b, e.c) * e.value * x[e.a] * x[e.b] * x[e.c];
  return s;
}

double multiplicity(int u, int v, int w) {
  if (u == v && v == w) return 1.0;
  if (u == v || v == w || u == w) return 3.0;
  return 6.0;
}

CartesianTressian coulomb_tressian(const Equilibrium& eq) {
  const int n = eq.num_ions;
  const int dim = 3 * n;
  const Eigen::VectorXd& x = eq.positions;
  Accumulator acc;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::Vector3d r(x[i] - x[j], x[n + i] - x[n + j], x[2 * n + i] - x[2 * n + j]);
      const double d = r.norm();
      if (d < 1e-12) throw SingularConfiguration("coincident ions in Tressian");
      double phi[3][3][3];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 3; ++c) phi[a][b][c] = inverse_distance_third(r, d, a, b, c);
      const int ion[2] = {i, j};
      for (int s = 0; s < 8; ++s) {
        const int s1 = ion[s & 1], s2 = ion[(s >> 1) & 1], s3 = ion[(s >> 2) & 1];
        const double sign = (__builtin_popcount(s) % 2) ? -1.0 : 1.0;
        for (int a = 0; a < 3; ++a) {
          const int u = coord_index(a, s1, n);
          for (int b = 0; b < 3; ++b) {
            const int v = coord_index(b, s2, n);
            if (v < u) continue;
            for (int c = 0; c < 3; ++c) {
              const int w = coord_index(c, s3, n);
              if (w < v) continue;
              acc[key(u, v, w, dim)] += sign * phi[a][b][c];
            }
          }
        }
      }
    }
  }
  return from_map(dim, acc, kTensorFloor);
}

CartesianTressian trap_tressian(const Equilibrium& eq) {
  const int n = eq.num_ions;
  std::vector<TensorEntry> raw;
  if (eq.model.quartic != 0.0) {
    for (int i = 0; i < n; ++i) {
      const int u = coord_index(2, i, n);
      raw.push_back({u, u, u, 6.0 * eq.model.quartic * eq.positions[u]});
    }
  }
  return SymmetricTensor3::from_accumulator(3 * n, std::move(raw), kTensorFloor);
}

CartesianTressian add(const CartesianTressian& x, const CartesianTressian& y) {
  if (x.dim() != y.dim()) throw InvalidInput("tensor sum: dimension mismatch");
  std::vector<TensorEntry> raw = x.entries();
  raw.insert(raw.end(), y.entries().begin(), y.entries().end());
  return SymmetricTensor3::from_accumulator(x.dim(), std::move(raw), kTensorFloor);
}

CartesianTressian full_tressian(const Equilibrium& eq) { return add(coulomb_tressian(eq), trap_tressian(eq)); }

double CubicModeTensor::monomial(int u, int v, int w) const {
  return tensor(u, v, w) * multiplicity(u, v, w) / 6.0;
}

CubicModeTensor to_mode_basis(const CartesianTressian& cart, const ModeSpectrum& spec) {
  const int M = spec.num_modes();
  if (cart.dim() != M) throw InvalidInput("to_mode_basis: tensor and spectrum dimensions differ");
  const Eigen::MatrixXd W = spec.position_map();
  const int D = 2 * M;
  std::vector<std::vector<TensorEntry>> slices(D);
  parallel_for(D, [&](int w) {
    if (W.col(w).squaredNorm() == 0.0) return;
    const Eigen::MatrixXd G = W.transpose() * cart.contract(W.col(w)) * W;
    auto& out = slices[w];
    for (int v = 0; v <= w; ++v)
      for (int u = 0; u <= v; ++u)
        if (std::abs(G(u, v)) > kTensorFloor) out.push_back({u, v, w, G(u, v)});
  });
  std::vector<TensorEntry> all;
  for (auto& s : slices) all.insert(all.end(), s.begin(), s.end());
  CubicModeTensor t;
  t.num_modes = M;
  t.tensor = SymmetricTensor3::from_accumulator(D, std::move(all), kTensorFloor);
  return t;
}

double QuadratureBlock::norm() const {
  double s = 0.0;
  for (auto& a : v)
    for (auto& b : a)
      for (double c : b) s += c * c;
  return std::sqrt(s);
}

TriadContractor::TriadContractor(const CartesianTressian& cart, const ModeSpectrum& spec)
    : cart_(cart), W_(spec.position_map()), M_(spec.num_modes()) {
  if (cart.dim() != M_) throw InvalidInput("TriadContractor: dimension mismatch");
  has_p_ = W_.rightCols(M_).cwiseAbs().maxCoeff() > 0.0;
}

void TriadContractor::select(int p) {
  if (p == p_) return;
  p_ = p;
  MQ_ = cart_.contract(W_.col(p));
  if (has_p_) MP_ = cart_.contract(W_.col(M_ + p));
}

QuadratureBlock TriadContractor::block(int n, int m) const {
  QuadratureBlock b;
  const int nq = has_p_ ? 2 : 1;
  for (int z = 0; z < nq; ++z) {
    const Eigen::MatrixXd& Mz = z == 0 ? MQ_ : MP_;
    for (int x = 0; x < nq; ++x) {
      const Eigen::VectorXd left = Mz * W_.col(x == 0 ? n : M_ + n);
      for (int y = 0; y < nq; ++y) b.v[x][y][z] = left.dot(W_.col(y == 0 ? m : M_ + m));
    }
  }
  return b;
}

ModeSpectrum quarter_turn(const ModeSpectrum& spec, int mode) {
  const int M = spec.num_modes();
  if (mode < 0 || mode >= M) throw InvalidInput("quarter_turn: mode out of range");
  ModeSpectrum out = spec;
  out.S.col(mode) = -spec.S.col(M + mode);
  out.S.col(M + mode) = spec.S.col(mode);
  out.A.row(mode) = -spec.A.row(M + mode);
  out.A.row(M + mode) = spec.A.row(mode);
  return out;
}

double cubic_model_energy(const Eigen::MatrixXd& K, const CartesianTressian& cart, const Eigen::VectorXd& d) {
  return 0.5 * d.dot(K * d) + cart.cubic_form(d) / 6.0;
}

void write_tensor_csv(std::ostream& out, const CubicModeTensor& t, const std::string& header_comment) {
  out << "# " << header_comment << "\n";
  out << "# value is the symmetric tensor element; energy = (1/6) sum over all index orders\n";
  out << "n,m,p,pattern,value\n";
  out.precision(17);
  const int M = t.num_modes;
  for (const auto& e : t.tensor.entries()) {
    const int idx[3] = {e.a, e.b, e.c};
    std::string pat;
    for (int k : idx) pat += k < M ? 'Q' : 'P';
    out << e.a % M << ',' << e.b % M << ',' << e.c % M << ',' << pat << ',' << e.value << "\n";
  }
}

void write_cartesian_csv(std::ostream& out, const CartesianTressian& t, int num_ions) {
  static const char axis[3] = {'x', 'y', 'z'};
  out << "# Cartesian third derivatives in units of E0/l0^3, one row per sorted index triple\n";
  out << "ion_a,axis_a,ion_b,axis_b,ion_c,axis_c,value\n";
  out.precision(17);
  for (const auto& e : t.entries()) {
    const int idx[3] = {e.a, e.b, e.c};
    for (int k : idx) out << k % num_ions << ',' << axis[k / num_ions] << ',';
    out << e.value << "\n";
  }
}

}  // namespace nomocou
