#pragma once

// Reference implementations used only by tests. They share no code with the
// library beyond its data types, and favour obviousness over speed.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "pvqa/model.hpp"
#include "pvqa/problems.hpp"

namespace oracle {

using cplx = std::complex<double>;

struct Matrix {
  std::size_t dim = 0;
  std::vector<cplx> a;  // row-major

  explicit Matrix(std::size_t d = 0) : dim(d), a(d * d) {}
  cplx& operator()(std::size_t r, std::size_t c) { return a[r * dim + c]; }
  cplx operator()(std::size_t r, std::size_t c) const { return a[r * dim + c]; }
};

inline Matrix identity(std::size_t d) {
  Matrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

inline Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix out(x.dim * y.dim);
  for (std::size_t i = 0; i < x.dim; ++i) {
    for (std::size_t j = 0; j < x.dim; ++j) {
      for (std::size_t k = 0; k < y.dim; ++k) {
        for (std::size_t l = 0; l < y.dim; ++l) {
          out(i * y.dim + k, j * y.dim + l) = x(i, j) * y(k, l);
        }
      }
    }
  }
  return out;
}

inline Matrix add(const Matrix& x, const Matrix& y, cplx wy = 1.0) {
  Matrix out = x;
  for (std::size_t i = 0; i < out.a.size(); ++i) {
    out.a[i] += wy * y.a[i];
  }
  return out;
}

inline Matrix mul(const Matrix& x, const Matrix& y) {
  Matrix out(x.dim);
  for (std::size_t i = 0; i < x.dim; ++i) {
    for (std::size_t k = 0; k < x.dim; ++k) {
      const cplx v = x(i, k);
      for (std::size_t j = 0; j < x.dim; ++j) {
        out(i, j) += v * y(k, j);
      }
    }
  }
  return out;
}

inline std::vector<cplx> apply(const Matrix& m, const std::vector<cplx>& v) {
  std::vector<cplx> out(m.dim);
  for (std::size_t i = 0; i < m.dim; ++i) {
    for (std::size_t j = 0; j < m.dim; ++j) {
      out[i] += m(i, j) * v[j];
    }
  }
  return out;
}

// Single-site operator on spin `site` of an n-spin register. The library stores
// variable i in bit i of the basis index, so site i is the i-th factor from the
// right of the Kronecker product.
inline Matrix site_operator(const Matrix& op, std::size_t site, std::size_t n) {
  Matrix out = identity(1);
  for (std::size_t k = n; k-- > 0;) {
    out = kron(out, k == site ? op : identity(2));
  }
  return out;
}

inline Matrix pauli_x() {
  Matrix m(2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

// Basis state 0 is x = 0, i.e. sigma = -1.
inline Matrix spin_z() {
  Matrix m(2);
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return m;
}

/// s * H_Ising - (1 - s) * sum_i sigma^x_i built from Kronecker products.
inline Matrix dense_hamiltonian(const pvqa::IsingModel& m, double s) {
  const std::size_t n = m.n();
  const std::size_t d = std::size_t{1} << n;
  Matrix ising = identity(d);
  for (auto& v : ising.a) {
    v *= m.offset();
  }
  for (const auto& [i, h] : m.fields()) {
    ising = add(ising, site_operator(spin_z(), i, n), h);
  }
  for (const auto& [key, j] : m.couplings()) {
    ising = add(ising, mul(site_operator(spin_z(), key.first, n), site_operator(spin_z(), key.second, n)), j);
  }
  Matrix drive(d);
  for (std::size_t i = 0; i < n; ++i) {
    drive = add(drive, site_operator(pauli_x(), i, n));
  }
  Matrix out(d);
  out = add(out, ising, s);
  return add(out, drive, -(1.0 - s));
}

/// exp(-i H t) v by scaling and a long Taylor series.
inline std::vector<cplx> expm_apply(const Matrix& h, double t, std::vector<cplx> v) {
  double norm = 0.0;
  for (std::size_t i = 0; i < h.dim; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < h.dim; ++j) {
      row += std::abs(h(i, j));
    }
    norm = std::max(norm, row);
  }
  const auto pieces = static_cast<std::size_t>(std::ceil(norm * std::abs(t) / 0.1)) + 1;
  const double dt = t / static_cast<double>(pieces);
  for (std::size_t p = 0; p < pieces; ++p) {
    std::vector<cplx> term = v;
    std::vector<cplx> sum = v;
    for (int k = 1; k <= 30; ++k) {
      term = oracle::apply(h, term);
      for (auto& x : term) {
        x *= cplx(0.0, -dt) / static_cast<double>(k);
      }
      for (std::size_t i = 0; i < sum.size(); ++i) {
        sum[i] += term[i];
      }
    }
    v = sum;
  }
  return v;
}

inline std::vector<cplx> uniform_state(std::size_t n) {
  const std::size_t d = std::size_t{1} << n;
  return std::vector<cplx>(d, cplx(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
}

/// Q(x) from a dense upper-triangular coefficient matrix, naive double loop.
inline double qubo_value(const pvqa::Qubo& q, const pvqa::SpinConfig& x) {
  const std::size_t n = q.n();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (const auto& [i, v] : q.linear()) {
    m[i][i] += v;
  }
  for (const auto& [key, v] : q.quadratic()) {
    m[key.first][key.second] += v;
  }
  double e = q.offset();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      e += m[i][j] * x.bit(i) * x.bit(j);
    }
  }
  return e;
}

/// Number of edges with endpoints in different parts.
inline int cut_size(const pvqa::GppInstance& g, const pvqa::SpinConfig& x) {
  int cut = 0;
  for (const auto& [i, j] : g.edges) {
    cut += x.bit(i) != x.bit(j) ? 1 : 0;
  }
  return cut;
}

/// Total profit of the selected items, counting p_ij once per unordered pair.
inline std::int64_t knapsack_profit(const pvqa::QkpInstance& q, const pvqa::SpinConfig& x) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < q.n_items; ++i) {
    for (std::size_t j = i; j < q.n_items; ++j) {
      if (x.bit(i) && x.bit(j)) {
        total += q.profit(i, j);
      }
    }
  }
  return total;
}

inline bool balanced(const pvqa::SpinConfig& x) { return 2 * x.popcount() == x.size(); }

inline bool within_capacity(const pvqa::QkpInstance& q, const pvqa::SpinConfig& x) {
  std::int64_t w = 0;
  for (std::size_t i = 0; i < q.n_items; ++i) {
    w += q.weights[i] * x.bit(i);
  }
  return w <= q.capacity;
}

/// Random QUBO with integer-valued coefficients in [-range, range].
inline pvqa::Qubo random_qubo(std::size_t n, std::uint64_t seed, int range = 5, double density = 0.7) {
  std::mt19937_64 rng(seed);
  auto coin = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto coeff = [&] { return static_cast<double>(static_cast<int>(rng() % (2 * range + 1)) - range); };
  pvqa::Qubo q(n, coeff());
  for (std::size_t i = 0; i < n; ++i) {
    q.add_linear(i, coeff());
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin() < density) {
        q.add_quadratic(i, j, coeff());
      }
    }
  }
  return q;
}

}  // namespace oracle
