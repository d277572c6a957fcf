#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "sepgap/rng.hpp"

namespace sepgap {

using cxd = std::complex<double>;
using Operator = Eigen::MatrixXcd;   // dense Hermitian matrix, dim N = 2^L for qubit systems
using PureState = Eigen::VectorXcd;  // normalized amplitude vector

// Ordered factor dimensions of a tensor split; product equals the total dim.
using Partition = std::vector<Eigen::Index>;

// Raised when an iterative routine fails its convergence contract.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// States
//
// Qubit ordering convention, fixed project-wide: site 0 is the leftmost
// (most significant) tensor factor, so basis index x has the bit of site i
// at position L-1-i.
// ---------------------------------------------------------------------------

struct BlochAngles {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2*pi)
};

// |psi(theta, phi)> = (cos theta/2, e^{i phi} sin theta/2)
inline PureState bloch_state(const BlochAngles& a) {
  PureState v(2);
  v << cxd(std::cos(a.theta / 2), 0.0), std::polar(std::sin(a.theta / 2), a.phi);
  return v;
}

struct ProductState {
  std::vector<BlochAngles> angles;  // one entry per qubit, site 0 first

  int sites() const { return static_cast<int>(angles.size()); }
};

inline int qubit_count(Eigen::Index dim) {
  int l = 0;
  while ((Eigen::Index{1} << l) < dim) ++l;
  if ((Eigen::Index{1} << l) != dim)
    throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
  return l;
}

inline PureState materialize(const ProductState& s) {
  PureState v = PureState::Ones(1);
  for (const auto& a : s.angles) {
    const PureState q = bloch_state(a);
    PureState out(v.size() * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out[2 * i] = v[i] * q[0];
      out[2 * i + 1] = v[i] * q[1];
    }
    v.swap(out);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Pauli matrices
// ---------------------------------------------------------------------------

namespace pauli {

inline Operator identity() { return Operator::Identity(2, 2); }

inline Operator x() {
  Operator m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Operator y() {
  Operator m(2, 2);
  m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
  return m;
}

inline Operator z() {
  Operator m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// sigma_0 = identity, sigma_1..3 = x, y, z
inline Operator sigma(int i) {
  switch (i) {
    case 0: return identity();
    case 1: return x();
    case 2: return y();
    case 3: return z();
  }
  throw std::invalid_argument("pauli index out of range");
}

}  // namespace pauli

inline bool is_hermitian(const Operator& h, double tol = 1e-12) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// Tensor algebra
// ---------------------------------------------------------------------------

inline Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// op2 acting on `site`, identity on the other L-1 qubits
inline Operator embed_local(const Operator& op2, int site, int l) {
  if (op2.rows() != 2 || op2.cols() != 2)
    throw std::invalid_argument("embed_local expects a single-qubit operator");
  if (site < 0 || site >= l) throw std::invalid_argument("embed_local: site out of range");
  const Eigen::Index left = Eigen::Index{1} << site;
  const Eigen::Index right = Eigen::Index{1} << (l - site - 1);
  return kron(kron(Operator::Identity(left, left), op2), Operator::Identity(right, right));
}

inline double expectation(const Operator& h, const PureState& psi) {
  if (h.rows() != psi.size() || h.cols() != psi.size())
    throw std::invalid_argument("expectation: dimension mismatch");
  const cxd val = psi.dot(h * psi);
  const double scale = std::max(1.0, std::abs(val.real()));
  if (std::abs(val.imag()) > 1e-10 * scale)
    throw NumericalError("expectation: imaginary residue " + std::to_string(val.imag()));
  return val.real();
}

inline double product_expectation(const Operator& h, const ProductState& s) {
  const int l = qubit_count(h.rows());
  if (l != s.sites()) throw std::invalid_argument("product_expectation: qubit count mismatch");
  return expectation(h, materialize(s));
}

// ---------------------------------------------------------------------------
// Partial trace
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Eigen::Index> partition_strides(const Partition& dims) {
  std::vector<Eigen::Index> stride(dims.size());
  Eigen::Index acc = 1;
  for (int f = static_cast<int>(dims.size()) - 1; f >= 0; --f) {
    stride[f] = acc;
    acc *= dims[f];
  }
  return stride;
}

}  // namespace detail

// Trace out all factors not in `keep`; kept factors stay in their original
// relative order. Trace is preserved.
inline Operator partial_trace(const Operator& rho, const std::vector<int>& keep,
                              const Partition& dims) {
  Eigen::Index total = 1;
  for (auto d : dims) {
    if (d <= 0) throw std::invalid_argument("partial_trace: factor dims must be positive");
    total *= d;
  }
  if (rho.rows() != total || rho.cols() != total)
    throw std::invalid_argument("partial_trace: partition does not match operator dim");

  std::vector<bool> kept(dims.size(), false);
  for (int f : keep) {
    if (f < 0 || f >= static_cast<int>(dims.size()))
      throw std::invalid_argument("partial_trace: keep index out of range");
    if (kept[f]) throw std::invalid_argument("partial_trace: duplicate keep index");
    kept[f] = true;
  }

  const auto stride = detail::partition_strides(dims);
  std::vector<int> keep_sorted, traced;
  for (int f = 0; f < static_cast<int>(dims.size()); ++f)
    (kept[f] ? keep_sorted : traced).push_back(f);

  Eigen::Index keep_dim = 1, trace_dim = 1;
  for (int f : keep_sorted) keep_dim *= dims[f];
  for (int f : traced) trace_dim *= dims[f];

  // offset of a flattened multi-index within the original indexing
  auto offset = [&](const std::vector<int>& factors, Eigen::Index flat) {
    Eigen::Index off = 0;
    for (int i = static_cast<int>(factors.size()) - 1; i >= 0; --i) {
      const int f = factors[i];
      off += (flat % dims[f]) * stride[f];
      flat /= dims[f];
    }
    return off;
  };

  std::vector<Eigen::Index> keep_off(keep_dim), trace_off(trace_dim);
  for (Eigen::Index i = 0; i < keep_dim; ++i) keep_off[i] = offset(keep_sorted, i);
  for (Eigen::Index t = 0; t < trace_dim; ++t) trace_off[t] = offset(traced, t);

  Operator out = Operator::Zero(keep_dim, keep_dim);
  for (Eigen::Index i = 0; i < keep_dim; ++i)
    for (Eigen::Index j = 0; j < keep_dim; ++j) {
      cxd acc(0, 0);
      for (Eigen::Index t = 0; t < trace_dim; ++t)
        acc += rho(keep_off[i] + trace_off[t], keep_off[j] + trace_off[t]);
      out(i, j) = acc;
    }
  return out;
}

// Reduced density matrix of a pure L-qubit state on the given qubits,
// without forming the N x N projector.
inline Operator reduced_density_matrix(const PureState& psi, const std::vector<int>& keep, int l) {
  if (psi.size() != (Eigen::Index{1} << l))
    throw std::invalid_argument("reduced_density_matrix: state dim mismatch");
  for (int q : keep)
    if (q < 0 || q >= l) throw std::invalid_argument("reduced_density_matrix: qubit out of range");

  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  const int k = static_cast<int>(keep_sorted.size());
  std::vector<int> rest;
  for (int q = 0; q < l; ++q)
    if (!std::binary_search(keep_sorted.begin(), keep_sorted.end(), q)) rest.push_back(q);

  auto scatter = [&](const std::vector<int>& qubits, Eigen::Index bits) {
    Eigen::Index x = 0;
    for (int i = static_cast<int>(qubits.size()) - 1; i >= 0; --i) {
      x |= (bits & 1) << (l - 1 - qubits[i]);
      bits >>= 1;
    }
    return x;
  };

  const Eigen::Index dk = Eigen::Index{1} << k;
  const Eigen::Index dr = Eigen::Index{1} << (l - k);
  std::vector<Eigen::Index> keep_bits(dk), rest_bits(dr);
  for (Eigen::Index i = 0; i < dk; ++i) keep_bits[i] = scatter(keep_sorted, i);
  for (Eigen::Index t = 0; t < dr; ++t) rest_bits[t] = scatter(rest, t);

  Operator rho = Operator::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i)
    for (Eigen::Index j = i; j < dk; ++j) {
      cxd acc(0, 0);
      for (Eigen::Index t = 0; t < dr; ++t)
        acc += psi[keep_bits[i] | rest_bits[t]] * std::conj(psi[keep_bits[j] | rest_bits[t]]);
      rho(i, j) = acc;
      rho(j, i) = std::conj(acc);
    }
  return rho;
}

// ---------------------------------------------------------------------------
// Eigensolvers
// ---------------------------------------------------------------------------

struct EigenSystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors;  // column k pairs with values[k]
};

inline EigenSystem eigen_sym(const Operator& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("eigen_sym: matrix not square");
  if (h.rows() > (1 << 12)) throw std::invalid_argument("eigen_sym: beyond dense budget 2^12");
  Eigen::SelfAdjointEigenSolver<Operator> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen_sym: solver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Eigenvalues only; same contract, saves the eigenvector backtransform.
inline Eigen::VectorXd eigenvalues_sym(const Operator& h) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigenvalues_sym: solver did not converge");
  return solver.eigenvalues();
}

struct MinEig {
  double value = 0.0;
  PureState vector;
};

namespace detail {

// Lanczos with full reorthogonalization for the smallest eigenpair; used
// above the dense budget. Residual contract ||Hv - lambda v|| <= tol*||H||.
inline MinEig lanczos_min_eig(const Operator& h, double tol = 1e-9, int max_iter = 600) {
  const Eigen::Index n = h.rows();
  Rng rng(0x1A2B3C4D5E6F7081ULL);  // fixed start vector keeps min_eig deterministic
  std::vector<PureState> basis;
  std::vector<double> alpha, beta;

  PureState v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cxd(rng.normal(), rng.normal());
  v.normalize();
  basis.push_back(v);

  const int cap = static_cast<int>(std::min<Eigen::Index>(n, max_iter));
  double norm_est = 1.0;
  for (int m = 1; m <= cap; ++m) {
    PureState w = h * basis.back();
    const double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    w -= a * basis.back();
    if (m >= 2) w -= beta.back() * basis[m - 2];
    for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
    const double bnorm = w.norm();

    // Ritz check on the tridiagonal matrix
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsolve(t);
    norm_est = std::max(std::abs(tsolve.eigenvalues()(0)), std::abs(tsolve.eigenvalues()(m - 1)));
    const double resid_est = bnorm * std::abs(tsolve.eigenvectors()(m - 1, 0));
    if (resid_est <= 0.5 * tol * std::max(norm_est, 1e-30) || bnorm <= 1e-14 * norm_est ||
        m == cap) {
      PureState ground = PureState::Zero(n);
      for (int i = 0; i < m; ++i) ground += tsolve.eigenvectors()(i, 0) * basis[i];
      ground.normalize();
      const double lambda = tsolve.eigenvalues()(0);
      const double resid = (h * ground - lambda * ground).norm();
      if (resid <= tol * std::max(norm_est, 1e-30)) return {lambda, ground};
      if (m == cap || bnorm <= 1e-14 * norm_est)
        throw NumericalError("lanczos_min_eig: iteration cap reached, residual " +
                             std::to_string(resid));
    }
    beta.push_back(bnorm);
    basis.push_back(w / bnorm);
  }
  throw NumericalError("lanczos_min_eig: did not converge");
}

}  // namespace detail

inline MinEig min_eig(const Operator& h) {
  if (h.rows() <= (1 << 10)) {
    const auto sys = eigen_sym(h);
    return {sys.values(0), sys.vectors.col(0)};
  }
  return detail::lanczos_min_eig(h);
}

}  // namespace sepgap
