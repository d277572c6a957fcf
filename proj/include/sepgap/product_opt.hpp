#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sepgap/parallel.hpp"
#include "sepgap/polytope.hpp"
#include "sepgap/rng.hpp"
#include "sepgap/tensor.hpp"

namespace sepgap {

// ---------------------------------------------------------------------------
// Pauli components of one peeled qubit
// ---------------------------------------------------------------------------

// Components H_i of dimension N/2 with H = 1/2 sum_i sigma_i (x) H_i after
// moving the peeled site to the front.
struct PauliReduction {
  std::array<Operator, 4> ops;

  Eigen::Index rest_dim() const { return ops[0].rows(); }

  Operator combine(const Eigen::Vector4d& c) const {
    return c[0] * ops[0] + c[1] * ops[1] + c[2] * ops[2] + c[3] * ops[3];
  }

  // joint expectation tuple (<H_0>, ..., <H_3>) in a state of the rest
  Eigen::Vector4d point(const PureState& beta) const {
    Eigen::Vector4d x;
    for (int i = 0; i < 4; ++i) x[i] = std::real(beta.dot(ops[i] * beta));
    return x;
  }

  // barycenter tuple, the image of the maximally mixed rest state
  Eigen::Vector4d center() const {
    Eigen::Vector4d x;
    for (int i = 0; i < 4; ++i) x[i] = std::real(ops[i].trace()) / static_cast<double>(rest_dim());
    return x;
  }
};

inline PauliReduction pauli_reduce(const Operator& h, int site) {
  const int l = qubit_count(h.rows());
  if (site < 0 || site >= l) throw std::invalid_argument("pauli_reduce: site out of range");
  const Eigen::Index half = h.rows() / 2;
  const int low_bits = l - 1 - site;
  const Eigen::Index low_mask = (Eigen::Index{1} << low_bits) - 1;
  auto full = [&](Eigen::Index bit, Eigen::Index x) {
    return ((x >> low_bits) << (low_bits + 1)) | (bit << low_bits) | (x & low_mask);
  };
  PauliReduction red;
  for (auto& op : red.ops) op = Operator(half, half);
  for (Eigen::Index x = 0; x < half; ++x)
    for (Eigen::Index y = 0; y < half; ++y) {
      const cxd m00 = h(full(0, x), full(0, y));
      const cxd m01 = h(full(0, x), full(1, y));
      const cxd m10 = h(full(1, x), full(0, y));
      const cxd m11 = h(full(1, x), full(1, y));
      red.ops[0](x, y) = m00 + m11;
      red.ops[1](x, y) = m01 + m10;
      red.ops[2](x, y) = cxd(0, 1) * (m01 - m10);
      red.ops[3](x, y) = m00 - m11;
    }
  return red;
}

// Minimal eigenvalue of the 2x2 operator with Pauli expectation tuple x:
// x0/2 - 1/2 sqrt(x1^2 + x2^2 + x3^2). Concave in x.
inline double two_level_min(const Eigen::Vector4d& x) {
  return 0.5 * x[0] - 0.5 * x.tail<3>().norm();
}

// ---------------------------------------------------------------------------
// Exact single-qubit minimization
// ---------------------------------------------------------------------------

struct QubitMin {
  double value = 0.0;
  BlochAngles angles;
};

// Smallest eigenvalue of a 2x2 Hermitian matrix, Tr/2 - sqrt((Tr/2)^2 - det),
// plus Bloch angles of the ground eigenvector.
inline QubitMin min_qubit_expectation(const Operator& m) {
  if (m.rows() != 2 || m.cols() != 2)
    throw std::invalid_argument("min_qubit_expectation: expects a 2x2 matrix");
  const double a0 = std::real(m(0, 0) + m(1, 1));
  const double a1 = 2.0 * std::real(m(0, 1));
  const double a2 = -2.0 * std::imag(m(0, 1));
  const double a3 = std::real(m(0, 0) - m(1, 1));
  const double r = std::sqrt(a1 * a1 + a2 * a2 + a3 * a3);
  QubitMin out;
  out.value = 0.5 * (a0 - r);
  if (r > 0) {
    // ground Bloch vector points opposite the field (a1, a2, a3)
    const double n1 = -a1 / r, n2 = -a2 / r, n3 = -a3 / r;
    out.angles.theta = std::acos(std::clamp(n3, -1.0, 1.0));
    double phi = std::atan2(n2, n1);
    if (phi < 0) phi += 2 * std::numbers::pi;
    out.angles.phi = (std::abs(n1) + std::abs(n2) > 1e-15) ? phi : 0.0;
  }
  return out;
}

// 2x2 operator seen by `site` when every other qubit is fixed to its state in
// s: <alpha|result|alpha> = <alpha (x) rest| H |alpha (x) rest>.
inline Operator effective_local_hamiltonian(const Operator& h, const ProductState& s, int site) {
  const int l = qubit_count(h.rows());
  if (l != s.sites()) throw std::invalid_argument("effective_local_hamiltonian: qubit mismatch");
  if (site < 0 || site >= l)
    throw std::invalid_argument("effective_local_hamiltonian: site out of range");
  const Eigen::Index n = h.rows();

  std::vector<std::array<cxd, 2>> amp(l);
  for (int j = 0; j < l; ++j) {
    const PureState q = bloch_state(s.angles[j]);
    amp[j] = {q[0], q[1]};
  }
  PureState v0 = PureState::Zero(n), v1 = PureState::Zero(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    cxd p(1, 0);
    for (int j = 0; j < l; ++j) {
      if (j == site) continue;
      p *= amp[j][(x >> (l - 1 - j)) & 1];
    }
    if ((x >> (l - 1 - site)) & 1)
      v1[x] = p;
    else
      v0[x] = p;
  }
  const PureState w0 = h * v0, w1 = h * v1;
  Operator eff(2, 2);
  eff(0, 0) = v0.dot(w0);
  eff(0, 1) = v0.dot(w1);
  eff(1, 0) = v1.dot(w0);
  eff(1, 1) = v1.dot(w1);
  return 0.5 * (eff + eff.adjoint().eval());
}

// ---------------------------------------------------------------------------
// See-saw upper bound
// ---------------------------------------------------------------------------

struct SeesawParams {
  int restarts = 16;
  double tol = 1e-10;  // energy improvement per sweep that counts as progress
  int max_sweeps = 500;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SeesawResult {
  double value = 0.0;
  ProductState witness;
  bool converged = false;
  int sweeps = 0;
  int restart_id = 0;
};

namespace detail {

struct SweepOutcome {
  double value = 0.0;
  bool converged = false;
  int sweeps = 0;
  std::vector<double> sweep_energies;  // energy after each sweep, non-increasing
};

// cyclic single-site updates from the given start; monotone in energy
inline SweepOutcome seesaw_from(const Operator& h, ProductState& s, double tol, int max_sweeps) {
  const int l = s.sites();
  SweepOutcome out;
  double energy = std::numeric_limits<double>::infinity();
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    const double prev = energy;
    for (int site = 0; site < l; ++site) {
      const Operator eff = effective_local_hamiltonian(h, s, site);
      const PureState cur = bloch_state(s.angles[site]);
      const double here = std::real(cur.dot(eff * cur));
      const QubitMin qm = min_qubit_expectation(eff);
      // keep current angles on a degenerate 2x2 spectrum
      if (qm.value < here - 1e-13 * (1.0 + std::abs(here))) {
        s.angles[site] = qm.angles;
        energy = qm.value;
      } else {
        energy = std::min(here, energy);
      }
    }
    out.sweep_energies.push_back(energy);
    if (prev - energy < tol) {
      out.value = energy;
      out.converged = true;
      out.sweeps = sweep;
      return out;
    }
  }
  out.value = energy;
  out.converged = false;
  out.sweeps = max_sweeps;
  return out;
}

inline ProductState diagonal_start(const Operator& h, int l) {
  Eigen::Index best = 0;
  double best_val = std::real(h(0, 0));
  for (Eigen::Index x = 1; x < h.rows(); ++x)
    if (std::real(h(x, x)) < best_val) {
      best_val = std::real(h(x, x));
      best = x;
    }
  ProductState s;
  s.angles.resize(l);
  for (int j = 0; j < l; ++j)
    s.angles[j].theta = ((best >> (l - 1 - j)) & 1) ? std::numbers::pi : 0.0;
  return s;
}

inline ProductState random_start(int l, std::uint64_t seed) {
  Rng rng(seed);
  ProductState s;
  s.angles.resize(l);
  for (int j = 0; j < l; ++j) {
    s.angles[j].theta = std::acos(1.0 - 2.0 * rng.uniform());
    s.angles[j].phi = 2 * std::numbers::pi * rng.uniform();
  }
  return s;
}

}  // namespace detail

// Alternating minimization over product states. Restart 0 starts from the
// best computational basis state, which makes the result an upper bound on
// the minimal diagonal entry by construction; the others start uniformly at
// random from per-restart derived seeds.
inline SeesawResult seesaw(const Operator& h, int l, const SeesawParams& p) {
  if (l != qubit_count(h.rows())) throw std::invalid_argument("seesaw: qubit count mismatch");
  if (p.restarts < 1) throw std::invalid_argument("seesaw: restarts must be >= 1");

  std::vector<SeesawResult> results(p.restarts);
  parallel_for(p.restarts, p.threads, [&](int r) {
    ProductState s =
        (r == 0) ? detail::diagonal_start(h, l) : detail::random_start(l, derive_seed(p.seed, r));
    const auto out = detail::seesaw_from(h, s, p.tol, p.max_sweeps);
    results[r] = {out.value, std::move(s), out.converged, out.sweeps, r};
  });

  int best = 0;
  for (int r = 1; r < p.restarts; ++r)
    if (results[r].value < results[best].value) best = r;
  SeesawResult res = std::move(results[best]);
  res.value = product_expectation(h, res.witness);
  return res;
}

// ---------------------------------------------------------------------------
// Joint numerical range machinery
// ---------------------------------------------------------------------------

// Achievable points of the joint range, each carrying the state that attains
// it. Product-range mode stores the witnessing product state.
struct JointRangeInner {
  std::vector<Eigen::Vector4d> points;
  std::vector<ProductState> witnesses;  // empty when sampled from general states
};

inline JointRangeInner joint_range_inner(const PauliReduction& red,
                                         const std::vector<ProductState>& states) {
  JointRangeInner inner;
  for (const auto& s : states) {
    inner.points.push_back(red.point(materialize(s)));
    inner.witnesses.push_back(s);
  }
  return inner;
}

// Deterministic direction sequence on S^3: the 8 axis directions, then
// antipodal pairs taken from a Kronecker low-discrepancy sequence in Hopf
// coordinates. Prefixes are nested, so a larger budget only adds halfspaces.
inline std::vector<Eigen::Vector4d> direction_set(int budget) {
  std::vector<Eigen::Vector4d> dirs;
  for (int axis = 0; axis < 4; ++axis)
    for (double sign : {1.0, -1.0}) {
      Eigen::Vector4d e = Eigen::Vector4d::Zero();
      e[axis] = sign;
      dirs.push_back(e);
    }
  // root of x^4 = x + 1
  const double g = 1.2207440846057596;
  const double a1 = 1.0 / g, a2 = 1.0 / (g * g), a3 = 1.0 / (g * g * g);
  auto frac = [](double v) { return v - std::floor(v); };
  for (int k = 1; static_cast<int>(dirs.size()) < budget; ++k) {
    const double u = frac(0.5 + k * a1);
    const double v = frac(0.5 + k * a2);
    const double w = frac(0.5 + k * a3);
    const double eta = std::asin(std::sqrt(u));
    const double xi1 = 2 * std::numbers::pi * v;
    const double xi2 = 2 * std::numbers::pi * w;
    Eigen::Vector4d d(std::cos(eta) * std::cos(xi1), std::cos(eta) * std::sin(xi1),
                      std::sin(eta) * std::cos(xi2), std::sin(eta) * std::sin(xi2));
    dirs.push_back(d);
    dirs.push_back(-d);
  }
  return dirs;
}

// Directions nu with combine(nu) proportional to the identity; along them the
// joint range is flat, and a pair of halfspaces pins the polytope exactly.
// The residual norm is added to the offsets, so the cuts stay certified even
// if the detection is approximate.
inline std::vector<Halfspace> clamp_halfspaces(const PauliReduction& red) {
  const Eigen::Index d = red.rest_dim();
  std::array<Operator, 4> traceless;
  for (int i = 0; i < 4; ++i)
    traceless[i] =
        red.ops[i] - (red.ops[i].trace() / static_cast<double>(d)) * Operator::Identity(d, d);
  Eigen::Matrix4d gram;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      gram(i, j) = std::real((traceless[i].adjoint() * traceless[j]).trace());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(gram);
  const double top = std::max(es.eigenvalues().maxCoeff(), 1e-300);

  std::vector<Halfspace> out;
  const Eigen::Vector4d center = red.center();
  for (int k = 0; k < 4; ++k) {
    if (es.eigenvalues()(k) > 1e-16 * top) continue;
    const Eigen::Vector4d nu = es.eigenvectors().col(k);
    Operator residual = Operator::Zero(d, d);
    for (int i = 0; i < 4; ++i) residual += nu[i] * traceless[i];
    const double slack = residual.norm();  // Frobenius bounds the operator norm
    const double c = nu.dot(center);
    out.push_back({nu, c + slack});
    out.push_back({-nu, -c + slack});
  }
  return out;
}

// Certified upper bound on sup over the target set of c . x, as a callable on
// the direction-combined operator.
using SupportBound = std::function<double(const Operator&)>;

// exact lambda_max of the combined operator: supports of the full joint range W
inline SupportBound exact_support_bound() {
  return [](const Operator& combined) { return eigenvalues_sym(combined).maxCoeff(); };
}

// Outer polytope of the joint range from support values in the given
// directions. The direction set must span R^4 (and is expected to contain
// +-e_i so the polytope is bounded).
inline JointRangeOuter joint_range_outer(const PauliReduction& red, const SupportBound& bound,
                                         const std::vector<Eigen::Vector4d>& directions,
                                         int threads = 1) {
  if (directions.size() < 5)
    throw std::invalid_argument("joint_range_outer: need at least 5 directions");
  Eigen::MatrixXd dmat(directions.size(), 4);
  for (size_t i = 0; i < directions.size(); ++i) dmat.row(i) = directions[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dmat);
  if (svd.singularValues()(3) <= 1e-12 * svd.singularValues()(0))
    throw std::invalid_argument("joint_range_outer: directions do not span R^4");

  JointRangeOuter outer;
  outer.halfspaces.resize(directions.size());
  parallel_for(static_cast<int>(directions.size()), threads, [&](int i) {
    const Eigen::Vector4d c = directions[i].normalized();
    outer.halfspaces[i] = {c, bound(red.combine(c))};
  });
  return outer;
}

// ---------------------------------------------------------------------------
// Certified bounds on the product minimum / maximum
// ---------------------------------------------------------------------------

struct CertifiedParams {
  int direction_budget = 200;
  int refine_rounds = 48;          // targeted cuts at the current minimizing vertex
  Eigen::Index terminal_dim = 16;  // rest block solved exactly once this small
  SeesawParams seesaw;
  int threads = 1;
};

// Certified interval [lower, upper] around the product minimum, plus the
// product state attaining `upper`.
struct BoundsResult {
  double lower = 0.0;
  double upper = 0.0;
  ProductState witness;
  int direction_budget = 0;
  int depth = 0;
};

namespace detail {

inline double min_eig_2x2(const Operator& m) { return min_qubit_expectation(m).value; }

// number of peel levels the recursion uses for an l-qubit operator
inline int recursion_depth(int l, Eigen::Index terminal_dim) {
  int depth = 0;
  Eigen::Index rest = Eigen::Index{1} << l;
  while (rest > 2) {
    ++depth;
    rest /= 2;
    if (rest <= terminal_dim) break;
  }
  return depth;
}

// Certified lower bound on the product minimum of h over l qubits. The dual
// upper bound on the product maximum is -product_min_lower(-h).
inline double product_min_lower(const Operator& h, int l, const CertifiedParams& p, int depth) {
  if (h.rows() == 2) return min_eig_2x2(h);

  const PauliReduction red = pauli_reduce(h, 0);
  const Eigen::Index rest = red.rest_dim();
  const int rest_l = l - 1;
  const bool terminal = rest <= p.terminal_dim || rest_l == 1;

  SupportBound bound;
  if (terminal) {
    bound = exact_support_bound();
  } else {
    bound = [&](const Operator& combined) {
      return -product_min_lower(-combined, rest_l, p, depth + 1);
    };
  }

  const auto dirs = direction_set(p.direction_budget);
  const auto clamps = clamp_halfspaces(red);

  JointRangeOuter outer = joint_range_outer(red, bound, dirs, depth == 0 ? p.threads : 1);
  double scale = 1.0;
  for (const auto& hs : outer.halfspaces) scale = std::max(scale, std::abs(hs.offset));
  HalfspaceIntersection4 poly(1e4 * scale, scale);
  for (const auto& hs : outer.halfspaces) poly.add(hs);
  for (const auto& hs : clamps) poly.add(hs);

  auto best_vertex = [&]() {
    const auto& vs = poly.vertices();
    int arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vs.size(); ++i) {
      const double f = two_level_min(vs[i].x);
      if (f < best) {
        best = f;
        arg = static_cast<int>(i);
      }
    }
    return std::pair<double, Eigen::Vector4d>(best, vs[arg].x);
  };

  // Targeted refinement at the vertex v defining the bound. With u the unit
  // vector along the tail of v, every achievable x satisfies
  // (-1, u) . x = -2 (x0/2 - u . vec(x)/2) <= -2 f(x), so the support cut in
  // that direction removes v whenever f(v) still lies strictly below the
  // minimum over the range; failure to cut certifies that the bound has
  // converged to it.
  const double tol = 1e-11 * scale;
  for (int round = 0; round < p.refine_rounds; ++round) {
    const auto [fmin, vstar] = best_vertex();
    (void)fmin;
    Eigen::Vector4d c;
    const double r = vstar.tail<3>().norm();
    if (r > tol)
      c << -1.0, vstar[1] / r, vstar[2] / r, vstar[3] / r;
    else
      c << -1.0, 0.0, 0.0, 0.0;
    c.normalize();
    const double support = bound(red.combine(c));
    if (c.dot(vstar) <= support + tol) break;
    poly.add({c, support});
  }

  return best_vertex().first;
}

}  // namespace detail

// Certified upper bound on the product maximum; exact at a single qubit.
inline double certified_lambda_max_upper(const Operator& h, int l, const CertifiedParams& p) {
  return -detail::product_min_lower(-h, l, p, 0);
}

// Certified bracket around the product minimum: the lower bound comes from
// minimizing the concave two-level objective over an outer polytope of the
// joint range, the upper bound from the best see-saw product state.
inline BoundsResult certified_lambda_min(const Operator& h, int l, const CertifiedParams& p) {
  if (l < 1) throw std::invalid_argument("certified_lambda_min: need at least one qubit");
  BoundsResult res;
  res.direction_budget = p.direction_budget;
  if (h.rows() == 2) {
    const QubitMin qm = min_qubit_expectation(h);
    res.lower = res.upper = qm.value;
    res.witness.angles = {qm.angles};
    return res;
  }
  SeesawParams sp = p.seesaw;
  sp.threads = p.threads;
  const SeesawResult ss = seesaw(h, l, sp);
  res.upper = ss.value;
  res.witness = ss.witness;
  res.lower = detail::product_min_lower(h, l, p, 0);
  res.depth = detail::recursion_depth(l, p.terminal_dim);
  return res;
}

// ---------------------------------------------------------------------------
// Brute-force oracle for desk-scale validation
// ---------------------------------------------------------------------------

// Full (theta, phi) grid search over all qubits followed by one see-saw
// polish from the best grid point. L <= 3 only.
inline double brute_force_grid(const Operator& h, int l, int grid_per_angle) {
  if (l < 1 || l > 3) throw std::invalid_argument("brute_force_grid: L must be 1..3");
  if (grid_per_angle < 24)
    throw std::invalid_argument("brute_force_grid: grid_per_angle must be >= 24");
  if (qubit_count(h.rows()) != l) throw std::invalid_argument("brute_force_grid: dim mismatch");

  const int g = grid_per_angle;
  struct GridPoint {
    BlochAngles angles;
    std::array<cxd, 2> amp;
    double n1, n2, n3;  // Bloch vector
  };
  std::vector<GridPoint> grid;
  grid.reserve(static_cast<size_t>(g) * g);
  for (int t = 0; t < g; ++t)
    for (int f = 0; f < g; ++f) {
      GridPoint gp;
      gp.angles.theta = std::numbers::pi * t / (g - 1);
      gp.angles.phi = 2 * std::numbers::pi * f / g;
      const PureState q = bloch_state(gp.angles);
      gp.amp = {q[0], q[1]};
      gp.n1 = std::sin(gp.angles.theta) * std::cos(gp.angles.phi);
      gp.n2 = std::sin(gp.angles.theta) * std::sin(gp.angles.phi);
      gp.n3 = std::cos(gp.angles.theta);
      grid.push_back(gp);
    }

  // contract the top qubit of m with the single-qubit state u
  auto contract = [](const Operator& m, const std::array<cxd, 2>& u) {
    const Eigen::Index half = m.rows() / 2;
    Operator out = std::conj(u[0]) * u[0] * m.topLeftCorner(half, half);
    out += std::conj(u[0]) * u[1] * m.topRightCorner(half, half);
    out += std::conj(u[1]) * u[0] * m.bottomLeftCorner(half, half);
    out += std::conj(u[1]) * u[1] * m.bottomRightCorner(half, half);
    return out;
  };
  // expectation of a 2x2 matrix in Bloch form
  auto bloch_expect = [](const Operator& m, const GridPoint& gp) {
    const double a0 = std::real(m(0, 0) + m(1, 1));
    const double a1 = 2.0 * std::real(m(0, 1));
    const double a2 = -2.0 * std::imag(m(0, 1));
    const double a3 = std::real(m(0, 0) - m(1, 1));
    return 0.5 * (a0 + a1 * gp.n1 + a2 * gp.n2 + a3 * gp.n3);
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<BlochAngles> best_angles(l), current(l);
  auto descend = [&](auto&& self, const Operator& m, int depth) -> void {
    if (depth == l - 1) {
      for (const auto& gp : grid) {
        const double e = bloch_expect(m, gp);
        if (e < best) {
          best = e;
          current[depth] = gp.angles;
          best_angles = current;
        }
      }
      return;
    }
    for (const auto& gp : grid) {
      current[depth] = gp.angles;
      self(self, contract(m, gp.amp), depth + 1);
    }
  };
  descend(descend, h, 0);

  ProductState s;
  s.angles = best_angles;
  const auto polished = detail::seesaw_from(h, s, 1e-13, 200);
  return std::min(best, polished.value);
}

}  // namespace sepgap
