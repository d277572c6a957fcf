#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sepgap/hamiltonians.hpp"
#include "sepgap/rng.hpp"
#include "sepgap/tensor.hpp"

using namespace sepgap;

namespace {

Operator random_hermitian(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Operator m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cxd(rng.normal(), rng.normal());
  return 0.5 * (m + m.adjoint().eval());
}

PureState random_state(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  PureState v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cxd(rng.normal(), rng.normal());
  v.normalize();
  return v;
}

ProductState random_product(int l, std::uint64_t seed) {
  Rng rng(seed);
  ProductState s;
  s.angles.resize(l);
  for (auto& a : s.angles) {
    a.theta = std::acos(1.0 - 2.0 * rng.uniform());
    a.phi = 2 * std::numbers::pi * rng.uniform();
  }
  return s;
}

}  // namespace

TEST_CASE("kron basic identities") {
  const Operator i2 = pauli::identity();
  REQUIRE((kron(i2, i2) - Operator::Identity(4, 4)).norm() == 0.0);

  Operator zz_expected = Operator::Zero(4, 4);
  zz_expected(0, 0) = 1;
  zz_expected(1, 1) = -1;
  zz_expected(2, 2) = -1;
  zz_expected(3, 3) = 1;
  REQUIRE((kron(pauli::z(), pauli::z()) - zz_expected).norm() == 0.0);

  // hand expansion of sigma_x (x) sigma_x
  Operator xx_expected = Operator::Zero(4, 4);
  xx_expected(0, 3) = xx_expected(1, 2) = xx_expected(2, 1) = xx_expected(3, 0) = 1;
  REQUIRE((kron(pauli::x(), pauli::x()) - xx_expected).norm() == 0.0);
}

TEST_CASE("kron index layout") {
  const Operator a = random_hermitian(2, 11), b = random_hermitian(2, 12);
  const Operator k = kron(a, b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          REQUIRE(std::abs(k(i * 2 + p, j * 2 + q) - a(i, j) * b(p, q)) < 1e-15);
}

TEST_CASE("embed_local places operators with site 0 leftmost") {
  REQUIRE((embed_local(pauli::z(), 0, 1) - pauli::z()).norm() == 0.0);

  Eigen::Vector4d d_site0(1, 1, -1, -1);
  Eigen::Vector4d d_site1(1, -1, 1, -1);
  const Operator z0 = embed_local(pauli::z(), 0, 2);
  const Operator z1 = embed_local(pauli::z(), 1, 2);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(std::real(z0(i, i)) == d_site0[i]);
    REQUIRE(std::real(z1(i, i)) == d_site1[i]);
  }
  REQUIRE_THROWS_AS(embed_local(pauli::z(), 2, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(embed_local(pauli::z(), -1, 3), std::invalid_argument);
}

TEST_CASE("hermiticity preserved by construction operations") {
  const Operator a = random_hermitian(4, 21), b = random_hermitian(2, 22);
  REQUIRE(is_hermitian(kron(a, b)));
  REQUIRE(is_hermitian(embed_local(b, 2, 4)));
  const Operator rho = random_hermitian(8, 23);
  REQUIRE(is_hermitian(partial_trace(rho, {0, 2}, {2, 2, 2})));
}

TEST_CASE("expectation values") {
  const PureState psi = random_state(8, 31);
  REQUIRE_THAT(expectation(Operator::Identity(8, 8), psi),
               Catch::Matchers::WithinAbs(1.0, 1e-12));

  PureState zero(2);
  zero << 1, 0;
  REQUIRE_THAT(expectation(pauli::z(), zero), Catch::Matchers::WithinAbs(1.0, 1e-15));

  PureState bellish(4);
  bellish << 0, 1 / std::numbers::sqrt2, 1 / std::numbers::sqrt2, 0;
  REQUIRE_THAT(expectation(antidiag_two_qubit(0.0), bellish),
               Catch::Matchers::WithinAbs(0.0, 1e-14));

  REQUIRE_THROWS_AS(expectation(Operator::Identity(4, 4), psi), std::invalid_argument);
}

TEST_CASE("expectation bounded by the spectrum") {
  const Operator h = random_hermitian(16, 41);
  const auto sys = eigen_sym(h);
  for (int k = 0; k < 50; ++k) {
    const double e = expectation(h, random_state(16, 100 + k));
    REQUIRE(e >= sys.values(0) - 1e-9);
    REQUIRE(e <= sys.values(15) + 1e-9);
  }
}

TEST_CASE("product expectation matches closed forms") {
  // paper's two-qubit antidiagonal model at arbitrary angles
  const double a = 0.37;
  const Operator h2 = antidiag_two_qubit(a);
  Rng rng(51);
  for (int k = 0; k < 25; ++k) {
    ProductState s = random_product(2, 500 + k);
    const double t1 = s.angles[0].theta, t2 = s.angles[1].theta;
    const double p1 = s.angles[0].phi, p2 = s.angles[1].phi;
    const double closed =
        0.5 * std::sin(t1) * std::sin(t2) * (std::cos(p1 + p2) + a * std::cos(p1 - p2));
    REQUIRE_THAT(product_expectation(h2, s), Catch::Matchers::WithinAbs(closed, 1e-12));
  }

  // all-to-all corner Hamiltonian at arbitrary angles, L = 4
  const int l = 4;
  const Operator hl = all_to_all(l);
  for (int k = 0; k < 25; ++k) {
    ProductState s = random_product(l, 900 + k);
    double prod = std::pow(2.0, 1.0 - l), phase = 0.0;
    for (const auto& ang : s.angles) {
      prod *= std::sin(ang.theta);
      phase += ang.phi;
    }
    REQUIRE_THAT(product_expectation(hl, s),
                 Catch::Matchers::WithinAbs(prod * std::cos(phase), 1e-12));
  }

  // chain at arbitrary angles: sum of (z, x)-plane Bloch projections
  const double field = 0.7;
  const Operator chain = heisenberg_xz(3, field);
  for (int k = 0; k < 25; ++k) {
    ProductState s = random_product(3, 1300 + k);
    auto uz = [&](int i) { return std::cos(s.angles[i].theta); };
    auto ux = [&](int i) { return std::sin(s.angles[i].theta) * std::cos(s.angles[i].phi); };
    double closed = 0.0;
    for (int i = 0; i + 1 < 3; ++i) closed += uz(i) * uz(i + 1) + ux(i) * ux(i + 1);
    for (int i = 0; i < 3; ++i) closed -= field * uz(i);
    REQUIRE_THAT(product_expectation(chain, s), Catch::Matchers::WithinAbs(closed, 1e-12));
  }
}

TEST_CASE("product expectation analytic minimizers") {
  // the antialigned Neel chain reaches 1 - L for the h = 0 chain
  for (int l : {2, 5}) {
    ProductState s;
    s.angles.resize(l);
    for (int q = 0; q < l; ++q) s.angles[q].theta = (q % 2) ? std::numbers::pi : 0.0;
    REQUIRE_THAT(product_expectation(heisenberg_xz(l, 0.0), s),
                 Catch::Matchers::WithinAbs(1.0 - l, 1e-12));
  }
  // paper's H2 minimizer: theta = pi/2, phi1 + phi2 = pi, phi1 - phi2 = pi
  const double a = 0.6;
  ProductState s;
  s.angles = {{std::numbers::pi / 2, std::numbers::pi}, {std::numbers::pi / 2, 0.0}};
  REQUIRE_THAT(product_expectation(antidiag_two_qubit(a), s),
               Catch::Matchers::WithinAbs(-(1 + a) / 2, 1e-12));
}

TEST_CASE("materialized product states are normalized") {
  for (int k = 0; k < 20; ++k) {
    const ProductState s = random_product(5, 700 + k);
    REQUIRE_THAT(materialize(s).norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("partial trace factorized and entangled cases") {
  const Operator a = random_hermitian(2, 61), b = random_hermitian(4, 62);
  const Operator ab = kron(a, b);
  const Operator ra = partial_trace(ab, {0}, {2, 4});
  REQUIRE((ra - b.trace() * a).cwiseAbs().maxCoeff() < 1e-12);

  PureState bell(4);
  bell << 1 / std::numbers::sqrt2, 0, 0, 1 / std::numbers::sqrt2;
  const Operator rho_bell = bell * bell.adjoint();
  const Operator r0 = partial_trace(rho_bell, {0}, {2, 2});
  REQUIRE((r0 - 0.5 * Operator::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  const Operator rho = random_hermitian(8, 63);
  REQUIRE((partial_trace(rho, {0, 1, 2}, {2, 2, 2}) - rho).cwiseAbs().maxCoeff() == 0.0);

  REQUIRE_THROWS_AS(partial_trace(rho, {3}, {2, 2, 2}), std::invalid_argument);
  REQUIRE_THROWS_AS(partial_trace(rho, {0, 0}, {2, 2, 2}), std::invalid_argument);
}

TEST_CASE("partial trace preserves trace and positivity") {
  Rng rng(71);
  Operator v(8, 8);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) v(i, j) = cxd(rng.normal(), rng.normal());
  Operator rho = v * v.adjoint();
  rho /= rho.trace();

  for (const auto& keep : std::vector<std::vector<int>>{{0}, {1, 2}, {0, 2}}) {
    const Operator red = partial_trace(rho, keep, {2, 2, 2});
    REQUIRE_THAT(std::real(red.trace()), Catch::Matchers::WithinAbs(1.0, 1e-12));
    const auto vals = eigen_sym(red).values;
    REQUIRE(vals.minCoeff() >= -1e-10);
  }
}

TEST_CASE("reduced density matrix agrees with projector partial trace") {
  const PureState psi = random_state(32, 81);
  const Operator proj = psi * psi.adjoint();
  for (const auto& keep : std::vector<std::vector<int>>{{0}, {2, 4}, {1, 3}}) {
    Partition dims(5, 2);
    const Operator via_pt = partial_trace(proj, keep, dims);
    const Operator via_rdm = reduced_density_matrix(psi, keep, 5);
    REQUIRE((via_pt - via_rdm).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("eigen_sym orders and solves") {
  Operator d = Operator::Zero(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  const auto sys = eigen_sym(d);
  REQUIRE_THAT(sys.values(0), Catch::Matchers::WithinAbs(1.0, 1e-14));
  REQUIRE_THAT(sys.values(1), Catch::Matchers::WithinAbs(2.0, 1e-14));
  REQUIRE_THAT(sys.values(2), Catch::Matchers::WithinAbs(3.0, 1e-14));

  const auto h2 = eigen_sym(antidiag_two_qubit(0.5));
  const double expected[] = {-1.0, -0.5, 0.5, 1.0};
  for (int k = 0; k < 4; ++k)
    REQUIRE_THAT(h2.values(k), Catch::Matchers::WithinAbs(expected[k], 1e-12));

  // 2x2 block structure of the L=2 chain gives E0 = -2
  const auto chain = eigen_sym(heisenberg_xz(2, 0.0));
  REQUIRE_THAT(chain.values(0), Catch::Matchers::WithinAbs(-2.0, 1e-12));
}

TEST_CASE("eigen_sym residual and trace-sum contracts") {
  const Operator h = random_hermitian(32, 91);
  const auto sys = eigen_sym(h);
  const double hnorm = std::max(std::abs(sys.values(0)), std::abs(sys.values(31)));
  for (int k = 0; k < 32; ++k) {
    REQUIRE((h * sys.vectors.col(k) - sys.values(k) * sys.vectors.col(k)).norm() <=
            1e-9 * hnorm);
  }
  REQUIRE_THAT(sys.values.sum(), Catch::Matchers::WithinAbs(std::real(h.trace()), 1e-9 * 32));
  // eigenvectors orthonormal
  REQUIRE((sys.vectors.adjoint() * sys.vectors - Operator::Identity(32, 32)).norm() < 1e-10);
}

TEST_CASE("min_eig on closed-form cases") {
  REQUIRE_THAT(min_eig(all_to_all(3)).value, Catch::Matchers::WithinAbs(-1.0, 1e-12));
  REQUIRE_THAT(min_eig(Operator::Identity(8, 8)).value, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("min_eig iterative path matches a known tensor-sum spectrum") {
  // kron(A, I) + kron(I, B) has ground energy E0(A) + E0(B); N = 2048
  const Operator a = heisenberg_xz(6, 0.2), b = heisenberg_xz(5, 0.7);
  const double e_expected = min_eig(a).value + min_eig(b).value;
  const Operator big = kron(a, Operator::Identity(32, 32)) +
                       kron(Operator::Identity(64, 64), b);
  const auto ground = min_eig(big);
  REQUIRE_THAT(ground.value, Catch::Matchers::WithinAbs(e_expected, 1e-8));
  const double hnorm = big.cwiseAbs().rowwise().sum().maxCoeff();
  REQUIRE((big * ground.vector - ground.value * ground.vector).norm() <= 1e-9 * hnorm);
}

TEST_CASE("qubit_count rejects non powers of two") {
  REQUIRE(qubit_count(8) == 3);
  REQUIRE_THROWS_AS(qubit_count(12), std::invalid_argument);
}
