#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sepgap/hamiltonians.hpp"
#include "sepgap/tensor.hpp"

using namespace sepgap;

TEST_CASE("ising chain closed forms") {
  IsingInstance inst;
  inst.sites = 2;
  inst.add_coupling(0, 1, 1.0);
  const Operator h = ising_chain(inst);
  const Eigen::Vector4d expected(-1, 1, 1, -1);  // hand expansion of -Z(x)Z
  for (int x = 0; x < 4; ++x) REQUIRE(std::real(h(x, x)) == expected[x]);

  IsingInstance single;
  single.sites = 1;
  single.add_field(0, 1.0);
  const Operator hf = ising_chain(single);
  REQUIRE(std::real(hf(0, 0)) == -1.0);
  REQUIRE(std::real(hf(1, 1)) == 1.0);

  IsingInstance empty;
  empty.sites = 3;
  REQUIRE(ising_chain(empty).norm() == 0.0);
}

TEST_CASE("ising chain is diagonal and commutes with every Z_i") {
  IsingInstance inst;
  inst.sites = 4;
  inst.add_coupling(0, 1, 0.7);
  inst.add_coupling(1, 3, -1.1);
  inst.add_coupling(0, 2, 0.4);
  inst.add_field(2, 0.9);
  const Operator h = ising_chain(inst);
  Operator off = h;
  off.diagonal().setZero();
  REQUIRE(off.norm() == 0.0);
  for (int i = 0; i < 4; ++i) {
    const Operator zi = embed_local(pauli::z(), i, 4);
    REQUIRE((h * zi - zi * h).norm() == 0.0);
  }
}

TEST_CASE("ising instance file parsing") {
  std::istringstream in(
      "# toy instance\n"
      "0 1 1.0\n"
      "1 2 -0.5   # edge\n"
      "0 0.25\n"
      "\n"
      "2 -1.0\n");
  const IsingInstance inst = parse_ising(in);
  REQUIRE(inst.sites == 3);
  REQUIRE(inst.couplings.at({0, 1}) == 1.0);
  REQUIRE(inst.couplings.at({1, 2}) == -0.5);
  REQUIRE(inst.fields.at(0) == 0.25);
  REQUIRE(inst.fields.at(2) == -1.0);

  std::istringstream bad("0 1 x\n");
  REQUIRE_THROWS_AS(parse_ising(bad), std::invalid_argument);
}

TEST_CASE("heisenberg_xz structure") {
  REQUIRE_THROWS_AS(heisenberg_xz(1, 0.0), std::invalid_argument);

  const Operator h = heisenberg_xz(3, 0.8);
  REQUIRE(is_hermitian(h));
  REQUIRE(h.imag().norm() == 0.0);

  // field enters exactly as -h * sum_i Z_i
  Operator field = Operator::Zero(8, 8);
  for (int i = 0; i < 3; ++i) field += embed_local(pauli::z(), i, 3);
  REQUIRE((h - (heisenberg_xz(3, 0.0) - 0.8 * field)).norm() == 0.0);

  // coupling part against an embed_local construction
  Operator built = Operator::Zero(8, 8);
  for (int i = 0; i + 1 < 3; ++i) {
    built += embed_local(pauli::z(), i, 3) * embed_local(pauli::z(), i + 1, 3);
    built += embed_local(pauli::x(), i, 3) * embed_local(pauli::x(), i + 1, 3);
  }
  REQUIRE((heisenberg_xz(3, 0.0) - built).norm() == 0.0);

  REQUIRE_THAT(min_eig(heisenberg_xz(2, 0.0)).value, Catch::Matchers::WithinAbs(-2.0, 1e-12));
}

TEST_CASE("antidiagonal models") {
  const Operator h2 = antidiag_two_qubit(0.3);
  REQUIRE(is_hermitian(h2));
  const auto vals = eigen_sym(h2).values;
  REQUIRE_THAT(vals(0), Catch::Matchers::WithinAbs(-1.0, 1e-12));
  REQUIRE_THAT(vals(1), Catch::Matchers::WithinAbs(-0.3, 1e-12));
  REQUIRE_THAT(vals(2), Catch::Matchers::WithinAbs(0.3, 1e-12));
  REQUIRE_THAT(vals(3), Catch::Matchers::WithinAbs(1.0, 1e-12));

  const Operator hl = all_to_all(4);
  REQUIRE((hl.cwiseAbs().sum()) == 2.0);  // exactly two unit entries
  REQUIRE(std::real(hl(0, 15)) == 1.0);
  REQUIRE(std::real(hl(15, 0)) == 1.0);
  REQUIRE((all_to_all(2) - antidiag_two_qubit(0.0)).norm() == 0.0);

  // a = (0, 1, 0) gives E0 = -1
  const Operator fam = antidiag_family({0.0, 1.0, 0.0});
  REQUIRE_THAT(min_eig(fam).value, Catch::Matchers::WithinAbs(-1.0, 1e-12));
  REQUIRE(antidiag_family({0.0, 0.0}).norm() == 0.0);

  // restriction to L = 2 reproduces the two-qubit model
  REQUIRE((antidiag_family({1.0, 0.45}) - antidiag_two_qubit(0.45)).norm() == 0.0);
}

TEST_CASE("goe sampling is deterministic and exactly symmetric") {
  const GoeSpec spec{64, 1234567};
  const Operator a = goe_sample(spec), b = goe_sample(spec);
  REQUIRE((a - b).norm() == 0.0);
  REQUIRE((a - a.transpose()).norm() == 0.0);
  REQUIRE(a.imag().norm() == 0.0);
  const Operator c = goe_sample({64, 7654321});
  REQUIRE((a - c).norm() != 0.0);
}

TEST_CASE("goe normalization matches <Tr H^2> ~ N") {
  const Eigen::Index n = 64;
  double acc = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Operator h = goe_sample({n, derive_seed(99, k)});
    acc += std::real((h * h).trace());
  }
  REQUIRE_THAT(acc / 200, Catch::Matchers::WithinAbs(64.0, 5.0));
}

TEST_CASE("goe off-diagonal variance within 10 percent") {
  const Eigen::Index n = 128;
  double sq = 0.0;
  int count = 0;
  const Operator h = goe_sample({n, 4242});
  for (Eigen::Index i = 0; i < n && count < 20000; ++i)
    for (Eigen::Index j = i + 1; j < n && count < 20000; ++j) {
      sq += std::norm(h(i, j));
      ++count;
    }
  const double var = sq / count;
  REQUIRE(var > 0.9 / n);
  REQUIRE(var < 1.1 / n);
}

TEST_CASE("goe ground energy approaches -2") {
  double acc = 0.0;
  const int samples = 20;
  for (int k = 0; k < samples; ++k)
    acc += eigenvalues_sym(goe_sample({256, derive_seed(7, k)}))(0);
  REQUIRE_THAT(acc / samples, Catch::Matchers::WithinAbs(-2.0, 0.15));
}

TEST_CASE("analytic reference values") {
  REQUIRE_THAT(analytic::gap_slope(), Catch::Matchers::WithinAbs(0.27324, 1e-5));
  REQUIRE(analytic::heisenberg_lambda_min(6) == -5.0);
  REQUIRE_THAT(analytic::neel_minimum_field(), Catch::Matchers::WithinAbs(2.8284271, 1e-6));
  REQUIRE(analytic::h2_lambda_min(0.5) == -0.75);
  REQUIRE(analytic::h2_gap(0.25) == 0.375);
  REQUIRE(analytic::all_to_all_lambda_min_mag(4) == 0.125);
  REQUIRE_THAT(analytic::antidiag_family_lambda_min_mag({0.5, -1.5, 2.0}),
               Catch::Matchers::WithinAbs(1.0, 1e-15));
}

TEST_CASE("strong field kills the separability gap per site") {
  const int l = 6;
  const double h = 50.0;
  const Operator chain = heisenberg_xz(l, h);
  const double e0 = min_eig(chain).value;
  // the aligned +z product state is essentially optimal at strong fields
  ProductState aligned;
  aligned.angles.resize(l);
  const double lambda_up = product_expectation(chain, aligned);
  REQUIRE((lambda_up - e0) / l < 0.01);
}
