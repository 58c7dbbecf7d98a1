#include "doctest.h"

#include "ergo/chain.hpp"
#include "ergo/splitting.hpp"
#include "oracles.hpp"

using namespace ergo;

namespace {

FiniteChain c2() { return FiniteChain(oracle::TwoState{0.3, 0.2}.kernel()); }

FiniteChain c3() {
  Eigen::MatrixXd P(3, 3);
  P << 0.5, 0.3, 0.2, 0.25, 0.5, 0.25, 0.2, 0.3, 0.5;
  return FiniteChain(P);
}

}  // namespace

TEST_CASE("split measure separates the two levels") {
  FiniteChain chain = c2();
  // minorize over the whole space: delta nu(y) = min_x P(x,y) = (0.2, 0.3)
  auto cert = find_minorization(chain, StateSet({0, 1}, 2));
  REQUIRE(cert.has_value());
  CHECK(cert->delta == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cert->nu(0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(cert->nu(1) == doctest::Approx(0.6).epsilon(1e-14));

  Eigen::VectorXd mu_star = split_measure(chain.pi(), *cert);
  REQUIRE(mu_star.size() == 4);
  CHECK(mu_star(0) == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(mu_star(1) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(mu_star(2) == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(mu_star(3) == doctest::Approx(0.3).epsilon(1e-13));
}

TEST_CASE("split chain over the full space reproduces the frozen example") {
  FiniteChain chain = c2();
  auto cert = find_minorization(chain, StateSet({0, 1}, 2));
  REQUIRE(cert.has_value());
  SplitChain split = build_split_chain(chain, *cert);

  // residual row for state 0: (P(0,.) - delta nu)/(1-delta) = (1, 0),
  // then split into levels: (0.5, 0 | 0.5, 0)
  CHECK(split.kernel(0, 0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(split.kernel(0, 1) == doctest::Approx(0.0));
  CHECK(split.kernel(0, 2) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(split.kernel(0, 3) == doctest::Approx(0.0));

  // pi*(A1) = delta pi(A) = 0.5
  double piA1 = 0.0;
  for (int a : split.atom) piA1 += split.split_pi(a);
  CHECK(piA1 == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(split.pi_invariance_residual < 1e-12);

  // every state is alive when A is the whole space
  CHECK(split.restricted.n_states() == 4);
}

TEST_CASE("split chain marginality: level sums reproduce the base law") {
  FiniteChain chain = c3();
  StateSet A({0, 1}, 3);
  auto cert = find_minorization(chain, A);
  REQUIRE(cert.has_value());
  SplitChain split = build_split_chain(chain, *cert);

  const int n = 3;
  Eigen::MatrixXd Kn = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  Eigen::MatrixXd Pn = Eigen::MatrixXd::Identity(n, n);
  for (int step = 1; step <= 25; ++step) {
    Kn = Kn * split.kernel;
    Pn = Pn * chain.kernel();
    for (int x = 0; x < n; ++x) {
      Eigen::VectorXd start = Eigen::VectorXd::Zero(2 * n);
      if (A.contains(x)) {
        start(x) = 1.0 - cert->delta;
        start(n + x) = cert->delta;
      } else {
        start(x) = 1.0;
      }
      Eigen::VectorXd law = Kn.transpose() * start;
      for (int y = 0; y < n; ++y)
        CHECK(law(y) + law(n + y) ==
              doctest::Approx(Pn(x, y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("split invariance and the restricted chain agree") {
  FiniteChain chain = c3();
  StateSet A({0, 2}, 3);
  auto cert = find_minorization(chain, A);
  REQUIRE(cert.has_value());
  SplitChain split = build_split_chain(chain, *cert);

  CHECK(split.pi_invariance_residual < 1e-12);
  for (int i = 0; i < split.restricted.n_states(); ++i) {
    int full = split.from_restricted[static_cast<size_t>(i)];
    CHECK(split.restricted.pi()(i) ==
          doctest::Approx(split.split_pi(full)).epsilon(1e-10));
    CHECK(split.to_restricted[static_cast<size_t>(full)] == i);
  }

  // pi*(A1) = delta pi(A) on the restricted chain as well
  double piA1 = 0.0;
  for (int a : split.atom_restricted.members())
    piA1 += split.restricted.pi()(a);
  double piA = chain.pi()(0) + chain.pi()(2);
  CHECK(piA1 == doctest::Approx(cert->delta * piA).epsilon(1e-12));

  // the atom really is an atom: identical rows on A1
  auto atoms = detect_atoms(split.restricted);
  bool atom_found = false;
  for (const auto& grp : atoms) {
    bool covers = true;
    for (int a : split.atom_restricted.members())
      covers = covers && grp.contains(a);
    atom_found = atom_found || covers;
  }
  CHECK(atom_found);
}

TEST_CASE("atomic certificates are refused by the splitter") {
  FiniteChain chain = c2();
  auto cert = find_minorization(chain, StateSet({1}, 2));
  REQUIRE(cert.has_value());
  CHECK(cert->delta == doctest::Approx(1.0));
  CHECK_THROWS_AS(build_split_chain(chain, *cert), AtomicCertificateError);
}

TEST_CASE("squared chain transfers the certificate with the frozen row") {
  FiniteChain chain = c2();
  StateSet A({1}, 2);
  auto cert = find_minorization(chain, A);
  REQUIRE(cert.has_value());
  SquaredTransfer sq = squared_chain(chain, *cert);

  // P^2 of the two-state chain
  Eigen::MatrixXd P2 = chain.kernel() * chain.kernel();
  CHECK((sq.squared.kernel() - P2).cwiseAbs().maxCoeff() < 1e-15);

  // delta_bar = delta^2 nu(A) = 0.8; nu_bar = nu(A) nu + nu(0) P(0,.)
  CHECK(sq.delta_bar == doctest::Approx(0.8).epsilon(1e-13));
  REQUIRE(sq.nu_bar.has_value());
  CHECK((*sq.nu_bar)(0) == doctest::Approx(0.30).epsilon(1e-13));
  CHECK((*sq.nu_bar)(1) == doctest::Approx(0.70).epsilon(1e-13));

  // transferred certificate minorizes the squared kernel
  REQUIRE(sq.cert.has_value());
  CHECK(sq.cert->delta == doctest::Approx(0.8).epsilon(1e-13));
  CHECK(sq.cert->valid(sq.squared));
}

TEST_CASE("squared chain certificate on a non-atomic set") {
  FiniteChain chain = c3();
  StateSet A({0, 1}, 3);
  auto cert = find_minorization(chain, A);
  REQUIRE(cert.has_value());
  SquaredTransfer sq = squared_chain(chain, *cert);
  CHECK(sq.delta_bar ==
        doctest::Approx(cert->delta * cert->delta *
                        (cert->nu(0) + cert->nu(1)))
            .epsilon(1e-13));
  REQUIRE(sq.cert.has_value());
  CHECK(sq.cert->valid(sq.squared));
  // the same nu works for the squared kernel
  CHECK((sq.cert->nu - cert->nu).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("squaring a period-two chain fails loudly") {
  Eigen::MatrixXd flip(2, 2);
  flip << 0.0, 1.0, 1.0, 0.0;
  FiniteChain chain(flip);
  auto cert = find_minorization(chain, StateSet({0}, 2));
  REQUIRE(cert.has_value());
  CHECK_THROWS_WITH_AS(squared_chain(chain, *cert),
                       doctest::Contains("period-two"),
                       std::invalid_argument);
}
