#include "doctest.h"

#include "ergo/evaluate.hpp"
#include "ergo/verify.hpp"

#include <cmath>
#include <stdexcept>

using namespace ergo;
using verify::ChainRecipe;
using verify::RecipeKind;

TEST_CASE("seeded generators are deterministic and salt-sensitive") {
  verify::Rng a(42), b(42), c(43);
  for (int i = 0; i < 20; ++i) {
    double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(a.uniform() != c.uniform());
  CHECK(verify::mix_seed(1, 2) != verify::mix_seed(1, 3));
  CHECK(verify::mix_seed(1, 2) == verify::mix_seed(1, 2));
}

TEST_CASE("chain recipes deliver their structural guarantees") {
  for (int n : {2, 3, 5, 8}) {
    for (std::uint64_t seed : {7ull, 19ull}) {
      FiniteChain rev = verify::random_chain(
          {RecipeKind::random_reversible, n, seed, 0.5});
      CHECK(rev.n_states() == n);
      CHECK(check_reversible(rev).reversible);

      FiniteChain lazy = verify::random_chain(
          {RecipeKind::lazy_reversible, n, seed, 0.5});
      CHECK(check_reversible(lazy).reversible);
      CHECK(check_nonneg_definite(lazy).result == Definiteness::nonnegative);

      FiniteChain sq = verify::random_chain(
          {RecipeKind::squared_reversible, n, seed, 0.5});
      CHECK(check_reversible(sq).reversible);
      CHECK(check_nonneg_definite(sq).result == Definiteness::nonnegative);

      if (n >= 3) {
        FiniteChain rot = verify::random_chain(
            {RecipeKind::rotation_mix, n, seed, 0.5});
        CHECK_FALSE(check_reversible(rot).reversible);
      }
    }
  }

  // identical recipes give identical kernels
  FiniteChain a = verify::random_chain({RecipeKind::random_general, 6, 5, 0.5});
  FiniteChain b = verify::random_chain({RecipeKind::random_general, 6, 5, 0.5});
  CHECK((a.kernel() - b.kernel()).cwiseAbs().maxCoeff() == 0.0);

  for (const auto& name : verify::recipe_names()) {
    auto kind = verify::recipe_from_name(name);
    REQUIRE(kind.has_value());
    CHECK(verify::recipe_name(*kind) == name);
  }
  CHECK_FALSE(verify::recipe_from_name("no_such_recipe").has_value());
}

TEST_CASE("perturbations report their exact kernel distance") {
  FiniteChain base =
      verify::random_chain({RecipeKind::lazy_reversible, 5, 11, 0.6});

  auto zero = verify::perturb_chain(base, 0.0, 99);
  CHECK(zero.dP == 0.0);
  CHECK((zero.chain.kernel() - base.kernel()).cwiseAbs().maxCoeff() == 0.0);

  for (double eps : {1e-4, 1e-3, 1e-2}) {
    auto p = verify::perturb_chain(base, eps, 123);
    CHECK(p.dP > 0.0);
    CHECK(p.dP <= 2.0 * eps + 1e-15);
    // the reported dP is the actual max row L1 distance
    double worst = 0.0;
    for (int x = 0; x < 5; ++x)
      worst = std::max(
          worst,
          (p.chain.kernel().row(x) - base.kernel().row(x)).cwiseAbs().sum());
    CHECK(p.dP == doctest::Approx(worst).epsilon(1e-14));
  }

  auto p1 = verify::perturb_chain(base, 1e-3, 7);
  auto p2 = verify::perturb_chain(base, 1e-3, 7);
  CHECK(p1.dP == p2.dP);
}

TEST_CASE("soundness sweeps are reproducible and clean at smoke scale") {
  ChainRecipe recipe{RecipeKind::lazy_reversible, 0, 2024, 0.5};
  auto r1 = verify::soundness_suite("atomic_rate", recipe, 6);
  auto r2 = verify::soundness_suite("atomic_rate", recipe, 6);
  CHECK(r1.violations == 0);
  CHECK(r1.violations == r2.violations);
  CHECK(r1.feasible_count == r2.feasible_count);
  CHECK(r1.worst_slack == r2.worst_slack);
  REQUIRE(r1.log.size() == r2.log.size());
  for (size_t i = 0; i < r1.log.size(); ++i) {
    CHECK(r1.log[i].seed == r2.log[i].seed);
    CHECK(r1.log[i].feasible_points == r2.log[i].feasible_points);
    CHECK(r1.log[i].worst_slack == r2.log[i].worst_slack);
  }
  CHECK(r1.bound == "atomic_rate");
  CHECK(r1.recipe == verify::recipe_name(RecipeKind::lazy_reversible));

  ChainRecipe general{RecipeKind::random_general, 0, 2024, 0.5};
  CHECK(verify::soundness_suite("hitmoment_bound", general, 6).violations == 0);
  CHECK(verify::soundness_suite("general_perturbation", general, 6).violations ==
        0);
  CHECK(verify::soundness_suite("gamma_series_bounds", general, 6).violations ==
        0);
}

TEST_CASE("identity, certificate, transfer, honesty suites at smoke scale") {
  for (const auto& rep : verify::identity_suite(31337, 6)) {
    INFO("identity: ", rep.name);
    CHECK(rep.trials > 0);
    CHECK(rep.failures == 0);
    CHECK(rep.worst_residual < 1e-9);
  }
  for (const auto& rep : verify::spectral_certificate_suite(31337, 10)) {
    INFO("certificate: ", rep.name);
    CHECK(rep.trials == 10);
    CHECK(rep.violations == 0);
  }
  for (const auto& rep : verify::moment_transfer_suite(31337, 6)) {
    INFO("transfer: ", rep.name);
    CHECK(rep.violations == 0);
    CHECK(rep.applicable > 0);
  }
  auto honesty = verify::feasibility_honesty_suite(31337, 60);
  CHECK(honesty.draws == 60);
  CHECK(honesty.inconsistencies == 0);
  CHECK(honesty.feasible_results > 0);
}

TEST_CASE("structural routing rejects chains by name") {
  FiniteChain rot = verify::random_chain({RecipeKind::rotation_mix, 5, 3, 0.5});
  eval::EvalRequest req;
  req.op = "atomic_rate";
  req.A = {1};
  auto rep = eval::evaluate_bound(rot, req);
  CHECK_FALSE(rep.admissible);
  CHECK(rep.rejection == "chain is not reversible");
  CHECK(rep.results.empty());

  // a two-member set with distinct rows is not an atom
  FiniteChain rev =
      verify::random_chain({RecipeKind::lazy_reversible, 5, 3, 0.5});
  req.A = {0, 1};
  auto rep2 = eval::evaluate_bound(rev, req);
  CHECK_FALSE(rep2.admissible);
  CHECK(rep2.rejection == "A is not an atom (rows on A differ)");

  // ops that need a target set refuse to guess one
  eval::EvalRequest no_set;
  no_set.op = "hitmoment_bound";
  CHECK_THROWS_WITH_AS(eval::evaluate_bound(rev, no_set),
                       doctest::Contains("needs a target set"),
                       std::invalid_argument);

  // unknown ops resolve to nothing
  CHECK(eval::canonical_op("hitmoment") == "hitmoment_bound");
  CHECK(eval::canonical_op("atomic_rate") == "atomic_rate");
  CHECK(eval::canonical_op("nonsense") == "");
}

TEST_CASE("split-route evaluation marks atoms infeasible, not inadmissible") {
  Eigen::MatrixXd P(2, 2);
  P << 0.7, 0.3, 0.2, 0.8;
  FiniteChain c2(P);
  eval::EvalRequest req;
  req.op = "split_moment";
  req.A = {1};  // singleton: always an atom
  auto rep = eval::evaluate_bound(c2, req);
  CHECK(rep.admissible);
  REQUIRE_FALSE(rep.results.empty());
  for (const auto& r : rep.results) {
    CHECK_FALSE(r.feasible.ok);
    bool window_listed = false;
    for (const auto& w : r.feasible.windows)
      if (w.name == "A is not an atom (split route needs delta < 1)") {
        window_listed = true;
        CHECK_FALSE(w.holds);
      }
    CHECK(window_listed);
  }
}

TEST_CASE("hitmoment evaluation reproduces the frozen two-state values") {
  Eigen::MatrixXd P(2, 2);
  P << 0.7, 0.3, 0.2, 0.8;
  FiniteChain c2(P);
  eval::EvalRequest req;
  req.op = "hitmoment";
  req.A = {1};
  req.lambdas = {1.1};
  auto rep = eval::evaluate_bound(c2, req);
  REQUIRE(rep.admissible);
  REQUIRE(rep.results.size() == 1);
  const auto& r = rep.results[0];
  REQUIRE(r.feasible.ok);
  double m_bound = bounds::kNaN, exact_sup = bounds::kNaN;
  for (const auto& [k, v] : r.constants) {
    if (k == "M_bound") m_bound = v;
    if (k == "exact_sup") exact_sup = v;
  }
  CHECK(m_bound == doctest::Approx(1.6121954657272821).epsilon(1e-12));
  CHECK(exact_sup == doctest::Approx(1.4347826086956526).epsilon(1e-12));
  CHECK(exact_sup <= m_bound);
}

TEST_CASE("abel residual vanishes on exact chains") {
  FiniteChain rev =
      verify::random_chain({RecipeKind::random_reversible, 6, 17, 0.5});
  CHECK(verify::abel_residual(rev, StateSet({2}, 6), 80) < 1e-11);
  CHECK(verify::abel_residual(rev, StateSet({0, 3, 4}, 6), 80) < 1e-11);
}
