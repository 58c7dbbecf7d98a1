#include "doctest.h"

#include "ergo/bounds.hpp"

#include <cmath>
#include <stdexcept>

using namespace ergo::bounds;

TEST_CASE("bound curves evaluate and sum in closed form") {
  BoundCurve c;
  c.add_geometric(3.0, 0.5);
  c.add_geometric(-1.0, 0.25);
  c.add_linear_geometric(0.7, 0.8);

  auto direct = [&](int n) {
    return 3.0 * std::pow(0.5, n) - std::pow(0.25, n) +
           0.7 * n * std::pow(0.8, n);
  };
  double run = 0.0;
  for (int n = 0; n <= 40; ++n) {
    CHECK(c(n) == doctest::Approx(direct(n)).epsilon(1e-13));
    CHECK(c.prefix_sum(n) == doctest::Approx(run).epsilon(1e-12));
    run += direct(n);
  }
  // total = 3/(1-.5) - 1/(1-.25) + 0.7*0.8/0.04
  CHECK(c.total_sum() ==
        doctest::Approx(6.0 - 4.0 / 3.0 + 14.0).epsilon(1e-13));
  CHECK(c.total_sum() == doctest::Approx(c.prefix_sum(400)).epsilon(1e-12));

  BoundCurve flat;
  flat.add_linear_geometric(2.0, 1.0);
  CHECK(flat.prefix_sum(5) == doctest::Approx(2.0 * 10.0));  // 2 sum_{m<5} m
  CHECK(std::isinf(flat.total_sum()));

  BoundCurve empty;
  CHECK(empty.empty());
  CHECK(empty(7) == 0.0);
  CHECK(empty.total_sum() == 0.0);
}

TEST_CASE("gamma sequences: heads, tails, capping") {
  GammaSequence g = GammaSequence::capped_geometric(9.0, 0.5);
  // 9, 4.5, 2.25 all exceed 2 and are capped; 9*0.5^3 = 1.125 is not
  REQUIRE(g.head.size() == 3);
  for (double h : g.head) CHECK(h == 2.0);
  CHECK(g.at(0) == 2.0);
  CHECK(g.at(3) == doctest::Approx(1.125));
  double run = 0.0;
  for (int n = 0; n <= 30; ++n) {
    CHECK(g.partial_sum(n) == doctest::Approx(run).epsilon(1e-13));
    run += g.at(n);
  }
  CHECK(g.total() == doctest::Approx(6.0 + 1.125 / 0.5).epsilon(1e-13));
  CHECK(g.summable());

  GammaSequence flat = GammaSequence::constant(0.3);
  CHECK_FALSE(flat.summable());
  CHECK(std::isinf(flat.total()));
  CHECK(flat.partial_sum(10) == doctest::Approx(3.0));

  CHECK_THROWS_AS(GammaSequence::capped_geometric(2.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("gamma series perturbation bounds") {
  auto out = gamma_series_bounds(GammaSequence::geometric(1.2, 0.5), 0.1);
  REQUIRE(out.feasible.ok);
  CHECK(out.gamma_total == doctest::Approx(2.4).epsilon(1e-13));
  CHECK(out.stationary_bound == doctest::Approx(0.24).epsilon(1e-13));
  CHECK(out.kernel_bound(2) == doctest::Approx(0.18).epsilon(1e-13));

  auto bad = gamma_series_bounds(GammaSequence::geometric(1.2, 0.5), -0.1);
  CHECK_FALSE(bad.feasible.ok);
  CHECK(bad.feasible.reason == "dP >= 0");
}

TEST_CASE("uniform geometric gamma: direct sum vs printed formula") {
  auto a = uniform_geometric_gamma(2.0, 0.5, 1.0);
  REQUIRE(a.feasible.ok);
  CHECK(a.gamma_total_direct == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(a.formula_agrees);
  CHECK(a.gamma_total_formula == doctest::Approx(4.0).epsilon(1e-13));

  auto b = uniform_geometric_gamma(1.2, 0.5, 1.0);
  REQUIRE(b.feasible.ok);
  CHECK(b.capped_terms == 0);
  CHECK(b.gamma_total_direct == doctest::Approx(2.4).epsilon(1e-13));
  CHECK(b.formula_agrees);

  // C < 2 rho: the closed form goes negative while the direct sum is exact
  auto c = uniform_geometric_gamma(0.5, 0.9, 1.0);
  REQUIRE(c.feasible.ok);
  CHECK(c.gamma_total_direct == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(c.floor_index == -14);
  CHECK(c.gamma_total_formula ==
        doctest::Approx(-6.329410214043616).epsilon(1e-12));
  CHECK_FALSE(c.formula_agrees);
  CHECK(c.stationary_bound == doctest::Approx(5.0).epsilon(1e-13));

  // kernel bounds increase to the stationary total
  double prev = -1.0;
  for (int n = 0; n <= 50; ++n) {
    double kb = a.kernel_bound(n);
    CHECK(kb >= prev);
    prev = kb;
  }
  CHECK(a.kernel_bound(2000) == doctest::Approx(4.0).epsilon(1e-12));

  CHECK_FALSE(uniform_geometric_gamma(2.0, 1.0, 0.1).feasible.ok);
  CHECK_FALSE(uniform_geometric_gamma(0.0, 0.5, 0.1).feasible.ok);
}

TEST_CASE("contraction-coefficient perturbation bound") {
  auto out = dobrushin_perturbation(0.5, 1, 0.01);
  REQUIRE(out.feasible.ok);
  CHECK(out.stationary_bound == doctest::Approx(0.04).epsilon(1e-13));
  CHECK(out.kernel_bound(1) == doctest::Approx(0.02).epsilon(1e-13));
  CHECK(out.kernel_bound(100000) ==
        doctest::Approx(out.stationary_bound).epsilon(1e-12));

  auto bad = dobrushin_perturbation(0.5, 0, 0.01);
  CHECK_FALSE(bad.feasible.ok);
  CHECK(bad.feasible.reason == "N >= 1");
  CHECK_FALSE(dobrushin_perturbation(1.0, 1, 0.01).feasible.ok);
}

TEST_CASE("return-moment bound on the frozen two-state chain") {
  const double M = 10.0 / 3.0;
  auto out = hitmoment_bound(M, 1.1);
  REQUIRE(out.feasible.ok);
  CHECK(out.window_hi == doctest::Approx(1.3498588075760032).epsilon(1e-15));
  CHECK(out.bound == doctest::Approx(1.6121954657272821).epsilon(1e-14));

  CHECK_FALSE(hitmoment_bound(M, 1.36).feasible.ok);
  CHECK(hitmoment_bound(M, 1.36).feasible.reason == "lambda < e^{1/M}");
  CHECK_FALSE(hitmoment_bound(M, 1.0).feasible.ok);

  // M = 0 means instant return; the window is unbounded and the moment is
  // lambda itself
  auto inst = hitmoment_bound(0.0, 5.0);
  REQUIRE(inst.feasible.ok);
  CHECK(std::isinf(inst.window_hi));
  CHECK(inst.bound == doctest::Approx(5.0));
}

TEST_CASE("atomic rate constants match the frozen values") {
  const double M = 10.0 / 3.0;
  auto out = atomic_rate(M, 0.6, 1.1);
  REQUIRE(out.feasible.ok);
  CHECK(out.C1 == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
  CHECK(out.M1 == doctest::Approx(1.6121954657272821).epsilon(1e-14));
  CHECK(out.D1 == doctest::Approx(-1.0266938811969575).epsilon(1e-12));
  CHECK(out.E1 == doctest::Approx(3.577771231125643).epsilon(1e-12));
  CHECK(out.curve(0) == doctest::Approx(2.5510773499286854).epsilon(1e-12));

  // the curve really is D1 e^{-n/M} + E1 lambda^{-n}
  for (int n : {1, 5, 20})
    CHECK(out.curve(n) ==
          doctest::Approx(out.D1 * std::exp(-n / M) +
                          out.E1 * std::pow(1.1, -n))
              .epsilon(1e-13));

  CHECK_FALSE(atomic_rate(M, 0.0, 1.1).feasible.ok);
  CHECK_FALSE(atomic_rate(-1.0, 0.6, 1.1).feasible.ok);
}

TEST_CASE("atomic perturbation factors agree with the curve transform") {
  const double M = 10.0 / 3.0;
  const double dP = 0.01;
  auto out = atomic_perturbation(M, 0.6, 1.1, dP);
  REQUIRE(out.feasible.ok);
  CHECK(out.stationary_bound ==
        doctest::Approx(35.39419473613401 * dP).epsilon(1e-12));
  CHECK(out.stationary_bound ==
        doctest::Approx(out.rate.curve.total_sum() * dP).epsilon(1e-12));
  for (int n : {0, 1, 3, 10, 60})
    CHECK(out.kernel_bound(n) ==
          doctest::Approx(out.rate.curve.prefix_sum(n) * dP).epsilon(1e-12));
  CHECK(out.kernel_bound(4000) ==
        doctest::Approx(out.stationary_bound).epsilon(1e-12));

  CHECK_FALSE(atomic_perturbation(M, 0.6, 1.1, -1e-3).feasible.ok);
}

TEST_CASE("split moment constants and the sufficient quadratic root") {
  const double M = 10.0 / 3.0;
  auto out = split_moment_constants(1.5, 1.2, 0.5, M, 1.15);
  REQUIRE(out.feasible_i.ok);
  CHECK(out.alpha == doctest::Approx(3.2239010857415455).epsilon(1e-13));
  CHECK(out.beta == doctest::Approx(out.alpha).epsilon(1e-13));
  CHECK(out.K == doctest::Approx(1.2).epsilon(1e-13));
  CHECK(out.atom_moment_bound ==
        doctest::Approx(3.642741026107118).epsilon(1e-12));
  CHECK(out.lambda_quadratic ==
        doctest::Approx(1.088533865071371).epsilon(1e-13));

  // the root really solves delta M l^2 + (M+1)(1-delta) l = M+1
  const double l = out.lambda_quadratic;
  CHECK(0.5 * M * l * l + (M + 1.0) * 0.5 * l - (M + 1.0) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  // part (ii) at 1.05 sits inside the window, 1.1 does not
  auto ok = split_moment_constants(1.5, 1.2, 0.5, M, 1.05);
  REQUIRE(ok.feasible_ii.ok);
  CHECK(ok.M2 == doctest::Approx(2.3129451623308963).epsilon(1e-12));
  auto no = split_moment_constants(1.5, 1.2, 0.5, M, 1.1);
  CHECK_FALSE(no.feasible_ii.ok);
  CHECK(no.feasible_ii.reason.substr(0, 4) == "lmd1");

  // lambdas below the quadratic root are always inside the lmd1 window
  auto near = split_moment_constants(1.5, 1.2, 0.5, M, l * 0.999);
  CHECK(near.feasible_ii.ok);

  // above K the moment series certificate fails
  auto far = split_moment_constants(1.5, 1.2, 0.5, M, 1.25);
  CHECK_FALSE(far.feasible_i.ok);
  CHECK(far.feasible_i.reason == "lambda < K");
}

TEST_CASE("minorized (non-atomic) rate constants") {
  const double M = 10.0 / 3.0;
  auto out = nonatomic_rate(M, 0.5, 0.6, 1.05);
  REQUIRE(out.feasible.ok);
  CHECK(out.C2 == doctest::Approx(1.5275252316519468).epsilon(1e-13));
  CHECK(out.M2 == doctest::Approx(2.3129451623308963).epsilon(1e-12));
  CHECK(out.D2 == doctest::Approx(2.56829497429389).epsilon(1e-12));
  CHECK(out.E2 == doctest::Approx(0.16824200451846455).epsilon(1e-12));
  CHECK(out.curve(0) == doctest::Approx(out.D2).epsilon(1e-13));
  CHECK(out.curve(4) ==
        doctest::Approx((out.D2 + 4.0 * out.E2) * std::pow(1.05, -4))
            .epsilon(1e-13));

  auto no = nonatomic_rate(M, 0.5, 0.6, 1.1);
  CHECK_FALSE(no.feasible.ok);
  CHECK(no.feasible.reason.substr(0, 4) == "lmd1");

  auto pert = nonatomic_perturbation(M, 0.5, 0.6, 1.05, 0.001);
  REQUIRE(pert.feasible.ok);
  CHECK(pert.stationary_bound ==
        doctest::Approx(124.59583635792663 * 0.001).epsilon(1e-12));
  CHECK(pert.stationary_bound ==
        doctest::Approx(pert.rate.curve.total_sum() * 0.001).epsilon(1e-12));
  for (int n : {0, 2, 9, 33})
    CHECK(pert.kernel_bound(n) ==
          doctest::Approx(pert.rate.curve.prefix_sum(n) * 0.001)
              .epsilon(1e-12));
}

TEST_CASE("geometric radii for the base chain and the skeleton transfer") {
  auto out = geometric_rate_constants(1.5, 1.2, 0.5, 0.6, 0.0);
  REQUIRE(out.feasible_K.ok);
  CHECK(out.alpha == doctest::Approx(3.2239010857415455).epsilon(1e-13));
  CHECK(out.K == doctest::Approx(1.2).epsilon(1e-13));
  REQUIRE(out.feasible_Gamma.ok);
  CHECK(out.gamma_exponent ==
        doctest::Approx(4.785628438387018).epsilon(1e-12));
  CHECK(out.Gamma_rate == doctest::Approx(1.0345430053419797).epsilon(1e-12));

  // atom limit: the radius saturates at kappa
  auto atom = geometric_rate_constants(1.5, 1.2, 1.0, 0.6, 0.0);
  REQUIRE(atom.feasible_K.ok);
  CHECK(std::isinf(atom.alpha));
  CHECK(atom.K == doctest::Approx(1.2));

  CHECK_FALSE(geometric_rate_constants(1.5, 1.2, 0.5, 0.0, 0.0)
                  .feasible_Gamma.ok);
  CHECK_FALSE(geometric_rate_constants(1.5, 1.2, 0.5, 0.6, 1.0)
                  .feasible_Gamma.ok);
  CHECK_FALSE(geometric_rate_constants(1.1, 1.2, 0.5, 0.6, 0.0).feasible_K.ok);
}

namespace {

// exact even-return series of the frozen two-state chain at A = {1}:
// sum_n s^{2n} F^{2n} = 0.06 s^2 / (1 - 0.49 s^2), radius 1/0.7
double c2_even_series(double s) {
  const double s2 = s * s;
  if (0.49 * s2 >= 1.0) return kInf;
  return 0.06 * s2 / (1.0 - 0.49 * s2);
}

}  // namespace

TEST_CASE("reversible atomic rate: branch selection around the radius") {
  const double M = 10.0 / 3.0;
  const double varrho = std::sqrt(1.0 / 0.55);

  auto out = reversible_atomic_rate(M, 0.6, c2_even_series, 1.1);
  REQUIRE(out.feasible.ok);
  CHECK(out.skeleton_radius == doctest::Approx(varrho).epsilon(1e-10));
  CHECK_FALSE(out.equal_branch);
  CHECK_FALSE(out.near_equal_warning);
  // F1 = C1 (1 - q M1) with q = (varrho-1)/(varrho-lambda)
  const double q = (out.skeleton_radius - 1.0) / (out.skeleton_radius - 1.1);
  CHECK(out.F1 == doctest::Approx(out.C1 * (1.0 - q * out.M1)).epsilon(1e-12));
  CHECK(out.G1 ==
        doctest::Approx(out.M1 * ((2.0 - out.C1) / 1.1 + q * out.C1))
            .epsilon(1e-12));
  for (int n : {0, 3, 12})
    CHECK(out.curve(n) ==
          doctest::Approx(out.F1 * std::pow(out.skeleton_radius, -n) +
                          out.G1 * std::pow(1.1, -n))
              .epsilon(1e-12));

  // evaluating exactly at the radius switches to the linear branch
  auto eq = reversible_atomic_rate(M, 0.6, c2_even_series,
                                   out.skeleton_radius);
  REQUIRE(eq.feasible.ok);
  CHECK(eq.equal_branch);
  CHECK(eq.J1 == doctest::Approx(329.11159575328634).epsilon(1e-8));
  CHECK(eq.K1 == doctest::Approx(78.9090939179359).epsilon(1e-8));

  // slightly off the radius: flagged as ill-conditioned, and the two-branch
  // curve stays close to the linear one
  auto near = reversible_atomic_rate(M, 0.6, c2_even_series,
                                     out.skeleton_radius * (1.0 - 1e-7));
  REQUIRE(near.feasible.ok);
  CHECK_FALSE(near.equal_branch);
  CHECK(near.near_equal_warning);
  for (int n = 0; n <= 50; ++n)
    CHECK(near.curve(n) == doctest::Approx(eq.curve(n)).epsilon(1e-3));

  // divergent even-return mass at s = 1 is rejected by name
  auto bad = reversible_atomic_rate(M, 0.6, [](double) { return 1.5; }, 1.1);
  CHECK_FALSE(bad.feasible.ok);
  CHECK(bad.feasible.reason == "even-return mass at s=1 below 1");

  // a series that never reaches 1 pushes the radius to the moment window
  auto wide = reversible_atomic_rate(M, 0.6, [](double) { return 0.5; }, 1.1);
  REQUIRE(wide.feasible.ok);
  CHECK(wide.skeleton_radius ==
        doctest::Approx(std::exp(1.0 / M)).epsilon(1e-12));
}

TEST_CASE("reversible atomic perturbation follows the active branch") {
  const double M = 10.0 / 3.0;
  auto rate = reversible_atomic_rate(M, 0.6, c2_even_series, 1.1);
  auto pert = reversible_perturbation(rate, 0.002);
  REQUIRE(pert.feasible.ok);
  CHECK(pert.atomic_route);
  CHECK(pert.stationary_bound ==
        doctest::Approx(rate.curve.total_sum() * 0.002).epsilon(1e-12));
  for (int n : {0, 1, 7, 40})
    CHECK(pert.kernel_bound(n) ==
          doctest::Approx(rate.curve.prefix_sum(n) * 0.002).epsilon(1e-12));

  auto eq_rate =
      reversible_atomic_rate(M, 0.6, c2_even_series, rate.skeleton_radius);
  auto eq_pert = reversible_perturbation(eq_rate, 0.002);
  REQUIRE(eq_pert.feasible.ok);
  CHECK(eq_pert.equal_branch);
  CHECK(eq_pert.stationary_bound ==
        doctest::Approx(eq_rate.curve.total_sum() * 0.002).epsilon(1e-12));
  CHECK(eq_pert.kernel_bound(5000) ==
        doctest::Approx(eq_pert.stationary_bound).epsilon(1e-10));
}

TEST_CASE("reversible minorized rate and its perturbation") {
  const double M = 10.0 / 3.0;
  auto out = reversible_nonatomic_rate(M, 0.5, 0.6, 0.6, 0.05, 1.005);
  REQUIRE(out.feasible.ok);
  CHECK(out.C3 == doctest::Approx(3.1797973380564852).epsilon(1e-13));
  CHECK(out.M3 == doctest::Approx(3.16738151477582).epsilon(1e-11));
  CHECK(out.D3 == doctest::Approx(3.195696324746767).epsilon(1e-11));
  CHECK(out.E3 == doctest::Approx(0.05023288750033065).epsilon(1e-11));

  auto tight = reversible_nonatomic_rate(M, 0.5, 0.6, 0.6, 0.1, 1.02);
  CHECK_FALSE(tight.feasible.ok);
  CHECK(tight.feasible.reason.substr(0, 4) == "thtt");

  auto pert = reversible_perturbation(out, 0.0005);
  REQUIRE(pert.feasible.ok);
  CHECK_FALSE(pert.atomic_route);
  CHECK(pert.stationary_bound ==
        doctest::Approx(2661.6970387874917 * 0.0005).epsilon(1e-10));
  CHECK(pert.stationary_bound ==
        doctest::Approx(out.curve.total_sum() * 0.0005).epsilon(1e-10));
  for (int n : {0, 4, 25})
    CHECK(pert.kernel_bound(n) ==
          doctest::Approx(out.curve.prefix_sum(n) * 0.0005).epsilon(1e-10));
}

TEST_CASE("general stationary perturbation and its threshold") {
  const double M = 10.0 / 3.0;
  auto probe = general_perturbation(M, 1.1, 0.0);
  REQUIRE(probe.feasible.ok);
  CHECK(probe.M0 == doctest::Approx(1.4656322415702563).epsilon(1e-14));
  CHECK(probe.threshold ==
        doctest::Approx(0.025156719317399576).epsilon(1e-13));
  CHECK(probe.stationary_bound == doctest::Approx(0.0));

  // at half the threshold the bound collapses to M0 exactly
  auto half = general_perturbation(M, 1.1, probe.threshold / 2.0);
  REQUIRE(half.feasible.ok);
  CHECK(half.stationary_bound == doctest::Approx(half.M0).epsilon(1e-12));

  auto at = general_perturbation(M, 1.1, probe.threshold);
  CHECK_FALSE(at.feasible.ok);
  CHECK(at.feasible.reason == "dP < (1-1/lambda)/(M0+M0^2)");

  CHECK_FALSE(general_perturbation(M, 1.36, 0.001).feasible.ok);
  CHECK_FALSE(general_perturbation(M, 1.1, -0.001).feasible.ok);
}

TEST_CASE("window names stay spelled the way the verifier rechecks them") {
  auto ar = atomic_rate(10.0 / 3.0, 0.6, 1.1);
  REQUIRE(ar.feasible.windows.size() == 4);
  CHECK(ar.feasible.windows[0].name == "M >= 0");
  CHECK(ar.feasible.windows[1].name == "0 < pi(A) <= 1");
  CHECK(ar.feasible.windows[2].name == "lambda > 1");
  CHECK(ar.feasible.windows[3].name == "lambda < e^{1/M}");

  auto gp = general_perturbation(10.0 / 3.0, 1.1, 0.001);
  bool found = false;
  for (const auto& w : gp.feasible.windows)
    found = found || w.name == "dP < (1-1/lambda)/(M0+M0^2)";
  CHECK(found);
}

TEST_CASE("lambda grids stay strictly inside the window") {
  auto g = lambda_grid(1.0, 1.5, 11);
  REQUIRE(g.size() == 11);
  for (double l : g) {
    CHECK(l > 1.0);
    CHECK(l < 1.5);
  }
  for (size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] > g[i - 1]);
    if (i >= 2)  // geometric spacing: constant ratio
      CHECK(g[i] / g[i - 1] ==
            doctest::Approx(g[i - 1] / g[i - 2]).epsilon(1e-12));
  }

  auto one = lambda_grid(1.0, 4.0, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(2.0).epsilon(1e-13));

  CHECK(lambda_grid(2.0, 2.0, 5).empty());
  CHECK(lambda_grid(2.0, 1.0, 5).empty());

  auto capped = lambda_grid(1.0, kInf, 3);
  REQUIRE(capped.size() == 3);
  CHECK(capped.back() < 1e6);
}

TEST_CASE("envelopes take the pointwise minimum") {
  BoundCurve slow;
  slow.add_geometric(1.0, 0.9);
  BoundCurve fast;
  fast.add_geometric(10.0, 0.5);
  auto env = envelope({slow, fast}, 20);
  REQUIRE(env.size() == 21);
  for (int n = 0; n <= 20; ++n)
    CHECK(env[static_cast<size_t>(n)] ==
          doctest::Approx(std::min(slow(n), fast(n))).epsilon(1e-13));
  // the curves cross, so both must win somewhere
  CHECK(env[0] == doctest::Approx(slow(0)));
  CHECK(env[20] == doctest::Approx(fast(20)));

  auto none = envelope({}, 3);
  for (double v : none) CHECK(std::isinf(v));
}
