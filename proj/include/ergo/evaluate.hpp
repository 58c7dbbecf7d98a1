#pragma once

#include "ergo/bounds.hpp"
#include "ergo/chain.hpp"
#include "ergo/hitting.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Chain-level assembly for the bound operations: computes the exact scalar
// inputs (M, pi(A), delta, nu(A), even-return series, certified uniform
// rates), routes structural preconditions, and sweeps lambda grids. The CLI
// and the verify harness both go through this layer so they feed the pure
// bounds identical numbers.

namespace ergo::eval {

// structural and moment data for a chain and a target set
struct ExactInputs {
  StateSet A;
  std::optional<MinorizationCertificate> cert;  // maximal certificate on A
  double piA = 0.0;
  double M = 0.0;        // sup_x E_x[sigma_A]
  double delta = 0.0;    // certificate weight, 0 when none exists
  double nuA = 0.0;      // nu mass on A
  bool is_atom = false;  // rows identical on A (delta = 1)
  bool reversible = false;
  bool nonneg_definite = false;
  double r0 = 1.0;
  double lambda_hi = bounds::kInf;  // e^{1/M}
};

ExactInputs exact_inputs(const FiniteChain& chain, const StateSet& A);

// callable s -> sup_{x in A} sum_n s^{2n} F^{2n}(x,A), exact closed form
std::function<double(double)> even_series_fn(const FiniteChain& chain,
                                             const StateSet& A);

// largest s (up to e^{1/M}, capped when infinite) with even series < 1,
// found by bisection; requires the series to be < 1 at s = 1
double even_series_radius(const std::function<double(double)>& fn, double M);

// smallest N with Dobrushin coefficient delta_N <= threshold
struct DobrushinPick {
  int N = 0;
  double deltaN = bounds::kNaN;
};
std::optional<DobrushinPick> dobrushin_pick(const FiniteChain& chain,
                                            double threshold = 0.995,
                                            int cap = 256);

// certified uniformly ergodic pair tv(n) <= C rho^n for all n: the spectral
// certificate C = max_x sqrt(1/pi(x) - 1), rho = r0 on reversible chains,
// the Dobrushin certificate C = 2/delta_N, rho = delta_N^{1/N} otherwise
struct UniformCertificate {
  double C = bounds::kNaN;
  double rho = bounds::kNaN;
  bool from_spectrum = false;
  int N = 0;            // Dobrushin window when that route is used
  double deltaN = bounds::kNaN;
};
std::optional<UniformCertificate> uniform_certificate(const FiniteChain& chain);

// exact tv head plus a geometric tail certified by Dobrushin
// submultiplicativity: tv(h+j) <= tv(h) delta_N^{floor(j/N)}
std::optional<bounds::GammaSequence> certified_gamma(const FiniteChain& chain,
                                                     int head_len = 32);

// kappa for the geometric-moment inputs, guaranteed strictly inside the
// convergence disk: e^{1/(2M)} capped above
double default_kappa(double M, double kappa_cap = 16.0);

// root of (1 + delta lambda)(1 - M log lambda) = lambda in (1, e^{1/M});
// the exact upper end of the lmd1 window, found by bisection from below
double lmd1_window_top(double M, double delta);

// one evaluated operation at one parameter point
struct OpEvaluation {
  double lambda = bounds::kNaN;  // NaN for parameter-free ops
  // sub-result label for ops with two parts ("K"/"Gamma", "atom_moment"/
  // "sup_moment"); empty for single-result ops
  std::string variant;
  bounds::Feasibility feasible;  // structural windows first, then numeric
  std::vector<std::pair<std::string, double>> constants;
  std::vector<double> curve;         // tv bound at n = 0..n_max, empty if none
  std::vector<double> kernel_curve;  // perturbation kernel bound, empty if none
  double stationary_bound = bounds::kNaN;  // NaN when the op has none
};

struct EvalRequest {
  std::string op;
  std::vector<int> A;            // target set indices
  std::vector<double> lambdas;   // explicit grid; empty -> automatic
  int grid_count = 21;
  double dP = 0.0;
  int n_max = 200;
  double kappa = 0.0;            // 0 -> automatic choice
  // override for the (delta, nu) certificate; validated against the chain
  std::optional<std::pair<double, Eigen::VectorXd>> cert_override;
};

struct EvalReport {
  std::string op;
  bool admissible = true;   // structural preconditions of the routed theorem
  std::string rejection;    // the named precondition that failed
  std::optional<ExactInputs> inputs;
  double kappa = bounds::kNaN;   // kappa actually used, when relevant
  double L = bounds::kNaN;       // sup_{x in A} E_x[kappa^{tau_A}]
  std::vector<OpEvaluation> results;
  std::vector<double> envelope;  // pointwise min over feasible curves
  // best (smallest) stationary bound across the grid, +inf if none feasible
  double stationary_best = bounds::kInf;
};

// canonical operation names, in presentation order
const std::vector<std::string>& bound_op_names();
// alias resolution ("hitmoment" -> "hitmoment_bound", ...); empty if unknown
std::string canonical_op(const std::string& name);

EvalReport evaluate_bound(const FiniteChain& chain, const EvalRequest& req);

}  // namespace ergo::eval
