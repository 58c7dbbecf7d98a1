#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

// Quantitative convergence-rate and perturbation bounds. Every operation
// here is a pure map from exact scalar inputs (M, pi(A), delta, nu(A),
// series values, ...) to constants, a TV upper-bound curve, and perturbation
// factors. Structural preconditions (reversibility, definiteness, atomness)
// are the caller's job; the evaluate/verify layers enforce them on chains.
//
// Feasibility is data, never an exception: each result carries the list of
// printed window conditions with their truth values. Infeasible results keep
// their inputs but produce NaN constants.

namespace ergo::bounds {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct WindowCheck {
  std::string name;
  bool holds;
};

struct Feasibility {
  bool ok = true;
  std::string reason;  // first failed window, empty when ok
  std::vector<WindowCheck> windows;

  void require(const std::string& name, bool holds) {
    windows.push_back({name, holds});
    if (!holds && ok) {
      ok = false;
      reason = name;
    }
  }
};

// curve(n) = sum_i c_i r_i^n + sum_j d_j n s_j^n, the shape every rate bound
// here takes; prefix sums and totals are closed-form, which is exactly the
// Gamma-series transform used by the perturbation theorems
class BoundCurve {
 public:
  BoundCurve() = default;

  void add_geometric(double coef, double ratio) { geo_.push_back({coef, ratio}); }
  void add_linear_geometric(double coef, double ratio) {
    lin_.push_back({coef, ratio});
  }

  double operator()(int n) const;
  // sum_{m=0}^{n-1} curve(m)
  double prefix_sum(int n) const;
  // sum_{m=0}^{inf} curve(m); +inf when some ratio >= 1 with nonzero weight
  double total_sum() const;
  bool empty() const { return geo_.empty() && lin_.empty(); }

  const std::vector<std::pair<double, double>>& geometric_terms() const {
    return geo_;
  }
  const std::vector<std::pair<double, double>>& linear_terms() const {
    return lin_;
  }

 private:
  std::vector<std::pair<double, double>> geo_;
  std::vector<std::pair<double, double>> lin_;
};

// gamma sequence with an explicit head and a geometric tail certified by the
// caller; gamma_n = tail_coef * tail_ratio^n for n >= head.size()
struct GammaSequence {
  std::vector<double> head;
  double tail_coef = 0.0;
  double tail_ratio = 0.0;

  double at(int n) const;
  bool summable() const;
  double partial_sum(int n) const;  // Gamma_n = sum_{m<n} gamma_m
  double total() const;             // Gamma_infinity

  static GammaSequence geometric(double C, double rho);
  static GammaSequence capped_geometric(double C, double rho);  // min{2, C rho^n}
  static GammaSequence constant(double c);
};

struct GammaSeriesBounds {
  Feasibility feasible;
  GammaSequence gamma;
  double dP = 0.0;
  double gamma_total = kInf;      // Gamma_infinity
  double stationary_bound = kInf; // Gamma_infinity * dP, +inf if non-summable
  double kernel_bound(int n) const { return gamma.partial_sum(n) * dP; }
};
GammaSeriesBounds gamma_series_bounds(const GammaSequence& gamma, double dP);

// tv(n) <= min{2, C cor_rho^n}: direct tail sum is the reported value, the
// paper's floor formula is carried alongside (they disagree when C < 2 rho)
struct UniformGeometricGamma {
  Feasibility feasible;
  double C = kNaN, cor_rho = kNaN, dP = kNaN;
  long long floor_index = 0;      // floor(log_rho(2/C))
  int capped_terms = 0;           // #{m : C rho^m > 2}
  double gamma_total_direct = kNaN;
  double gamma_total_formula = kNaN;
  bool formula_agrees = false;
  double stationary_bound = kNaN;  // direct total * dP
  double kernel_bound(int n) const;          // direct partial sum * dP
  double kernel_bound_formula(int n) const;  // printed closed form
};
UniformGeometricGamma uniform_geometric_gamma(double C, double rho, double dP);

struct DobrushinPerturbation {
  Feasibility feasible;
  double delta = kNaN;
  int N = 0;
  double dP = kNaN;
  double stationary_bound = kNaN;  // 2N/(1-delta) dP
  double kernel_bound(int n) const;  // 2N(1-delta^n)/(1-delta) dP
};
DobrushinPerturbation dobrushin_perturbation(double delta, int N, double dP);

struct HitMomentBound {
  Feasibility feasible;
  double M = kNaN, lambda = kNaN;
  double window_hi = kNaN;  // e^{1/M}
  double bound = kNaN;      // lambda (1 - M log lambda)^{-1}
};
HitMomentBound hitmoment_bound(double M, double lambda);

// tv(n) <= D1 e^{-n/M} + E1 lambda^{-n} (atom of a reversible non-negative
// definite chain); D1 may be negative and is reported as computed
struct AtomicRate {
  Feasibility feasible;
  double M = kNaN, piA = kNaN, lambda = kNaN;
  double C1 = kNaN, M1 = kNaN, D1 = kNaN, E1 = kNaN;
  BoundCurve curve;
};
AtomicRate atomic_rate(double M, double piA, double lambda);

struct AtomicPerturbation {
  Feasibility feasible;
  AtomicRate rate;
  double dP = kNaN;
  double stationary_bound = kNaN;
  double kernel_bound(int n) const;  // printed partial-sum form
};
AtomicPerturbation atomic_perturbation(double M, double piA, double lambda,
                                       double dP);

// split-chain atom moments: part (i) via geometric moments at kappa, part
// (ii) via the hitting-moment window
struct SplitMomentConstants {
  Feasibility feasible_i;
  Feasibility feasible_ii;
  double L = kNaN, kappa = kNaN, delta = kNaN, M = kNaN, lambda = kNaN;
  double alpha = kNaN, beta = kNaN;
  double K = kNaN;                  // kappa ^ (1-delta)^{-1/alpha}, the min
  double atom_moment_bound = kNaN;  // delta lambda^beta / (1-(1-delta)lambda^alpha)
  double M2 = kNaN;                 // delta lambda / ((1+delta lambda)(1-M log lambda) - lambda)
  double lambda_quadratic = kNaN;   // positive root of delta M l^2 + (M+1)(1-delta) l - (M+1)
};
SplitMomentConstants split_moment_constants(double L, double kappa,
                                            double delta, double M,
                                            double lambda);

// tv(n) <= (D2 + E2 n) lambda^{-n} under a minorization certificate
struct NonatomicRate {
  Feasibility feasible;
  double M = kNaN, delta = kNaN, piA = kNaN, lambda = kNaN;
  double C2 = kNaN, M2 = kNaN, D2 = kNaN, E2 = kNaN;
  BoundCurve curve;
};
NonatomicRate nonatomic_rate(double M, double delta, double piA, double lambda);

struct NonatomicPerturbation {
  Feasibility feasible;
  NonatomicRate rate;
  double dP = kNaN;
  double stationary_bound = kNaN;
  double kernel_bound(int n) const;
};
NonatomicPerturbation nonatomic_perturbation(double M, double delta, double piA,
                                             double lambda, double dP);

// geometric-rate radii K (base chain) and Gamma (skeleton transfer)
struct GeometricRateConstants {
  Feasibility feasible_K;
  Feasibility feasible_Gamma;
  double L = kNaN, kappa = kNaN, delta = kNaN, nuA = kNaN, theta = kNaN;
  double alpha = kNaN;
  double K = kNaN;               // kappa  min  (1-delta)^{-1/alpha}
  double gamma_exponent = kNaN;  // log[(L^2/(1-theta) - dbar kappa^2)/(1-dbar)] / log kappa
  double Gamma_rate = kNaN;      // kappa  min  (1-dbar)^{-1/gamma}
};
GeometricRateConstants geometric_rate_constants(double L, double kappa,
                                                double delta, double nuA,
                                                double theta);

// reversible chains with an atom, possibly indefinite: two-skeleton route.
// skeleton_radius is found by bisection over the exact even-return series
// sup_{x in A} sum s^{2n} F^{2n}(x,A), passed in as a callable.
struct ReversibleAtomicRate {
  Feasibility feasible;
  double M = kNaN, piA = kNaN, lambda = kNaN;
  double skeleton_radius = kNaN;  // varrho
  double C1 = kNaN, M1 = kNaN;
  double F1 = kNaN, G1 = kNaN;  // lambda != varrho branch
  double J1 = kNaN, K1 = kNaN;  // lambda == varrho branch
  bool equal_branch = false;        // |lambda - varrho| <= 1e-12 rel
  bool near_equal_warning = false;  // within 1e-6 but not equal: conditioning
  BoundCurve curve;
};
ReversibleAtomicRate reversible_atomic_rate(
    double M, double piA, const std::function<double(double)>& even_series_sup,
    double lambda);

// reversible chains with a certificate: vartheta must dominate the even
// series at lambda (the caller computes it exactly from the chain)
struct ReversibleNonatomicRate {
  Feasibility feasible;
  double M = kNaN, delta = kNaN, nuA = kNaN, piA = kNaN;
  double vartheta = kNaN, lambda = kNaN;
  double C3 = kNaN, M3 = kNaN, D3 = kNaN, E3 = kNaN;
  BoundCurve curve;
};
ReversibleNonatomicRate reversible_nonatomic_rate(double M, double delta,
                                                  double nuA, double piA,
                                                  double vartheta,
                                                  double lambda);

struct ReversiblePerturbation {
  Feasibility feasible;
  double dP = kNaN;
  double stationary_bound = kNaN;
  // the rate's curve, kept so kernel bounds follow the printed branch forms
  BoundCurve curve;
  bool equal_branch = false;
  // branch parameters for the printed kernel formulas
  double varrho = kNaN, lambda = kNaN;
  double F1 = kNaN, G1 = kNaN, J1 = kNaN, K1 = kNaN;  // atomic route
  double D3 = kNaN, E3 = kNaN;                        // nonatomic route
  bool atomic_route = false;
  double kernel_bound(int n) const;
};
ReversiblePerturbation reversible_perturbation(const ReversibleAtomicRate& rate,
                                               double dP);
ReversiblePerturbation reversible_perturbation(
    const ReversibleNonatomicRate& rate, double dP);

// stationary perturbation for general (possibly non-reversible) chains
struct GeneralPerturbation {
  Feasibility feasible;
  double M = kNaN, lambda = kNaN, dP = kNaN;
  double M0 = kNaN;         // (1 - M log lambda)^{-1}
  double threshold = kNaN;  // (1 - 1/lambda)/(M0 + M0^2)
  double stationary_bound = kNaN;
};
GeneralPerturbation general_perturbation(double M, double lambda, double dP);

// geometrically spaced lambdas strictly inside (lo, hi), endpoints excluded
// at relative margin 1e-3; empty when the window is empty
std::vector<double> lambda_grid(double lo, double hi, int count = 21);

// pointwise minimum of the curves over n = 0..n_max (+inf where none apply)
std::vector<double> envelope(const std::vector<BoundCurve>& curves, int n_max);

}  // namespace ergo::bounds
