#pragma once

#include "ergo/chain.hpp"

// Hitting and return times of a target set A.
//
// sigma_A = inf{n >= 0: X_n in A} (zero on A), tau_A = inf{n >= 1: X_n in A}.
// The return-time law F^n(x,A) = P_x{tau_A = n} is generated by the taboo
// kernels: AP^1 = P and AP^{n+1}(x,B) = sum_{y not in A} AP^n(x,y) P(y,B),
// with F^n(x,A) = AP^n(x,A).
//
// Moment feasibility is decided spectrally: with Q the kernel restricted to
// the complement of A, E_x[lambda^{tau_A}] is finite iff lambda*rho(Q) < 1.

namespace ergo {

struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, double lambda, double rho)
      : std::runtime_error(what), lambda(lambda), rho_Q(rho) {}
  double lambda;
  double rho_Q;
};

struct HittingProfile {
  StateSet target;
  // taboo[k] = AP^{k+1}; taboo.front() = P
  std::vector<Eigen::MatrixXd> taboo;
  // F(x, k) = F^{k+1}(x, A) = P_x{tau_A = k+1}
  Eigen::MatrixXd F;
  Eigen::VectorXd sigma_mean;  // E_x[sigma_A], zero on A
  double M;                    // sup_x E_x[sigma_A]
  // captured return mass sum_{n <= horizon} F^n(x, A) per state
  Eigen::VectorXd return_mass;
  int horizon;
};

struct GeometricMoments {
  double lambda;
  Eigen::VectorXd sigma_moment;  // E_x[lambda^{sigma_A}], = 1 on A
  Eigen::VectorXd tau_moment;    // E_x[lambda^{tau_A}]
  double L;                      // sup_{x in A} tau_moment
  double sup_tau;                // sup_x tau_moment
};

struct SkeletonGenerating {
  double s;
  Eigen::VectorXd F0;    // sum_n s^{2n}   F^{2n}(x,A), truncated at horizon
  Eigen::VectorXd F1;    // sum_n s^{2n-1} F^{2n-1}(x,A)
  Eigen::VectorXd Fbar;  // sum_n s^{2n} Fbar^n(x,A), Fbar from the squared kernel
  // F0 + F1 * sup_{A} F1 / (1 - sup_{A} F0) when feasible, NaN otherwise
  Eigen::VectorXd rhs;
  double sup_F0_A;
  double sup_F1_A;
  bool feasible;  // sup_{x in A} F0 < 1
  // certified bound on the truncated tails (infinite when the series
  // diverges at this s, i.e. no horizon suffices)
  double truncation_error;
  int horizon;
};

// spectral radius of P restricted to the complement of A (0 when A is full)
double restricted_spectral_radius(const Eigen::MatrixXd& kernel,
                                  const StateSet& A);

// smallest n with rho(Q)^n <= tail_tol, clamped to [1, cap]
int adaptive_horizon(const Eigen::MatrixXd& kernel, const StateSet& A,
                     double tail_tol = 1e-12, int cap = 100000);

// return-law matrix without materializing taboo kernels: column k holds
// F^{k+1}(., A); works for any row-stochastic kernel
Eigen::MatrixXd return_distribution(const Eigen::MatrixXd& kernel,
                                    const StateSet& A, int horizon);

// survival(x, k) = P_x{tau_A > k+1}
Eigen::MatrixXd survival_profile(const Eigen::MatrixXd& kernel,
                                 const StateSet& A, int horizon);

HittingProfile hitting_profile(const FiniteChain& chain, const StateSet& A,
                               int horizon);

// E_x[t^{tau_A}] for every x, by resolvent solve; valid for |t|*rho(Q) < 1
// (t may be negative, which yields the alternating series). Throws
// DivergenceError outside that disk.
Eigen::VectorXd return_time_mgf(const Eigen::MatrixXd& kernel,
                                const StateSet& A, double t);

// requires lambda >= 1; lambda = 1 gives all-ones moments
GeometricMoments geometric_moments(const FiniteChain& chain, const StateSet& A,
                                   double lambda);

// E_x[sigma_A^ell] per state (zero on A), by the recursive linear systems
Eigen::VectorXd sigma_power_moment(const FiniteChain& chain, const StateSet& A,
                                   int ell);

// E_x[tau_A] per state
Eigen::VectorXd mean_return_time(const FiniteChain& chain, const StateSet& A);

// |integral_A E_x[kappa^{tau_A}] dpi - kappa pi(A) - (kappa-1) integral_{A^c}
// E_x[kappa^{sigma_A}] dpi|; infeasible kappa propagates DivergenceError
double kac_residual(const FiniteChain& chain, const StateSet& A, double kappa);

// truncated even/odd generating functions of the return law plus the squared
// chain's own series, with a certified truncation bound
SkeletonGenerating skeleton_generating(const FiniteChain& chain,
                                       const StateSet& A, double s,
                                       int horizon);

// exact even-return series sup_{x in A} sum_n s^{2n} F^{2n}(x,A), evaluated
// in closed form as the even part of the mgf; +inf where divergent
double sup_even_return_series(const Eigen::MatrixXd& kernel, const StateSet& A,
                              double s);

}  // namespace ergo
