#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core types for finite-state Markov chains in discrete time.
//
// Conventions used throughout the library:
//  - kernels are row-stochastic, P(x,y) = probability of x -> y
//  - total variation distances are reported in the full L1 metric,
//    ||mu - nu|| = sum_y |mu(y) - nu(y)|, so distances live in [0,2]
//  - chains must be irreducible; the stationary law pi is then unique
//    and strictly positive

namespace ergo {

// entrywise tolerances (stochasticity, detailed balance, atom detection)
inline constexpr double kStructuralTol = 1e-10;
// tolerances on eigenvalue-based quantities
inline constexpr double kSpectralTol = 1e-8;
// row sums further from 1 than this are rejected; closer ones renormalized
inline constexpr double kRowSumTol = 1e-9;
// entries above this count as edges for the irreducibility graph
inline constexpr double kEdgeTol = 1e-14;

// Nonempty subset of {0,...,n-1}, kept sorted and deduplicated.
class StateSet {
 public:
  StateSet(std::vector<int> members, int n_states);

  const std::vector<int>& members() const { return members_; }
  int n_states() const { return n_states_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool contains(int x) const { return mask_[static_cast<size_t>(x)] != 0; }
  bool is_full() const { return size() == n_states_; }
  std::vector<int> complement() const;
  std::string to_string() const;

 private:
  std::vector<int> members_;
  std::vector<char> mask_;
  int n_states_;
};

// Irreducible row-stochastic kernel with its stationary law.
// Construction validates stochasticity (rows renormalized when the sum is
// within kRowSumTol of 1, rejected otherwise), checks strong connectivity of
// the support graph, and solves for pi.
class FiniteChain {
 public:
  explicit FiniteChain(Eigen::MatrixXd kernel,
                       std::vector<std::string> labels = {});

  int n_states() const { return static_cast<int>(kernel_.rows()); }
  const Eigen::MatrixXd& kernel() const { return kernel_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::VectorXd& pi() const { return pi_; }

  // P^n by binary exponentiation; P^0 = I
  Eigen::MatrixXd power(int n) const;

 private:
  Eigen::MatrixXd kernel_;
  std::vector<std::string> labels_;
  Eigen::VectorXd pi_;
};

struct StationaryLaw {
  Eigen::VectorXd pi;
};

struct ReversibilityCheck {
  bool reversible;      // detailed balance holds within tol
  double max_residual;  // max_xy |pi(x)P(x,y) - pi(y)P(y,x)|
};

enum class Definiteness { nonnegative, indefinite, not_applicable };

struct DefinitenessCheck {
  Definiteness result;
  // smallest eigenvalue of the pi-symmetrized kernel; NaN when the chain is
  // not reversible (the symmetrized spectrum is meaningless then)
  double min_eigenvalue;
};

struct SpectralSummary {
  // reversible chains: spectrum of D^{1/2} P D^{-1/2}, sorted descending;
  // otherwise: moduli of the eigenvalues of P, sorted descending
  std::vector<double> eigenvalues;
  // spectral radius of P restricted to the mean-zero subspace, i.e. the
  // largest modulus after removing the Perron eigenvalue 1
  double r0;
  bool is_reversible;
  // meaningful only when is_reversible; false otherwise as a caveat that the
  // self-adjoint theory does not apply
  bool is_nonneg_definite;
};

// Certificate P(x,y) >= delta * nu(y) for all x in A.
struct MinorizationCertificate {
  StateSet A;
  double delta;
  Eigen::VectorXd nu;  // probability vector on the full state space

  // largest violation of the certificate inequalities against this chain;
  // <= tol means the certificate is valid
  double max_violation(const FiniteChain& chain) const;
  bool valid(const FiniteChain& chain, double tol = kStructuralTol) const;
};

// ||a - b|| in the full L1 convention
double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

StationaryLaw stationary_distribution(const FiniteChain& chain);

// power-iteration estimate of pi, kept as an independent cross-check of the
// direct linear solve (tests compare the two)
Eigen::VectorXd stationary_power_iteration(const FiniteChain& chain,
                                           int max_iters = 200000,
                                           double tol = 1e-14);

// tv[n] = max_x ||P^n(x,.) - pi|| for n = 0..n_max (full L1, so tv[0] =
// 2(1 - min_x pi(x)))
std::vector<double> tv_profile(const FiniteChain& chain, int n_max);

ReversibilityCheck check_reversible(const FiniteChain& chain,
                                    double tol = kStructuralTol);

DefinitenessCheck check_nonneg_definite(const FiniteChain& chain,
                                        double tol = kSpectralTol);

// (1/2) max_{x,x'} ||P^n(x,.) - P^n(x',.)||_1 in [0,1]
double dobrushin_coefficient(const FiniteChain& chain, int n_steps);

SpectralSummary spectral_r0(const FiniteChain& chain);

// Maximal certificate on A: nu(y) proportional to min_{x in A} P(x,y),
// delta = sum of the minima. Empty result when delta = 0 (some column
// vanishes on A). delta = 1 exactly when A is an atom.
std::optional<MinorizationCertificate> find_minorization(
    const FiniteChain& chain, const StateSet& A);

// Partition of the state space into maximal classes of identical rows
// (entrywise within tol). Singletons count as their own class.
std::vector<StateSet> detect_atoms(const FiniteChain& chain,
                                   double tol = kStructuralTol);

}  // namespace ergo
