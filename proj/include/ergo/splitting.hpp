#pragma once

#include "ergo/chain.hpp"

#include <optional>

// Nummelin splitting. Given a certificate P(x,y) >= delta nu(y) on A with
// 0 < delta < 1, the split chain lives on two copies of the state space:
// level 0 (indices 0..n-1) and level 1 (indices n..2n-1). Level-1 copies of
// A form an accessible atom A1; level-1 copies outside A are unreachable and
// kept only so indexing stays uniform (their rows are the split measure of
// nu, the same row every level-1 state carries by definition).

namespace ergo {

// delta = 1 leaves no residual kernel to split; the atom machinery applies
// to the base chain directly
struct AtomicCertificateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SplitChain {
  MinorizationCertificate cert;
  Eigen::MatrixXd kernel;     // full 2n x 2n split kernel
  Eigen::VectorXd split_pi;   // pi* on the 2n states, zero on dead states
  std::vector<int> atom;      // A1 in the 2n indexing
  std::vector<char> reachable;
  double pi_invariance_residual;  // max |(pi* P_split - pi*)(y)|

  // the reachable class (all of level 0 plus A1) as an irreducible chain;
  // analyses run here
  FiniteChain restricted;
  std::vector<int> to_restricted;    // 2n -> restricted index, -1 for dead
  std::vector<int> from_restricted;  // restricted index -> 2n
  StateSet atom_restricted;          // A1 in restricted indexing
  StateSet a_copies_restricted;      // A0 union A1 (the lift of A)
};

// mu*(y0) = (1-delta) mu(y) on A, mu(y) off A; mu*(y1) = delta mu(y) on A
Eigen::VectorXd split_measure(const Eigen::VectorXd& mu,
                              const MinorizationCertificate& cert);

// validates the certificate against the chain, then assembles the split
// kernel, its stationary law, and the reachable restriction
SplitChain build_split_chain(const FiniteChain& chain,
                             const MinorizationCertificate& cert);

struct SquaredTransfer {
  FiniteChain squared;  // P^2 (construction fails when P has period 2)
  // minorization transferred to the squared kernel: (A, delta^2 nu(A), nu);
  // empty when nu(A) = 0
  std::optional<MinorizationCertificate> cert;
  double delta_bar;  // delta^2 nu(A)
  // when A is an atom of P (delta = 1, nu the common row), the squared chain
  // keeps A as an atom with this row: nu(A) nu + sum_{y off A} nu(y) P(y,.)
  std::optional<Eigen::VectorXd> nu_bar;
};

SquaredTransfer squared_chain(const FiniteChain& chain,
                              const MinorizationCertificate& cert);

}  // namespace ergo
