#include "ergo/splitting.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ergo {

Eigen::VectorXd split_measure(const Eigen::VectorXd& mu,
                              const MinorizationCertificate& cert) {
  const int n = cert.A.n_states();
  if (mu.size() != n)
    throw std::invalid_argument("split_measure: measure has wrong dimension");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
  for (int y = 0; y < n; ++y) {
    if (cert.A.contains(y)) {
      out(y) = (1.0 - cert.delta) * mu(y);
      out(n + y) = cert.delta * mu(y);
    } else {
      out(y) = mu(y);
    }
  }
  return out;
}

SplitChain build_split_chain(const FiniteChain& chain,
                             const MinorizationCertificate& cert) {
  const int n = chain.n_states();
  if (cert.A.n_states() != n || cert.nu.size() != n)
    throw std::invalid_argument(
        "build_split_chain: certificate dimension mismatch");
  if (cert.delta >= 1.0 - kStructuralTol)
    throw AtomicCertificateError(
        "build_split_chain: delta = 1 within tolerance leaves no residual "
        "kernel; treat A as an atom of the base chain instead");
  if (!(cert.delta > 0.0))
    throw std::invalid_argument("build_split_chain: delta must be positive");
  const double viol = cert.max_violation(chain);
  if (viol > kStructuralTol)
    throw std::invalid_argument(
        "build_split_chain: certificate violated by the kernel (worst gap " +
        std::to_string(viol) + ")");

  const Eigen::MatrixXd& P = chain.kernel();
  const Eigen::VectorXd nu_star = split_measure(cert.nu, cert);

  // rows: residual kernel on A0, the plain row elsewhere on level 0, nu on
  // all of level 1; every row is pushed through the split of measures
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int x = 0; x < n; ++x) {
    Eigen::VectorXd row = P.row(x).transpose();
    if (cert.A.contains(x)) {
      row = (row - cert.delta * cert.nu) / (1.0 - cert.delta);
      // the certificate guarantees nonnegativity up to roundoff
      row = row.cwiseMax(0.0);
      row /= row.sum();
    }
    K.row(x) = split_measure(row, cert).transpose();
  }
  for (int x = 0; x < n; ++x) K.row(n + x) = nu_star.transpose();

  Eigen::VectorXd split_pi = split_measure(chain.pi(), cert);
  const double residual =
      (split_pi.transpose() * K - split_pi.transpose()).cwiseAbs().maxCoeff();

  std::vector<int> atom;
  for (int a : cert.A.members()) atom.push_back(n + a);
  std::vector<char> reachable(static_cast<size_t>(2 * n), 0);
  for (int x = 0; x < n; ++x) reachable[static_cast<size_t>(x)] = 1;
  for (int a : atom) reachable[static_cast<size_t>(a)] = 1;

  // restriction to the living states, in ascending index order
  std::vector<int> live;
  for (int x = 0; x < 2 * n; ++x)
    if (reachable[static_cast<size_t>(x)]) live.push_back(x);
  const int m = static_cast<int>(live.size());
  std::vector<int> to_restricted(static_cast<size_t>(2 * n), -1);
  for (int i = 0; i < m; ++i)
    to_restricted[static_cast<size_t>(live[static_cast<size_t>(i)])] = i;

  Eigen::MatrixXd R(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      R(i, j) = K(live[static_cast<size_t>(i)], live[static_cast<size_t>(j)]);
  // dead level-1 states carry no incoming mass, so the restriction is still
  // stochastic and inherits irreducibility from the base chain
  std::vector<std::string> labels;
  if (!chain.labels().empty()) {
    for (int idx : live) {
      int base = idx % n;
      labels.push_back(chain.labels()[static_cast<size_t>(base)] +
                       (idx < n ? ":0" : ":1"));
    }
  }

  std::vector<int> atom_r;
  for (int a : atom) atom_r.push_back(to_restricted[static_cast<size_t>(a)]);
  std::vector<int> copies = atom_r;
  for (int a : cert.A.members())
    copies.push_back(to_restricted[static_cast<size_t>(a)]);

  return SplitChain{cert,
                    std::move(K),
                    std::move(split_pi),
                    std::move(atom),
                    std::move(reachable),
                    residual,
                    FiniteChain(std::move(R), std::move(labels)),
                    std::move(to_restricted),
                    std::move(live),
                    StateSet(atom_r, m),
                    StateSet(copies, m)};
}

SquaredTransfer squared_chain(const FiniteChain& chain,
                              const MinorizationCertificate& cert) {
  const int n = chain.n_states();
  if (cert.A.n_states() != n || cert.nu.size() != n)
    throw std::invalid_argument(
        "squared_chain: certificate dimension mismatch");
  const double viol = cert.max_violation(chain);
  if (viol > kStructuralTol)
    throw std::invalid_argument(
        "squared_chain: certificate violated by the kernel (worst gap " +
        std::to_string(viol) + ")");

  std::optional<FiniteChain> squared;
  try {
    squared.emplace(chain.kernel() * chain.kernel(), chain.labels());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(
        std::string("squared_chain: the two-step kernel is not irreducible "
                    "(period-two chain): ") +
        e.what());
  }

  double nuA = 0.0;
  for (int a : cert.A.members()) nuA += cert.nu(a);
  const double delta_bar = cert.delta * cert.delta * nuA;
  std::optional<MinorizationCertificate> cert_bar;
  if (delta_bar > 0.0)
    cert_bar = MinorizationCertificate{cert.A, delta_bar, cert.nu};

  std::optional<Eigen::VectorXd> nu_bar;
  if (cert.delta >= 1.0 - kStructuralTol) {
    // A is an atom with common row nu; the squared chain keeps A as an atom
    Eigen::VectorXd row = nuA * cert.nu;
    for (int y = 0; y < n; ++y)
      if (!cert.A.contains(y))
        row += cert.nu(y) * chain.kernel().row(y).transpose();
    nu_bar = std::move(row);
  }
  return SquaredTransfer{std::move(*squared), std::move(cert_bar), delta_bar,
                         std::move(nu_bar)};
}

}  // namespace ergo
