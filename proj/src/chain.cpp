#include "ergo/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ergo {

namespace {

// forward/backward reachability from state 0 over entries > kEdgeTol;
// strong connectivity is equivalent to both searches covering everything
bool strongly_connected(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  auto reach = [&](bool forward) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y = 0; y < n; ++y) {
        double w = forward ? P(x, y) : P(y, x);
        if (w > kEdgeTol && !seen[static_cast<size_t>(y)]) {
          seen[static_cast<size_t>(y)] = 1;
          stack.push_back(y);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c; });
  };
  return reach(true) && reach(false);
}

}  // namespace

StateSet::StateSet(std::vector<int> members, int n_states)
    : members_(std::move(members)), n_states_(n_states) {
  if (n_states_ <= 0) throw std::invalid_argument("StateSet: empty state space");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (members_.empty()) throw std::invalid_argument("StateSet: empty set");
  if (members_.front() < 0 || members_.back() >= n_states_)
    throw std::invalid_argument("StateSet: state index out of range");
  mask_.assign(static_cast<size_t>(n_states_), 0);
  for (int x : members_) mask_[static_cast<size_t>(x)] = 1;
}

std::vector<int> StateSet::complement() const {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n_states_ - size()));
  for (int x = 0; x < n_states_; ++x)
    if (!mask_[static_cast<size_t>(x)]) out.push_back(x);
  return out;
}

std::string StateSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (size_t i = 0; i < members_.size(); ++i) {
    if (i) os << ',';
    os << members_[i];
  }
  os << '}';
  return os.str();
}

FiniteChain::FiniteChain(Eigen::MatrixXd kernel,
                         std::vector<std::string> labels)
    : kernel_(std::move(kernel)), labels_(std::move(labels)) {
  const int n = static_cast<int>(kernel_.rows());
  if (n < 1 || kernel_.cols() != n)
    throw std::invalid_argument("FiniteChain: kernel must be square and nonempty");
  if (!labels_.empty() && static_cast<int>(labels_.size()) != n)
    throw std::invalid_argument("FiniteChain: label count does not match state count");

  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      double v = kernel_(x, y);
      if (!std::isfinite(v) || v < -1e-12 || v > 1.0 + kRowSumTol) {
        std::ostringstream os;
        os << "FiniteChain: entry (" << x << "," << y << ") = " << v
           << " outside [0,1]";
        throw std::invalid_argument(os.str());
      }
      if (v < 0) kernel_(x, y) = 0.0;
    }
    double s = kernel_.row(x).sum();
    if (std::abs(s - 1.0) > kRowSumTol) {
      std::ostringstream os;
      os << "FiniteChain: row " << x << " sums to " << s
         << ", off by more than " << kRowSumTol;
      throw std::invalid_argument(os.str());
    }
    kernel_.row(x) /= s;
  }

  if (!strongly_connected(kernel_))
    throw std::invalid_argument("FiniteChain: kernel is not irreducible");

  // direct solve for pi: transpose, shift the diagonal, replace one equation
  // by the normalization sum(pi) = 1
  Eigen::MatrixXd A = kernel_.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(0).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = 1.0;
  pi_ = A.partialPivLu().solve(b);
  double s = pi_.sum();
  pi_ /= s;
  for (int x = 0; x < n; ++x) {
    if (!(pi_(x) > 0)) {
      std::ostringstream os;
      os << "FiniteChain: stationary solve produced pi(" << x << ") = "
         << pi_(x) << " (chain numerically degenerate)";
      throw std::invalid_argument(os.str());
    }
  }
}

Eigen::MatrixXd FiniteChain::power(int n) const {
  if (n < 0) throw std::invalid_argument("FiniteChain::power: negative exponent");
  const int dim = n_states();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd base = kernel_;
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().sum();
}

StationaryLaw stationary_distribution(const FiniteChain& chain) {
  return StationaryLaw{chain.pi()};
}

Eigen::VectorXd stationary_power_iteration(const FiniteChain& chain,
                                           int max_iters, double tol) {
  const int n = chain.n_states();
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Constant(n, 1.0 / n);
  for (int it = 0; it < max_iters; ++it) {
    Eigen::RowVectorXd next = mu * chain.kernel();
    // average over a lazy step so periodic chains converge too
    next = 0.5 * (next + mu);
    next /= next.sum();
    if ((next - mu).cwiseAbs().sum() < tol) return next.transpose();
    mu = next;
  }
  return mu.transpose();
}

std::vector<double> tv_profile(const FiniteChain& chain, int n_max) {
  if (n_max < 0) throw std::invalid_argument("tv_profile: negative horizon");
  const int n = chain.n_states();
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n_max) + 1);
  Eigen::MatrixXd Pn = Eigen::MatrixXd::Identity(n, n);
  const Eigen::RowVectorXd pi_row = chain.pi().transpose();
  for (int step = 0; step <= n_max; ++step) {
    double worst = 0.0;
    for (int x = 0; x < n; ++x)
      worst = std::max(worst, (Pn.row(x) - pi_row).cwiseAbs().sum());
    out.push_back(worst);
    if (step < n_max) Pn = Pn * chain.kernel();
  }
  return out;
}

ReversibilityCheck check_reversible(const FiniteChain& chain, double tol) {
  const int n = chain.n_states();
  const auto& P = chain.kernel();
  const auto& pi = chain.pi();
  double worst = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      worst = std::max(worst, std::abs(pi(x) * P(x, y) - pi(y) * P(y, x)));
  return ReversibilityCheck{worst <= tol, worst};
}

namespace {

// spectrum of D^{1/2} P D^{-1/2}, ascending; only called on reversible chains
Eigen::VectorXd symmetrized_spectrum(const FiniteChain& chain) {
  const int n = chain.n_states();
  const auto& P = chain.kernel();
  const auto& pi = chain.pi();
  Eigen::MatrixXd S(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      S(x, y) = std::sqrt(pi(x) / pi(y)) * P(x, y);
  S = 0.5 * (S + S.transpose().eval());  // kill roundoff asymmetry
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  return es.eigenvalues();
}

}  // namespace

DefinitenessCheck check_nonneg_definite(const FiniteChain& chain, double tol) {
  if (!check_reversible(chain).reversible)
    return DefinitenessCheck{Definiteness::not_applicable,
                             std::numeric_limits<double>::quiet_NaN()};
  Eigen::VectorXd ev = symmetrized_spectrum(chain);
  double min_ev = ev(0);
  return DefinitenessCheck{
      min_ev >= -tol ? Definiteness::nonnegative : Definiteness::indefinite,
      min_ev};
}

double dobrushin_coefficient(const FiniteChain& chain, int n_steps) {
  if (n_steps < 1)
    throw std::invalid_argument("dobrushin_coefficient: need n_steps >= 1");
  Eigen::MatrixXd Pn = chain.power(n_steps);
  const int n = chain.n_states();
  double worst = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      worst = std::max(worst, (Pn.row(x) - Pn.row(y)).cwiseAbs().sum());
  return 0.5 * worst;
}

SpectralSummary spectral_r0(const FiniteChain& chain) {
  SpectralSummary out;
  const int n = chain.n_states();
  out.is_reversible = check_reversible(chain).reversible;
  if (out.is_reversible) {
    Eigen::VectorXd ev = symmetrized_spectrum(chain);
    out.eigenvalues.assign(ev.data(), ev.data() + n);
    std::sort(out.eigenvalues.rbegin(), out.eigenvalues.rend());
    out.is_nonneg_definite = out.eigenvalues.back() >= -kSpectralTol;
    out.r0 = 0.0;
    if (n >= 2)
      out.r0 = std::max(std::abs(out.eigenvalues[1]),
                        std::abs(out.eigenvalues.back()));
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(chain.kernel());
    std::vector<double> mods(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) mods[static_cast<size_t>(k)] = std::abs(es.eigenvalues()(k));
    std::sort(mods.rbegin(), mods.rend());
    out.eigenvalues = mods;
    out.is_nonneg_definite = false;
    // the Perron root is the unique eigenvalue equal to 1; drop one copy
    out.r0 = n >= 2 ? mods[1] : 0.0;
  }
  return out;
}

double MinorizationCertificate::max_violation(const FiniteChain& chain) const {
  const auto& P = chain.kernel();
  double worst = std::abs(nu.sum() - 1.0);
  if (delta <= 0 || delta > 1.0 + kStructuralTol)
    return std::numeric_limits<double>::infinity();
  worst = std::max(worst, -nu.minCoeff());
  for (int x : A.members())
    for (int y = 0; y < chain.n_states(); ++y)
      worst = std::max(worst, delta * nu(y) - P(x, y));
  return worst;
}

bool MinorizationCertificate::valid(const FiniteChain& chain, double tol) const {
  return max_violation(chain) <= tol;
}

std::optional<MinorizationCertificate> find_minorization(
    const FiniteChain& chain, const StateSet& A) {
  if (A.n_states() != chain.n_states())
    throw std::invalid_argument("find_minorization: set indexed over wrong space");
  const int n = chain.n_states();
  Eigen::VectorXd m(n);
  for (int y = 0; y < n; ++y) {
    double lo = 1.0;
    for (int x : A.members()) lo = std::min(lo, chain.kernel()(x, y));
    m(y) = lo;
  }
  double delta = m.sum();
  if (delta <= 0.0) return std::nullopt;
  return MinorizationCertificate{A, delta, m / delta};
}

std::vector<StateSet> detect_atoms(const FiniteChain& chain, double tol) {
  const int n = chain.n_states();
  std::vector<char> grouped(static_cast<size_t>(n), 0);
  std::vector<StateSet> classes;
  for (int x = 0; x < n; ++x) {
    if (grouped[static_cast<size_t>(x)]) continue;
    std::vector<int> cls{x};
    grouped[static_cast<size_t>(x)] = 1;
    for (int y = x + 1; y < n; ++y) {
      if (grouped[static_cast<size_t>(y)]) continue;
      double diff = (chain.kernel().row(x) - chain.kernel().row(y))
                        .cwiseAbs()
                        .maxCoeff();
      if (diff <= tol) {
        cls.push_back(y);
        grouped[static_cast<size_t>(y)] = 1;
      }
    }
    classes.emplace_back(std::move(cls), n);
  }
  return classes;
}

}  // namespace ergo
