#include "ergo/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ergo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXi complement_indices(const StateSet& A) {
  auto comp = A.complement();
  Eigen::VectorXi idx(static_cast<int>(comp.size()));
  for (size_t i = 0; i < comp.size(); ++i) idx(static_cast<int>(i)) = comp[i];
  return idx;
}

// kernel restricted to the complement of A
Eigen::MatrixXd restricted_block(const Eigen::MatrixXd& P, const StateSet& A) {
  const Eigen::VectorXi idx = complement_indices(A);
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd Q(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Q(i, j) = P(idx(i), idx(j));
  return Q;
}

// one-step probability of landing in A, restricted to rows off A
Eigen::VectorXd entry_column(const Eigen::MatrixXd& P, const StateSet& A) {
  const Eigen::VectorXi idx = complement_indices(A);
  Eigen::VectorXd r(idx.size());
  for (int i = 0; i < idx.size(); ++i) {
    double s = 0.0;
    for (int y : A.members()) s += P(idx(i), y);
    r(i) = s;
  }
  return r;
}

void check_dims(const Eigen::MatrixXd& P, const StateSet& A,
                const char* where) {
  if (P.rows() != P.cols() || A.n_states() != static_cast<int>(P.rows())) {
    std::ostringstream os;
    os << where << ": set indexed over wrong space";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

double restricted_spectral_radius(const Eigen::MatrixXd& kernel,
                                  const StateSet& A) {
  check_dims(kernel, A, "restricted_spectral_radius");
  if (A.is_full()) return 0.0;
  Eigen::MatrixXd Q = restricted_block(kernel, A);
  Eigen::EigenSolver<Eigen::MatrixXd> es(Q, /*computeEigenvectors=*/false);
  double rho = 0.0;
  for (int k = 0; k < Q.rows(); ++k)
    rho = std::max(rho, std::abs(es.eigenvalues()(k)));
  return rho;
}

int adaptive_horizon(const Eigen::MatrixXd& kernel, const StateSet& A,
                     double tail_tol, int cap) {
  double rho = restricted_spectral_radius(kernel, A);
  if (rho <= 0.0) return 1;
  if (rho >= 1.0) return cap;
  double h = std::ceil(std::log(tail_tol) / std::log(rho));
  if (!(h >= 1.0)) return 1;
  return static_cast<int>(std::min<double>(h, cap));
}

Eigen::MatrixXd return_distribution(const Eigen::MatrixXd& kernel,
                                    const StateSet& A, int horizon) {
  check_dims(kernel, A, "return_distribution");
  if (horizon < 1) throw std::invalid_argument("return_distribution: horizon < 1");
  const int n = static_cast<int>(kernel.rows());
  Eigen::MatrixXd F(n, horizon);
  Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
  for (int y : A.members()) ind(y) = 1.0;
  Eigen::VectorXd f = kernel * ind;  // F^1(., A)
  F.col(0) = f;
  for (int k = 1; k < horizon; ++k) {
    for (int y : A.members()) f(y) = 0.0;  // taboo: survive off A
    f = kernel * f;
    F.col(k) = f;
  }
  return F;
}

Eigen::MatrixXd survival_profile(const Eigen::MatrixXd& kernel,
                                 const StateSet& A, int horizon) {
  check_dims(kernel, A, "survival_profile");
  if (horizon < 1) throw std::invalid_argument("survival_profile: horizon < 1");
  const int n = static_cast<int>(kernel.rows());
  Eigen::MatrixXd S(n, horizon);
  Eigen::VectorXd comp = Eigen::VectorXd::Ones(n);
  for (int y : A.members()) comp(y) = 0.0;
  Eigen::VectorXd s = kernel * comp;  // P_x{tau_A > 1}
  S.col(0) = s;
  for (int k = 1; k < horizon; ++k) {
    for (int y : A.members()) s(y) = 0.0;
    s = kernel * s;
    S.col(k) = s;
  }
  return S;
}

HittingProfile hitting_profile(const FiniteChain& chain, const StateSet& A,
                               int horizon) {
  check_dims(chain.kernel(), A, "hitting_profile");
  if (horizon < 1) throw std::invalid_argument("hitting_profile: horizon < 1");
  const int n = chain.n_states();
  const auto& P = chain.kernel();

  HittingProfile out{A, {}, Eigen::MatrixXd(n, horizon),
                     Eigen::VectorXd::Zero(n), 0.0, Eigen::VectorXd(n),
                     horizon};
  out.taboo.reserve(static_cast<size_t>(horizon));
  out.taboo.push_back(P);
  for (int k = 1; k < horizon; ++k) {
    Eigen::MatrixXd masked = out.taboo.back();
    for (int y : A.members()) masked.col(y).setZero();
    out.taboo.push_back(masked * P);
  }
  for (int k = 0; k < horizon; ++k) {
    for (int x = 0; x < n; ++x) {
      double s = 0.0;
      for (int y : A.members()) s += out.taboo[static_cast<size_t>(k)](x, y);
      out.F(x, k) = s;
    }
  }
  out.return_mass = out.F.rowwise().sum();

  if (!A.is_full()) {
    const Eigen::VectorXi idx = complement_indices(A);
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd Q = restricted_block(P, A);
    Eigen::VectorXd u =
        (Eigen::MatrixXd::Identity(m, m) - Q).partialPivLu().solve(
            Eigen::VectorXd::Ones(m));
    for (int i = 0; i < m; ++i) out.sigma_mean(idx(i)) = u(i);
    out.M = u.maxCoeff();
  }
  return out;
}

Eigen::VectorXd return_time_mgf(const Eigen::MatrixXd& kernel,
                                const StateSet& A, double t) {
  check_dims(kernel, A, "return_time_mgf");
  const int n = static_cast<int>(kernel.rows());
  double rho = restricted_spectral_radius(kernel, A);
  if (std::abs(t) * rho >= 1.0 - 1e-12) {
    std::ostringstream os;
    os << "return_time_mgf: |t|*rho(Q) = " << std::abs(t) * rho
       << " >= 1, series divergent";
    throw DivergenceError(os.str(), t, rho);
  }
  Eigen::VectorXd u_full = Eigen::VectorXd::Zero(n);
  if (!A.is_full()) {
    const Eigen::VectorXi idx = complement_indices(A);
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd Q = restricted_block(kernel, A);
    Eigen::VectorXd r = entry_column(kernel, A);
    Eigen::VectorXd u =
        (Eigen::MatrixXd::Identity(m, m) - t * Q).partialPivLu().solve(t * r);
    for (int i = 0; i < m; ++i) u_full(idx(i)) = u(i);
  }
  // one-step conditioning gives the return moment at every state
  Eigen::VectorXd g(n);
  for (int x = 0; x < n; ++x) {
    double acc = 0.0;
    for (int y = 0; y < n; ++y)
      acc += kernel(x, y) * (A.contains(y) ? 1.0 : u_full(y));
    g(x) = t * acc;
  }
  return g;
}

GeometricMoments geometric_moments(const FiniteChain& chain, const StateSet& A,
                                   double lambda) {
  check_dims(chain.kernel(), A, "geometric_moments");
  if (lambda < 1.0)
    throw std::invalid_argument("geometric_moments: lambda must be >= 1");
  const int n = chain.n_states();
  GeometricMoments out;
  out.lambda = lambda;
  if (lambda == 1.0) {
    out.sigma_moment = Eigen::VectorXd::Ones(n);
    out.tau_moment = Eigen::VectorXd::Ones(n);
    out.L = 1.0;
    out.sup_tau = 1.0;
    return out;
  }
  out.tau_moment = return_time_mgf(chain.kernel(), A, lambda);
  out.sigma_moment = Eigen::VectorXd::Ones(n);
  for (int x : A.complement()) out.sigma_moment(x) = out.tau_moment(x);
  out.L = 0.0;
  for (int x : A.members()) out.L = std::max(out.L, out.tau_moment(x));
  out.sup_tau = out.tau_moment.maxCoeff();
  return out;
}

Eigen::VectorXd sigma_power_moment(const FiniteChain& chain, const StateSet& A,
                                   int ell) {
  check_dims(chain.kernel(), A, "sigma_power_moment");
  if (ell < 1) throw std::invalid_argument("sigma_power_moment: ell >= 1 required");
  const int n = chain.n_states();
  if (A.is_full()) return Eigen::VectorXd::Zero(n);
  const Eigen::VectorXi idx = complement_indices(A);
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd Q = restricted_block(chain.kernel(), A);
  Eigen::VectorXd r = entry_column(chain.kernel(), A);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(m, m) - Q);

  // E[sigma^l] = E[(1 + sigma')^l] expanded binomially over the first step;
  // moments[j] holds E[sigma^j] on the complement, moments[0] = 1
  std::vector<Eigen::VectorXd> moments{Eigen::VectorXd::Ones(m)};
  std::vector<double> binom{1.0};
  for (int l = 1; l <= ell; ++l) {
    binom.push_back(1.0);
    for (size_t j = binom.size() - 2; j >= 1; --j) binom[j] += binom[j - 1];
    Eigen::VectorXd lower = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < l; ++j)
      lower += binom[static_cast<size_t>(j)] * moments[static_cast<size_t>(j)];
    moments.push_back(lu.solve((r + Q * lower).eval()));
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) full(idx(i)) = moments[static_cast<size_t>(ell)](i);
  return full;
}

Eigen::VectorXd mean_return_time(const FiniteChain& chain, const StateSet& A) {
  check_dims(chain.kernel(), A, "mean_return_time");
  const int n = chain.n_states();
  HittingProfile hp = hitting_profile(chain, A, 1);
  Eigen::VectorXd out(n);
  for (int x = 0; x < n; ++x) {
    double acc = 1.0;
    for (int y : A.complement()) acc += chain.kernel()(x, y) * hp.sigma_mean(y);
    out(x) = acc;
  }
  return out;
}

double kac_residual(const FiniteChain& chain, const StateSet& A, double kappa) {
  GeometricMoments gm = geometric_moments(chain, A, kappa);
  const auto& pi = chain.pi();
  double lhs = 0.0, piA = 0.0, comp = 0.0;
  for (int x : A.members()) {
    lhs += pi(x) * gm.tau_moment(x);
    piA += pi(x);
  }
  for (int x : A.complement()) comp += pi(x) * gm.sigma_moment(x);
  double rhs = kappa * piA + (kappa - 1.0) * comp;
  return std::abs(lhs - rhs);
}

double sup_even_return_series(const Eigen::MatrixXd& kernel, const StateSet& A,
                              double s) {
  double rho = restricted_spectral_radius(kernel, A);
  if (std::abs(s) * rho >= 1.0 - 1e-12) return kInf;
  Eigen::VectorXd plus = return_time_mgf(kernel, A, s);
  Eigen::VectorXd minus = return_time_mgf(kernel, A, -s);
  double sup = 0.0;
  for (int x : A.members()) sup = std::max(sup, 0.5 * (plus(x) + minus(x)));
  return sup;
}

SkeletonGenerating skeleton_generating(const FiniteChain& chain,
                                       const StateSet& A, double s,
                                       int horizon) {
  check_dims(chain.kernel(), A, "skeleton_generating");
  if (horizon < 2) throw std::invalid_argument("skeleton_generating: horizon < 2");
  if (s <= 0.0) throw std::invalid_argument("skeleton_generating: s must be positive");
  const int n = chain.n_states();
  const auto& P = chain.kernel();

  SkeletonGenerating out;
  out.s = s;
  out.horizon = horizon;
  out.F0 = Eigen::VectorXd::Zero(n);
  out.F1 = Eigen::VectorXd::Zero(n);
  out.Fbar = Eigen::VectorXd::Zero(n);

  // weighted taboo recursion, term_k = s^k F^k(., A); forming s^k on its
  // own would overflow long before the product does. Past the guard the
  // series is divergent at this s and the sums already fail any
  // feasibility test, so stop accumulating.
  constexpr double kOverflowGuard = 1e290;
  Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
  for (int y : A.members()) ind(y) = 1.0;
  const auto taboo_zero = [&A](Eigen::VectorXd& v) {
    for (int y : A.members()) v(y) = 0.0;
  };

  Eigen::VectorXd term = s * (P * ind);
  for (int k = 1; k <= horizon; ++k) {
    if (k > 1) {
      taboo_zero(term);
      term = s * (P * term);
    }
    if (k % 2 == 0)
      out.F0 += term;
    else
      out.F1 += term;
    if (term.maxCoeff() > kOverflowGuard) break;
  }

  Eigen::MatrixXd Pbar = P * P;
  const int hbar = std::max(1, horizon / 2);
  Eigen::VectorXd term_bar = (s * s) * (Pbar * ind);
  for (int k = 1; k <= hbar; ++k) {
    if (k > 1) {
      taboo_zero(term_bar);
      term_bar = (s * s) * (Pbar * term_bar);
    }
    out.Fbar += term_bar;
    if (term_bar.maxCoeff() > kOverflowGuard) break;
  }

  // certified truncation bound via the closed-form series values
  out.truncation_error = kInf;
  double rho = restricted_spectral_radius(P, A);
  double rho_bar = restricted_spectral_radius(Pbar, A);
  if (s * rho < 1.0 - 1e-12 && s * s * rho_bar < 1.0 - 1e-12) {
    Eigen::VectorXd plus = return_time_mgf(P, A, s);
    Eigen::VectorXd minus = return_time_mgf(P, A, -s);
    Eigen::VectorXd f0_exact = 0.5 * (plus + minus);
    Eigen::VectorXd f1_exact = 0.5 * (plus - minus);
    Eigen::VectorXd fbar_exact = return_time_mgf(Pbar, A, s * s);
    out.truncation_error =
        std::max({(f0_exact - out.F0).cwiseAbs().maxCoeff(),
                  (f1_exact - out.F1).cwiseAbs().maxCoeff(),
                  (fbar_exact - out.Fbar).cwiseAbs().maxCoeff()});
  }

  out.sup_F0_A = 0.0;
  out.sup_F1_A = 0.0;
  for (int x : A.members()) {
    out.sup_F0_A = std::max(out.sup_F0_A, out.F0(x));
    out.sup_F1_A = std::max(out.sup_F1_A, out.F1(x));
  }
  // feasibility certified against the truncated tail so a finite prefix can
  // never claim a divergent series is below 1
  out.feasible = std::isfinite(out.truncation_error) &&
                 out.sup_F0_A + out.truncation_error < 1.0;
  if (out.feasible)
    out.rhs = out.F0 +
              out.F1 * (out.sup_F1_A / (1.0 - out.sup_F0_A));
  else
    out.rhs = Eigen::VectorXd::Constant(n, kNaN);
  return out;
}

}  // namespace ergo
