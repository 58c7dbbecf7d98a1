#include "ergo/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ergo::bounds {

namespace {

double pos_part(double x) { return x > 0.0 ? x : 0.0; }

// e^{1/M} with the M = 0 convention e^{1/0} = +inf
double exp_inv(double M) { return M > 0.0 ? std::exp(1.0 / M) : kInf; }

// (e^{1/M}-1)/(e^{1/M}-lambda), which tends to 1 as M -> 0
double tail_ratio_factor(double ehi, double lambda) {
  if (std::isinf(ehi)) return 1.0;
  return (ehi - 1.0) / (ehi - lambda);
}

}  // namespace

double BoundCurve::operator()(int n) const {
  double v = 0.0;
  for (const auto& [c, r] : geo_) v += c * std::pow(r, n);
  for (const auto& [c, r] : lin_) v += c * n * std::pow(r, n);
  return v;
}

double BoundCurve::prefix_sum(int n) const {
  double v = 0.0;
  for (const auto& [c, r] : geo_) {
    if (r == 1.0)
      v += c * n;
    else
      v += c * (1.0 - std::pow(r, n)) / (1.0 - r);
  }
  for (const auto& [c, r] : lin_) {
    if (r == 1.0)
      v += c * 0.5 * static_cast<double>(n) * (n - 1);
    else
      v += c * r *
           (1.0 - n * std::pow(r, n - 1) + (n - 1.0) * std::pow(r, n)) /
           ((1.0 - r) * (1.0 - r));
  }
  return v;
}

double BoundCurve::total_sum() const {
  double v = 0.0;
  for (const auto& [c, r] : geo_) {
    if (c == 0.0) continue;
    if (std::abs(r) >= 1.0) return kInf;
    v += c / (1.0 - r);
  }
  for (const auto& [c, r] : lin_) {
    if (c == 0.0) continue;
    if (std::abs(r) >= 1.0) return kInf;
    v += c * r / ((1.0 - r) * (1.0 - r));
  }
  return v;
}

double GammaSequence::at(int n) const {
  if (n < 0) throw std::invalid_argument("GammaSequence::at: negative index");
  if (n < static_cast<int>(head.size())) return head[static_cast<size_t>(n)];
  return tail_coef * std::pow(tail_ratio, n);
}

bool GammaSequence::summable() const {
  return tail_coef == 0.0 || std::abs(tail_ratio) < 1.0;
}

double GammaSequence::partial_sum(int n) const {
  const int H = static_cast<int>(head.size());
  double v = 0.0;
  for (int m = 0; m < std::min(n, H); ++m) v += head[static_cast<size_t>(m)];
  if (n > H && tail_coef != 0.0) {
    if (tail_ratio == 1.0)
      v += tail_coef * (n - H);
    else
      v += tail_coef * (std::pow(tail_ratio, H) - std::pow(tail_ratio, n)) /
           (1.0 - tail_ratio);
  }
  return v;
}

double GammaSequence::total() const {
  if (!summable()) return kInf;
  const int H = static_cast<int>(head.size());
  double v = partial_sum(H);
  if (tail_coef != 0.0)
    v += tail_coef * std::pow(tail_ratio, H) / (1.0 - tail_ratio);
  return v;
}

GammaSequence GammaSequence::geometric(double C, double rho) {
  return GammaSequence{{}, C, rho};
}

GammaSequence GammaSequence::capped_geometric(double C, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("capped_geometric: need 0 < rho < 1");
  GammaSequence g;
  double v = C;
  while (v > 2.0) {
    g.head.push_back(2.0);
    v *= rho;
  }
  g.tail_coef = C;
  g.tail_ratio = rho;
  return g;
}

GammaSequence GammaSequence::constant(double c) {
  return GammaSequence{{}, c, 1.0};
}

GammaSeriesBounds gamma_series_bounds(const GammaSequence& gamma, double dP) {
  GammaSeriesBounds out;
  out.gamma = gamma;
  out.dP = dP;
  bool nonneg = gamma.tail_coef >= 0.0;
  for (double g : gamma.head) nonneg = nonneg && g >= 0.0;
  out.feasible.require("gamma nonnegative", nonneg);
  out.feasible.require("dP >= 0", dP >= 0.0);
  out.gamma_total = gamma.total();
  out.stationary_bound = out.feasible.ok ? out.gamma_total * dP : kNaN;
  return out;
}

UniformGeometricGamma uniform_geometric_gamma(double C, double rho, double dP) {
  UniformGeometricGamma out;
  out.C = C;
  out.cor_rho = rho;
  out.dP = dP;
  out.feasible.require("C > 0", C > 0.0);
  out.feasible.require("0 < cor_rho < 1", rho > 0.0 && rho < 1.0);
  out.feasible.require("dP >= 0", dP >= 0.0);
  if (!out.feasible.ok) return out;

  out.floor_index = static_cast<long long>(
      std::floor(std::log(2.0 / C) / std::log(rho)));
  int k0 = 0;
  for (double v = C; v > 2.0; v *= rho) ++k0;
  out.capped_terms = k0;
  // direct sum: capped prefix plus the exact geometric tail
  out.gamma_total_direct = 2.0 * k0 + C * std::pow(rho, k0) / (1.0 - rho);
  out.gamma_total_formula =
      2.0 + 2.0 * static_cast<double>(out.floor_index) +
      C / (1.0 - rho) * std::pow(rho, 1.0 + static_cast<double>(out.floor_index));
  out.formula_agrees =
      std::abs(out.gamma_total_direct - out.gamma_total_formula) <=
      1e-9 * std::max(1.0, std::abs(out.gamma_total_direct));
  out.stationary_bound = out.gamma_total_direct * dP;
  return out;
}

double UniformGeometricGamma::kernel_bound(int n) const {
  if (!feasible.ok) return kNaN;
  const int k = std::min<long long>(n, capped_terms);
  double g = 2.0 * k;
  if (n > capped_terms)
    g += C * (std::pow(cor_rho, capped_terms) - std::pow(cor_rho, n)) /
         (1.0 - cor_rho);
  return g * dP;
}

double UniformGeometricGamma::kernel_bound_formula(int n) const {
  if (!feasible.ok) return kNaN;
  double g = 2.0 + 2.0 * static_cast<double>(floor_index) +
             C / (1.0 - cor_rho) *
                 (std::pow(cor_rho, 1.0 + static_cast<double>(floor_index)) -
                  std::pow(cor_rho, n));
  return g * dP;
}

DobrushinPerturbation dobrushin_perturbation(double delta, int N, double dP) {
  DobrushinPerturbation out;
  out.delta = delta;
  out.N = N;
  out.dP = dP;
  out.feasible.require("N >= 1", N >= 1);
  out.feasible.require("0 <= delta < 1", delta >= 0.0 && delta < 1.0);
  out.feasible.require("dP >= 0", dP >= 0.0);
  if (!out.feasible.ok) return out;
  out.stationary_bound = 2.0 * N / (1.0 - delta) * dP;
  return out;
}

double DobrushinPerturbation::kernel_bound(int n) const {
  if (!feasible.ok) return kNaN;
  return 2.0 * N * (1.0 - std::pow(delta, n)) / (1.0 - delta) * dP;
}

HitMomentBound hitmoment_bound(double M, double lambda) {
  HitMomentBound out;
  out.M = M;
  out.lambda = lambda;
  out.window_hi = exp_inv(M);
  out.feasible.require("M >= 0", M >= 0.0);
  out.feasible.require("lambda > 1", lambda > 1.0);
  out.feasible.require("lambda < e^{1/M}", lambda < out.window_hi);
  if (!out.feasible.ok) return out;
  out.bound = lambda / (1.0 - M * std::log(lambda));
  return out;
}

AtomicRate atomic_rate(double M, double piA, double lambda) {
  AtomicRate out;
  out.M = M;
  out.piA = piA;
  out.lambda = lambda;
  const double ehi = exp_inv(M);
  out.feasible.require("M >= 0", M >= 0.0);
  out.feasible.require("0 < pi(A) <= 1", piA > 0.0 && piA <= 1.0);
  out.feasible.require("lambda > 1", lambda > 1.0);
  out.feasible.require("lambda < e^{1/M}", lambda < ehi);
  if (!out.feasible.ok) return out;

  out.C1 = std::sqrt(1.0 / piA - 1.0);
  out.M1 = lambda / (1.0 - M * std::log(lambda));
  const double q = tail_ratio_factor(ehi, lambda);
  out.D1 = out.C1 * (1.0 - q * out.M1);
  out.E1 = out.M1 * (pos_part(2.0 - out.C1) / lambda + q * out.C1);
  out.curve.add_geometric(out.D1, M > 0.0 ? std::exp(-1.0 / M) : 0.0);
  out.curve.add_geometric(out.E1, 1.0 / lambda);
  return out;
}

AtomicPerturbation atomic_perturbation(double M, double piA, double lambda,
                                       double dP) {
  AtomicPerturbation out;
  out.rate = atomic_rate(M, piA, lambda);
  out.dP = dP;
  out.feasible = out.rate.feasible;
  out.feasible.require("dP >= 0", dP >= 0.0);
  if (!out.feasible.ok) return out;
  const double ehi = exp_inv(M);
  const double lead = std::isinf(ehi) ? 1.0 : ehi / (ehi - 1.0);
  out.stationary_bound =
      (lead * out.rate.D1 + lambda / (lambda - 1.0) * out.rate.E1) * dP;
  return out;
}

double AtomicPerturbation::kernel_bound(int n) const {
  if (!feasible.ok) return kNaN;
  const double ehi = exp_inv(rate.M);
  const double lead = std::isinf(ehi) ? 1.0 : ehi / (ehi - 1.0);
  const double r1 = rate.M > 0.0 ? std::exp(-1.0 / rate.M) : 0.0;
  return (lead * rate.D1 * (1.0 - std::pow(r1, n)) +
          rate.lambda / (rate.lambda - 1.0) * rate.E1 *
              (1.0 - std::pow(rate.lambda, -n))) *
         dP;
}

SplitMomentConstants split_moment_constants(double L, double kappa,
                                            double delta, double M,
                                            double lambda) {
  SplitMomentConstants out;
  out.L = L;
  out.kappa = kappa;
  out.delta = delta;
  out.M = M;
  out.lambda = lambda;

  out.feasible_i.require("kappa > 1", kappa > 1.0);
  out.feasible_i.require("L >= kappa", L >= kappa);
  out.feasible_i.require("0 < delta < 1", delta > 0.0 && delta < 1.0);
  out.feasible_i.require("lambda > 1", lambda > 1.0);
  if (out.feasible_i.ok) {
    out.alpha = std::log((L - delta * kappa) / (1.0 - delta)) / std::log(kappa);
    out.beta =
        std::log((L - (1.0 - delta) * kappa) / delta) / std::log(kappa);
    out.K = std::min(kappa, std::pow(1.0 - delta, -1.0 / out.alpha));
    out.feasible_i.require("lambda < K", lambda < out.K);
    if (out.feasible_i.ok)
      out.atom_moment_bound =
          delta * std::pow(lambda, out.beta) /
          (1.0 - (1.0 - delta) * std::pow(lambda, out.alpha));
  }

  const double ehi = exp_inv(M);
  out.feasible_ii.require("M >= 0", M >= 0.0);
  out.feasible_ii.require("0 < delta < 1", delta > 0.0 && delta < 1.0);
  out.feasible_ii.require("lambda > 1", lambda > 1.0);
  out.feasible_ii.require("lambda < e^{1/M}", lambda < ehi);
  if (out.feasible_ii.ok) {
    const double denom =
        (1.0 + delta * lambda) * (1.0 - M * std::log(lambda)) - lambda;
    out.feasible_ii.require(
        "lmd1: lambda < (1+delta*lambda)(1-M*log(lambda))", denom > 0.0);
    if (out.feasible_ii.ok) out.M2 = delta * lambda / denom;
  }

  // positive root of delta*M*l^2 + (M+1)(1-delta)*l - (M+1) = 0, a sufficient
  // lambda for the lmd1 window
  if (M >= 0.0 && delta > 0.0 && delta < 1.0) {
    const double a = delta * M;
    const double b = (M + 1.0) * (1.0 - delta);
    const double c = -(M + 1.0);
    if (a > 0.0)
      out.lambda_quadratic = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
    else
      out.lambda_quadratic = -c / b;  // M = 0 degenerates to linear
  }
  return out;
}

NonatomicRate nonatomic_rate(double M, double delta, double piA,
                             double lambda) {
  NonatomicRate out;
  out.M = M;
  out.delta = delta;
  out.piA = piA;
  out.lambda = lambda;
  const double ehi = exp_inv(M);
  out.feasible.require("M >= 0", M >= 0.0);
  out.feasible.require("0 < delta < 1", delta > 0.0 && delta < 1.0);
  out.feasible.require("0 < pi(A) <= 1", piA > 0.0 && piA <= 1.0);
  out.feasible.require("lambda > 1", lambda > 1.0);
  out.feasible.require("lambda < e^{1/M}", lambda < ehi);
  if (!out.feasible.ok) return out;
  const double denom =
      (1.0 + delta * lambda) * (1.0 - M * std::log(lambda)) - lambda;
  out.feasible.require("lmd1: lambda < (1+delta*lambda)(1-M*log(lambda))",
                       denom > 0.0);
  if (!out.feasible.ok) return out;

  out.C2 = std::sqrt(1.0 / (delta * piA) - 1.0);
  out.M2 = delta * lambda / denom;
  out.D2 = out.C2 + pos_part(2.0 - out.C2) / lambda * out.M2;
  out.E2 = out.C2 * (1.0 - 1.0 / lambda) * out.M2;
  out.curve.add_geometric(out.D2, 1.0 / lambda);
  out.curve.add_linear_geometric(out.E2, 1.0 / lambda);
  return out;
}

NonatomicPerturbation nonatomic_perturbation(double M, double delta,
                                             double piA, double lambda,
                                             double dP) {
  NonatomicPerturbation out;
  out.rate = nonatomic_rate(M, delta, piA, lambda);
  out.dP = dP;
  out.feasible = out.rate.feasible;
  out.feasible.require("dP >= 0", dP >= 0.0);
  if (!out.feasible.ok) return out;
  out.stationary_bound =
      lambda / (lambda - 1.0) *
      (out.rate.D2 + out.rate.E2 / (lambda - 1.0)) * dP;
  return out;
}

double NonatomicPerturbation::kernel_bound(int n) const {
  if (!feasible.ok) return kNaN;
  const double l = rate.lambda;
  const double inner = rate.D2 + rate.E2 / (l - 1.0);
  return l / (l - 1.0) *
         (inner - (inner + rate.E2 * n) * std::pow(l, -n)) * dP;
}

GeometricRateConstants geometric_rate_constants(double L, double kappa,
                                                double delta, double nuA,
                                                double theta) {
  GeometricRateConstants out;
  out.L = L;
  out.kappa = kappa;
  out.delta = delta;
  out.nuA = nuA;
  out.theta = theta;

  out.feasible_K.require("kappa > 1", kappa > 1.0);
  out.feasible_K.require("L >= kappa", L >= kappa);
  out.feasible_K.require("0 < delta <= 1", delta > 0.0 && delta <= 1.0);
  if (out.feasible_K.ok) {
    if (delta == 1.0) {
      // atom limit: (1-delta)^{-1/alpha} -> kappa as delta -> 1
      out.alpha = kInf;
      out.K = kappa;
    } else {
      out.alpha =
          std::log((L - delta * kappa) / (1.0 - delta)) / std::log(kappa);
      out.K = std::min(kappa, std::pow(1.0 - delta, -1.0 / out.alpha));
    }
  }

  out.feasible_Gamma.require("kappa > 1", kappa > 1.0);
  out.feasible_Gamma.require("L >= kappa", L >= kappa);
  out.feasible_Gamma.require("0 < delta <= 1", delta > 0.0 && delta <= 1.0);
  out.feasible_Gamma.require("0 < nu(A) <= 1", nuA > 0.0 && nuA <= 1.0);
  out.feasible_Gamma.require("0 <= theta < 1", theta >= 0.0 && theta < 1.0);
  const double dbar = delta * delta * nuA;
  out.feasible_Gamma.require("delta^2 nu(A) < 1", dbar < 1.0);
  if (out.feasible_Gamma.ok) {
    out.gamma_exponent =
        std::log((L * L / (1.0 - theta) - dbar * kappa * kappa) / (1.0 - dbar)) /
        std::log(kappa);
    out.Gamma_rate =
        std::min(kappa, std::pow(1.0 - dbar, -1.0 / out.gamma_exponent));
  }
  return out;
}

ReversibleAtomicRate reversible_atomic_rate(
    double M, double piA, const std::function<double(double)>& even_series_sup,
    double lambda) {
  ReversibleAtomicRate out;
  out.M = M;
  out.piA = piA;
  out.lambda = lambda;
  const double ehi = exp_inv(M);
  out.feasible.require("M >= 0", M >= 0.0);
  out.feasible.require("0 < pi(A) <= 1", piA > 0.0 && piA <= 1.0);
  out.feasible.require("lambda > 1", lambda > 1.0);
  out.feasible.require("lambda < e^{1/M}", lambda < ehi);
  if (!out.feasible.ok) return out;
  out.feasible.require("even-return mass at s=1 below 1",
                       even_series_sup(1.0) < 1.0);
  if (!out.feasible.ok) return out;

  // varrho = sup{s < e^{1/M} : sup_{x in A} F^{(0)}(s) < 1}; the series sup
  // is increasing in s, so bisect; report the certified-feasible endpoint
  double hi = std::isfinite(ehi) ? ehi : 1e8;
  double varrho;
  if (even_series_sup(hi * (1.0 - 1e-12)) < 1.0) {
    varrho = hi;
  } else {
    double lo = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      if (even_series_sup(mid) < 1.0)
        lo = mid;
      else
        hi = mid;
    }
    varrho = lo;
  }
  out.skeleton_radius = varrho;

  out.C1 = std::sqrt(1.0 / piA - 1.0);
  out.M1 = lambda / (1.0 - M * std::log(lambda));
  const double tol_eq = 1e-12 * std::max(1.0, varrho);
  out.equal_branch = std::abs(lambda - varrho) <= tol_eq;
  out.near_equal_warning =
      !out.equal_branch &&
      std::abs(lambda - varrho) < 1e-6 * std::max(1.0, varrho);
  if (out.equal_branch) {
    out.J1 = out.C1 + pos_part(2.0 - out.C1) / varrho * out.M1;
    out.K1 = out.C1 * (1.0 - 1.0 / varrho) * out.M1;
    out.curve.add_geometric(out.J1, 1.0 / varrho);
    out.curve.add_linear_geometric(out.K1, 1.0 / varrho);
  } else {
    const double q = (varrho - 1.0) / (varrho - lambda);
    out.F1 = out.C1 * (1.0 - q * out.M1);
    out.G1 = out.M1 * (pos_part(2.0 - out.C1) / lambda + q * out.C1);
    out.curve.add_geometric(out.F1, 1.0 / varrho);
    out.curve.add_geometric(out.G1, 1.0 / lambda);
  }
  return out;
}

ReversibleNonatomicRate reversible_nonatomic_rate(double M, double delta,
                                                  double nuA, double piA,
                                                  double vartheta,
                                                  double lambda) {
  ReversibleNonatomicRate out;
  out.M = M;
  out.delta = delta;
  out.nuA = nuA;
  out.piA = piA;
  out.vartheta = vartheta;
  out.lambda = lambda;
  const double ehi = exp_inv(M);
  out.feasible.require("M >= 0", M >= 0.0);
  out.feasible.require("0 < delta <= 1", delta > 0.0 && delta <= 1.0);
  out.feasible.require("0 < nu(A) <= 1", nuA > 0.0 && nuA <= 1.0);
  out.feasible.require("0 < pi(A) <= 1", piA > 0.0 && piA <= 1.0);
  const double dbar = delta * delta * nuA;
  out.feasible.require("delta^2 nu(A) < 1", dbar < 1.0);
  out.feasible.require("tht: 0 <= vartheta < 1",
                       vartheta >= 0.0 && vartheta < 1.0);
  out.feasible.require("lambda > 1", lambda > 1.0);
  out.feasible.require("lambda < e^{1/M}", lambda < ehi);
  if (!out.feasible.ok) return out;
  const double mlog = 1.0 - M * std::log(lambda);
  const double denom = (1.0 - vartheta) * mlog * mlog *
                           (1.0 + dbar * lambda * lambda) -
                       lambda * lambda;
  out.feasible.require(
      "thtt: lambda^2 < (1-vartheta)(1-M*log(lambda))^2(1+delta^2*nu(A)*lambda^2)",
      denom > 0.0);
  if (!out.feasible.ok) return out;

  out.C3 = std::sqrt(1.0 / (dbar * piA) - 1.0);
  out.M3 = dbar * lambda * lambda / denom;
  out.D3 = out.C3 * lambda + pos_part(2.0 - out.C3) / lambda * out.M3;
  out.E3 = out.C3 * (lambda - 1.0 / lambda) * out.M3 / 2.0;
  out.curve.add_geometric(out.D3, 1.0 / lambda);
  out.curve.add_linear_geometric(out.E3, 1.0 / lambda);
  return out;
}

ReversiblePerturbation reversible_perturbation(const ReversibleAtomicRate& rate,
                                               double dP) {
  ReversiblePerturbation out;
  out.dP = dP;
  out.feasible = rate.feasible;
  out.feasible.require("dP >= 0", dP >= 0.0);
  out.curve = rate.curve;
  out.equal_branch = rate.equal_branch;
  out.varrho = rate.skeleton_radius;
  out.lambda = rate.lambda;
  out.F1 = rate.F1;
  out.G1 = rate.G1;
  out.J1 = rate.J1;
  out.K1 = rate.K1;
  out.atomic_route = true;
  if (!out.feasible.ok) return out;
  const double rho = rate.skeleton_radius;
  if (rate.equal_branch)
    out.stationary_bound =
        rho / (rho - 1.0) * (rate.J1 + rate.K1 / (rho - 1.0)) * dP;
  else
    out.stationary_bound = (rho / (rho - 1.0) * rate.F1 +
                            rate.lambda / (rate.lambda - 1.0) * rate.G1) *
                           dP;
  return out;
}

ReversiblePerturbation reversible_perturbation(
    const ReversibleNonatomicRate& rate, double dP) {
  ReversiblePerturbation out;
  out.dP = dP;
  out.feasible = rate.feasible;
  out.feasible.require("dP >= 0", dP >= 0.0);
  out.curve = rate.curve;
  out.lambda = rate.lambda;
  out.D3 = rate.D3;
  out.E3 = rate.E3;
  out.atomic_route = false;
  if (!out.feasible.ok) return out;
  const double l = rate.lambda;
  out.stationary_bound =
      l / (l - 1.0) * (rate.D3 + rate.E3 / (l - 1.0)) * dP;
  return out;
}

double ReversiblePerturbation::kernel_bound(int n) const {
  if (!feasible.ok) return kNaN;
  if (atomic_route) {
    if (equal_branch) {
      const double inner = J1 + K1 / (varrho - 1.0);
      return varrho / (varrho - 1.0) *
             (inner - (inner + K1 * n) * std::pow(varrho, -n)) * dP;
    }
    return (varrho / (varrho - 1.0) * F1 * (1.0 - std::pow(varrho, -n)) +
            lambda / (lambda - 1.0) * G1 * (1.0 - std::pow(lambda, -n))) *
           dP;
  }
  const double inner = D3 + E3 / (lambda - 1.0);
  return lambda / (lambda - 1.0) *
         (inner - (inner + E3 * n) * std::pow(lambda, -n)) * dP;
}

GeneralPerturbation general_perturbation(double M, double lambda, double dP) {
  GeneralPerturbation out;
  out.M = M;
  out.lambda = lambda;
  out.dP = dP;
  const double ehi = exp_inv(M);
  out.feasible.require("M >= 0", M >= 0.0);
  out.feasible.require("lambda > 1", lambda > 1.0);
  out.feasible.require("lambda < e^{1/M}", lambda < ehi);
  out.feasible.require("dP >= 0", dP >= 0.0);
  if (!out.feasible.ok) return out;
  out.M0 = 1.0 / (1.0 - M * std::log(lambda));
  out.threshold = (1.0 - 1.0 / lambda) / (out.M0 + out.M0 * out.M0);
  out.feasible.require("dP < (1-1/lambda)/(M0+M0^2)", dP < out.threshold);
  if (!out.feasible.ok) return out;
  out.stationary_bound =
      out.M0 * out.M0 * (1.0 + out.M0) * dP /
      (1.0 - 1.0 / lambda - out.M0 * (1.0 + out.M0) * dP);
  return out;
}

std::vector<double> lambda_grid(double lo, double hi, int count) {
  std::vector<double> out;
  if (!(lo > 0.0) || !(hi > lo) || count < 1) return out;
  if (!std::isfinite(hi)) hi = lo * 1e6;
  const double margin = 1e-3;
  for (int i = 0; i < count; ++i) {
    double t = count == 1
                   ? 0.5
                   : margin + (1.0 - 2.0 * margin) * i / (count - 1.0);
    out.push_back(lo * std::pow(hi / lo, t));
  }
  return out;
}

std::vector<double> envelope(const std::vector<BoundCurve>& curves, int n_max) {
  std::vector<double> out(static_cast<size_t>(n_max) + 1, kInf);
  for (int n = 0; n <= n_max; ++n)
    for (const auto& c : curves)
      out[static_cast<size_t>(n)] = std::min(out[static_cast<size_t>(n)], c(n));
  return out;
}

}  // namespace ergo::bounds
