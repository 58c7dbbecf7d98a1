#include "ergo/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ergo::eval {

namespace b = ergo::bounds;

ExactInputs exact_inputs(const FiniteChain& chain, const StateSet& A) {
  ExactInputs out{A, std::nullopt, 0.0, 0.0, 0.0, 0.0,
                  false, false, false, 1.0, b::kInf};
  for (int a : A.members()) out.piA += chain.pi()(a);
  out.M = sigma_power_moment(chain, A, 1).maxCoeff();
  out.lambda_hi = out.M > 0.0 ? std::exp(1.0 / out.M) : b::kInf;
  out.cert = find_minorization(chain, A);
  if (out.cert) {
    out.delta = out.cert->delta;
    for (int a : A.members()) out.nuA += out.cert->nu(a);
    out.is_atom = out.delta >= 1.0 - kStructuralTol;
  }
  out.reversible = check_reversible(chain).reversible;
  out.nonneg_definite =
      check_nonneg_definite(chain).result == Definiteness::nonnegative;
  out.r0 = spectral_r0(chain).r0;
  return out;
}

std::function<double(double)> even_series_fn(const FiniteChain& chain,
                                             const StateSet& A) {
  return [kernel = chain.kernel(), A](double s) {
    return sup_even_return_series(kernel, A, s);
  };
}

double even_series_radius(const std::function<double(double)>& fn, double M) {
  if (!(fn(1.0) < 1.0)) return 1.0;
  double hi = M > 0.0 ? std::exp(1.0 / M) : 1e8;
  if (fn(hi * (1.0 - 1e-12)) < 1.0) return hi;
  double lo = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (fn(mid) < 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

std::optional<DobrushinPick> dobrushin_pick(const FiniteChain& chain,
                                            double threshold, int cap) {
  for (int N = 1; N <= cap; ++N) {
    double d = dobrushin_coefficient(chain, N);
    if (d <= threshold) return DobrushinPick{N, d};
  }
  return std::nullopt;
}

std::optional<UniformCertificate> uniform_certificate(
    const FiniteChain& chain) {
  if (check_reversible(chain).reversible) {
    double r0 = spectral_r0(chain).r0;
    if (r0 < 1.0) {
      double C = 0.0;
      for (int x = 0; x < chain.n_states(); ++x)
        C = std::max(C, std::sqrt(1.0 / chain.pi()(x) - 1.0));
      return UniformCertificate{C, r0, true, 0, b::kNaN};
    }
  }
  auto pick = dobrushin_pick(chain);
  if (!pick) return std::nullopt;
  // tv(n) <= 2 delta_N^{floor(n/N)} <= (2/delta_N)(delta_N^{1/N})^n
  double d = std::max(pick->deltaN, 1e-12);
  return UniformCertificate{2.0 / d, std::pow(d, 1.0 / pick->N), false,
                            pick->N, pick->deltaN};
}

std::optional<bounds::GammaSequence> certified_gamma(const FiniteChain& chain,
                                                     int head_len) {
  auto pick = dobrushin_pick(chain);
  if (!pick) return std::nullopt;
  std::vector<double> tv = tv_profile(chain, head_len);
  const double tv_h = tv.back();
  b::GammaSequence g;
  g.head.assign(tv.begin(), tv.end() - 1);
  const double d = std::max(pick->deltaN, 1e-12);
  // tv(h+j) <= tv(h) d^{floor(j/N)} <= (tv(h)/d) (d^{1/N})^j
  g.tail_ratio = std::pow(d, 1.0 / pick->N);
  g.tail_coef = tv_h / d * std::pow(g.tail_ratio, -head_len);
  return g;
}

double default_kappa(double M, double kappa_cap) {
  if (M <= 0.0) return kappa_cap;
  return std::min(std::exp(0.5 / M), kappa_cap);
}

double lmd1_window_top(double M, double delta) {
  if (M <= 0.0) {
    if (delta >= 1.0) return b::kInf;
    return 1.0 / (1.0 - delta);
  }
  double lo = 1.0;
  double hi = std::exp(1.0 / M);
  auto g = [&](double l) {
    return (1.0 + delta * l) * (1.0 - M * std::log(l)) - l;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

const std::vector<std::string>& bound_op_names() {
  static const std::vector<std::string> names = {
      "gamma_series_bounds",      "uniform_geometric_gamma",
      "dobrushin_perturbation",   "hitmoment_bound",
      "atomic_rate",              "atomic_perturbation",
      "split_moment_constants",   "nonatomic_rate",
      "nonatomic_perturbation",   "geometric_rate_constants",
      "reversible_atomic_rate",   "reversible_nonatomic_rate",
      "reversible_perturbation",  "general_perturbation"};
  return names;
}

std::string canonical_op(const std::string& name) {
  static const std::map<std::string, std::string> aliases = {
      {"gamma_series", "gamma_series_bounds"},
      {"uniform_geometric", "uniform_geometric_gamma"},
      {"dobrushin", "dobrushin_perturbation"},
      {"hitmoment", "hitmoment_bound"},
      {"split_moment", "split_moment_constants"},
      {"geometric_rate", "geometric_rate_constants"},
      {"general", "general_perturbation"}};
  for (const auto& n : bound_op_names())
    if (n == name) return n;
  auto it = aliases.find(name);
  return it != aliases.end() ? it->second : std::string();
}

namespace {

using Constants = std::vector<std::pair<std::string, double>>;

b::Feasibility with_structural(const std::vector<b::WindowCheck>& structural,
                               const b::Feasibility& inner) {
  b::Feasibility f;
  for (const auto& w : structural) f.require(w.name, w.holds);
  for (const auto& w : inner.windows) f.require(w.name, w.holds);
  return f;
}

std::vector<double> sample_curve(const b::BoundCurve& c, int n_max) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) out.push_back(c(n));
  return out;
}

template <typename F>
std::vector<double> sample_fn(F&& f, int n_max) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) out.push_back(f(n));
  return out;
}

void finish_report(EvalReport& rep, int n_max) {
  std::vector<double> env(static_cast<size_t>(n_max) + 1, b::kInf);
  bool any_curve = false;
  for (const auto& r : rep.results) {
    if (!r.feasible.ok) continue;
    const std::vector<double>& c = !r.curve.empty() ? r.curve : r.kernel_curve;
    if (!c.empty()) {
      any_curve = true;
      for (size_t i = 0; i < env.size() && i < c.size(); ++i)
        env[i] = std::min(env[i], c[i]);
    }
    if (!std::isnan(r.stationary_bound))
      rep.stationary_best = std::min(rep.stationary_best, r.stationary_bound);
  }
  if (any_curve) rep.envelope = std::move(env);
}

}  // namespace

EvalReport evaluate_bound(const FiniteChain& chain, const EvalRequest& req) {
  const std::string op = canonical_op(req.op);
  if (op.empty())
    throw std::invalid_argument("unknown bound operation: " + req.op);

  EvalReport rep;
  rep.op = op;
  const int n_max = req.n_max;

  const bool needs_A = op != "gamma_series_bounds" &&
                       op != "uniform_geometric_gamma" &&
                       op != "dobrushin_perturbation";

  // parameter-free chain-level ops
  if (op == "gamma_series_bounds") {
    auto gamma = certified_gamma(chain);
    if (!gamma) {
      rep.admissible = false;
      rep.rejection = "no Dobrushin contraction window found (the chain may "
                      "be periodic)";
      return rep;
    }
    auto r = b::gamma_series_bounds(*gamma, req.dP);
    OpEvaluation ev;
    ev.feasible = r.feasible;
    ev.constants = {{"gamma_total", r.gamma_total},
                    {"head_length", static_cast<double>(gamma->head.size())},
                    {"tail_coef", gamma->tail_coef},
                    {"tail_ratio", gamma->tail_ratio},
                    {"dP", req.dP},
                    {"stationary_bound", r.stationary_bound}};
    ev.stationary_bound = r.stationary_bound;
    if (ev.feasible.ok) {
      ev.curve = sample_fn([&](int n) { return gamma->at(n); }, n_max);
      ev.kernel_curve = sample_fn([&](int n) { return r.kernel_bound(n); }, n_max);
    }
    rep.results.push_back(std::move(ev));
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "uniform_geometric_gamma") {
    auto cu = uniform_certificate(chain);
    if (!cu) {
      rep.admissible = false;
      rep.rejection = "no certified uniform-ergodic pair (C, rho) available";
      return rep;
    }
    auto r = b::uniform_geometric_gamma(cu->C, cu->rho, req.dP);
    OpEvaluation ev;
    ev.feasible = r.feasible;
    ev.constants = {{"C", r.C},
                    {"cor_rho", r.cor_rho},
                    {"dP", req.dP},
                    {"floor_index", static_cast<double>(r.floor_index)},
                    {"capped_terms", static_cast<double>(r.capped_terms)},
                    {"gamma_total_direct", r.gamma_total_direct},
                    {"gamma_total_formula", r.gamma_total_formula},
                    {"formula_agrees", r.formula_agrees ? 1.0 : 0.0},
                    {"certificate_from_spectrum", cu->from_spectrum ? 1.0 : 0.0},
                    {"stationary_bound", r.stationary_bound}};
    ev.stationary_bound = r.stationary_bound;
    if (ev.feasible.ok) {
      ev.curve = sample_fn(
          [&](int n) { return std::min(2.0, r.C * std::pow(r.cor_rho, n)); },
          n_max);
      ev.kernel_curve = sample_fn([&](int n) { return r.kernel_bound(n); }, n_max);
    }
    rep.results.push_back(std::move(ev));
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "dobrushin_perturbation") {
    auto pick = dobrushin_pick(chain);
    if (!pick) {
      rep.admissible = false;
      rep.rejection = "no Dobrushin contraction window found (the chain may "
                      "be periodic)";
      return rep;
    }
    auto r = b::dobrushin_perturbation(pick->deltaN, pick->N, req.dP);
    OpEvaluation ev;
    ev.feasible = r.feasible;
    ev.constants = {{"delta_N", r.delta},
                    {"N", static_cast<double>(r.N)},
                    {"dP", req.dP},
                    {"stationary_bound", r.stationary_bound}};
    ev.stationary_bound = r.stationary_bound;
    if (ev.feasible.ok)
      ev.kernel_curve = sample_fn([&](int n) { return r.kernel_bound(n); }, n_max);
    rep.results.push_back(std::move(ev));
    finish_report(rep, n_max);
    return rep;
  }

  if (!needs_A) return rep;  // unreachable; keeps the structure explicit

  if (req.A.empty())
    throw std::invalid_argument("bound '" + op +
                                "' needs a target set (--set)");
  StateSet A(req.A, chain.n_states());
  ExactInputs in = exact_inputs(chain, A);
  if (req.cert_override) {
    MinorizationCertificate cert{A, req.cert_override->first,
                                 req.cert_override->second};
    const double viol = cert.max_violation(chain);
    if (viol > kStructuralTol)
      throw std::invalid_argument(
          "certificate override violated by the kernel (worst gap " +
          std::to_string(viol) + ")");
    in.cert = cert;
    in.delta = cert.delta;
    in.nuA = 0.0;
    for (int a : A.members()) in.nuA += cert.nu(a);
    in.is_atom = in.delta >= 1.0 - kStructuralTol;
  }
  rep.inputs = in;

  const double ehi = in.lambda_hi;
  auto auto_grid = [&](double hi) {
    if (!req.lambdas.empty()) return req.lambdas;
    return b::lambda_grid(1.0, hi, req.grid_count);
  };

  if (op == "hitmoment_bound") {
    for (double l : auto_grid(ehi)) {
      auto r = b::hitmoment_bound(in.M, l);
      OpEvaluation ev;
      ev.lambda = l;
      ev.feasible = r.feasible;
      double exact_sup = b::kNaN;
      if (r.feasible.ok)
        exact_sup = geometric_moments(chain, A, l).sigma_moment.maxCoeff();
      ev.constants = {{"M", in.M},
                      {"lambda", l},
                      {"window_hi", r.window_hi},
                      {"M_bound", r.bound},
                      {"exact_sup", exact_sup}};
      rep.results.push_back(std::move(ev));
    }
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "atomic_rate" || op == "atomic_perturbation") {
    std::vector<b::WindowCheck> structural = {
        {"chain reversible", in.reversible},
        {"chain non-negative definite", in.nonneg_definite},
        {"A is an atom", in.is_atom}};
    if (!in.reversible || !in.nonneg_definite || !in.is_atom) {
      rep.admissible = false;
      rep.rejection = !in.reversible ? "chain is not reversible"
                      : !in.nonneg_definite
                          ? "chain is not non-negative definite"
                          : "A is not an atom (rows on A differ)";
      return rep;
    }
    for (double l : auto_grid(ehi)) {
      OpEvaluation ev;
      ev.lambda = l;
      if (op == "atomic_rate") {
        auto r = b::atomic_rate(in.M, in.piA, l);
        ev.feasible = with_structural(structural, r.feasible);
        ev.constants = {{"M", in.M}, {"pi_A", in.piA}, {"C1", r.C1},
                        {"M1", r.M1}, {"D1", r.D1},     {"E1", r.E1}};
        if (ev.feasible.ok) ev.curve = sample_curve(r.curve, n_max);
      } else {
        auto r = b::atomic_perturbation(in.M, in.piA, l, req.dP);
        ev.feasible = with_structural(structural, r.feasible);
        ev.constants = {{"M", in.M},           {"pi_A", in.piA},
                        {"C1", r.rate.C1},     {"M1", r.rate.M1},
                        {"D1", r.rate.D1},     {"E1", r.rate.E1},
                        {"dP", req.dP},        {"stationary_bound",
                                                r.stationary_bound}};
        ev.stationary_bound = r.stationary_bound;
        if (ev.feasible.ok)
          ev.kernel_curve =
              sample_fn([&](int n) { return r.kernel_bound(n); }, n_max);
      }
      rep.results.push_back(std::move(ev));
    }
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "split_moment_constants" || op == "geometric_rate_constants" ||
      op == "nonatomic_rate" || op == "nonatomic_perturbation" ||
      op == "reversible_nonatomic_rate") {
    if (!in.cert) {
      rep.admissible = false;
      rep.rejection =
          "no minorization certificate on A (a kernel column vanishes on A)";
      return rep;
    }
  }

  // geometric moments at kappa, shared by the two L-based ops
  double kappa = b::kNaN;
  double L = b::kNaN;
  if (op == "split_moment_constants" || op == "geometric_rate_constants") {
    kappa = req.kappa > 0.0 ? req.kappa : default_kappa(in.M);
    if (kappa >= 1.0) {
      try {
        L = geometric_moments(chain, A, kappa).L;
      } catch (const DivergenceError&) {
        L = b::kInf;  // kappa outside the disk; windows will fail
      }
    }  // kappa < 1: L stays NaN and the kappa window fails downstream
    rep.kappa = kappa;
    rep.L = L;
  }

  if (op == "split_moment_constants") {
    // at delta = 1 (within tolerance) the residual kernel vanishes and the
    // split construction degenerates; the atomic bounds cover that case
    std::vector<b::WindowCheck> structural = {
        {"minorization certificate valid", true},
        {"A is not an atom (split route needs delta < 1)", !in.is_atom}};
    // part (i) sweeps inside (1, K); compute K once from a probe call
    auto probe = b::split_moment_constants(L, kappa, in.delta, in.M, 2.0);
    const double hi_i = std::isfinite(probe.K) && probe.K > 1.0 ? probe.K : ehi;
    const double hi_ii = std::min(ehi, lmd1_window_top(in.M, in.delta));
    for (double l : auto_grid(hi_i)) {
      auto r = b::split_moment_constants(L, kappa, in.delta, in.M, l);
      OpEvaluation ev;
      ev.lambda = l;
      ev.variant = "atom_moment";
      ev.feasible = with_structural(structural, r.feasible_i);
      ev.constants = {{"L", L},
                      {"kappa", kappa},
                      {"delta", in.delta},
                      {"alpha", r.alpha},
                      {"beta", r.beta},
                      {"K", r.K},
                      {"atom_moment_bound", r.atom_moment_bound},
                      {"lambda_quadratic", r.lambda_quadratic}};
      rep.results.push_back(std::move(ev));
    }
    for (double l : req.lambdas.empty() ? b::lambda_grid(1.0, hi_ii, req.grid_count)
                                        : req.lambdas) {
      auto r = b::split_moment_constants(L, kappa, in.delta, in.M, l);
      OpEvaluation ev;
      ev.lambda = l;
      ev.variant = "sup_moment";
      ev.feasible = with_structural(structural, r.feasible_ii);
      ev.constants = {{"M", in.M},
                      {"delta", in.delta},
                      {"M2", r.M2},
                      {"lambda_quadratic", r.lambda_quadratic}};
      rep.results.push_back(std::move(ev));
    }
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "geometric_rate_constants") {
    if (!in.reversible) {
      rep.admissible = false;
      rep.rejection = "chain is not reversible";
      return rep;
    }
    auto fn = even_series_fn(chain, A);
    const double theta = fn(kappa);
    auto r = b::geometric_rate_constants(L, kappa, in.delta, in.nuA, theta);
    {
      OpEvaluation ev;
      ev.variant = "K";
      ev.feasible = with_structural(
          {{"chain reversible", in.reversible},
           {"chain non-negative definite", in.nonneg_definite}},
          r.feasible_K);
      ev.constants = {{"L", L},
                      {"kappa", kappa},
                      {"delta", in.delta},
                      {"alpha", r.alpha},
                      {"K", r.K}};
      rep.results.push_back(std::move(ev));
    }
    {
      OpEvaluation ev;
      ev.variant = "Gamma";
      ev.feasible = with_structural({{"chain reversible", in.reversible}},
                                    r.feasible_Gamma);
      ev.constants = {{"L", L},
                      {"kappa", kappa},
                      {"delta", in.delta},
                      {"nu_A", in.nuA},
                      {"theta", theta},
                      {"gamma_exponent", r.gamma_exponent},
                      {"Gamma_rate", r.Gamma_rate}};
      rep.results.push_back(std::move(ev));
    }
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "nonatomic_rate" || op == "nonatomic_perturbation") {
    std::vector<b::WindowCheck> structural = {
        {"chain reversible", in.reversible},
        {"chain non-negative definite", in.nonneg_definite}};
    if (!in.reversible || !in.nonneg_definite) {
      rep.admissible = false;
      rep.rejection = !in.reversible ? "chain is not reversible"
                                     : "chain is not non-negative definite";
      return rep;
    }
    const double hi = std::min(ehi, lmd1_window_top(in.M, in.delta));
    for (double l : auto_grid(hi)) {
      OpEvaluation ev;
      ev.lambda = l;
      if (op == "nonatomic_rate") {
        auto r = b::nonatomic_rate(in.M, in.delta, in.piA, l);
        ev.feasible = with_structural(structural, r.feasible);
        ev.constants = {{"M", in.M},   {"delta", in.delta},
                        {"pi_A", in.piA}, {"C2", r.C2},
                        {"M2", r.M2}, {"D2", r.D2},
                        {"E2", r.E2}};
        if (ev.feasible.ok) ev.curve = sample_curve(r.curve, n_max);
      } else {
        auto r = b::nonatomic_perturbation(in.M, in.delta, in.piA, l, req.dP);
        ev.feasible = with_structural(structural, r.feasible);
        ev.constants = {{"M", in.M},       {"delta", in.delta},
                        {"pi_A", in.piA},  {"C2", r.rate.C2},
                        {"M2", r.rate.M2}, {"D2", r.rate.D2},
                        {"E2", r.rate.E2}, {"dP", req.dP},
                        {"stationary_bound", r.stationary_bound}};
        ev.stationary_bound = r.stationary_bound;
        if (ev.feasible.ok)
          ev.kernel_curve =
              sample_fn([&](int n) { return r.kernel_bound(n); }, n_max);
      }
      rep.results.push_back(std::move(ev));
    }
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "reversible_atomic_rate") {
    std::vector<b::WindowCheck> structural = {
        {"chain reversible", in.reversible}, {"A is an atom", in.is_atom}};
    if (!in.reversible || !in.is_atom) {
      rep.admissible = false;
      rep.rejection = !in.reversible ? "chain is not reversible"
                                     : "A is not an atom (rows on A differ)";
      return rep;
    }
    auto fn = even_series_fn(chain, A);
    for (double l : auto_grid(ehi)) {
      auto r = b::reversible_atomic_rate(in.M, in.piA, fn, l);
      OpEvaluation ev;
      ev.lambda = l;
      ev.feasible = with_structural(structural, r.feasible);
      ev.constants = {{"M", in.M},
                      {"pi_A", in.piA},
                      {"skeleton_radius", r.skeleton_radius},
                      {"C1", r.C1},
                      {"M1", r.M1},
                      {"F1", r.F1},
                      {"G1", r.G1},
                      {"J1", r.J1},
                      {"K1", r.K1},
                      {"equal_branch", r.equal_branch ? 1.0 : 0.0},
                      {"near_equal_warning", r.near_equal_warning ? 1.0 : 0.0}};
      if (ev.feasible.ok) ev.curve = sample_curve(r.curve, n_max);
      rep.results.push_back(std::move(ev));
    }
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "reversible_nonatomic_rate") {
    std::vector<b::WindowCheck> structural = {
        {"chain reversible", in.reversible}};
    if (!in.reversible) {
      rep.admissible = false;
      rep.rejection = "chain is not reversible";
      return rep;
    }
    auto fn = even_series_fn(chain, A);
    const double radius = even_series_radius(fn, in.M);
    const double hi = std::min(ehi, radius);
    std::vector<double> grid = req.lambdas.empty()
                                   ? b::lambda_grid(1.0, hi, req.grid_count)
                                   : req.lambdas;
    if (grid.empty()) {
      OpEvaluation ev;
      ev.feasible = with_structural(structural, b::Feasibility{});
      ev.feasible.require("even-return mass at s=1 below 1", false);
      rep.results.push_back(std::move(ev));
      finish_report(rep, n_max);
      return rep;
    }
    for (double l : grid) {
      const double vt = fn(l);
      auto r = b::reversible_nonatomic_rate(in.M, in.delta, in.nuA, in.piA, vt, l);
      OpEvaluation ev;
      ev.lambda = l;
      ev.feasible = with_structural(structural, r.feasible);
      ev.constants = {{"M", in.M},     {"delta", in.delta},
                      {"nu_A", in.nuA}, {"pi_A", in.piA},
                      {"vartheta", vt}, {"C3", r.C3},
                      {"M3", r.M3},     {"D3", r.D3},
                      {"E3", r.E3}};
      if (ev.feasible.ok) ev.curve = sample_curve(r.curve, n_max);
      rep.results.push_back(std::move(ev));
    }
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "reversible_perturbation") {
    if (!in.reversible) {
      rep.admissible = false;
      rep.rejection = "chain is not reversible";
      return rep;
    }
    auto fn = even_series_fn(chain, A);
    if (in.is_atom) {
      std::vector<b::WindowCheck> structural = {
          {"chain reversible", in.reversible}, {"A is an atom", true}};
      for (double l : auto_grid(ehi)) {
        auto rate = b::reversible_atomic_rate(in.M, in.piA, fn, l);
        auto r = b::reversible_perturbation(rate, req.dP);
        OpEvaluation ev;
        ev.lambda = l;
        ev.variant = "atomic";
        ev.feasible = with_structural(structural, r.feasible);
        ev.constants = {{"M", in.M},
                        {"pi_A", in.piA},
                        {"skeleton_radius", rate.skeleton_radius},
                        {"F1", rate.F1},
                        {"G1", rate.G1},
                        {"J1", rate.J1},
                        {"K1", rate.K1},
                        {"equal_branch", rate.equal_branch ? 1.0 : 0.0},
                        {"dP", req.dP},
                        {"stationary_bound", r.stationary_bound}};
        ev.stationary_bound = r.stationary_bound;
        if (ev.feasible.ok)
          ev.kernel_curve =
              sample_fn([&](int n) { return r.kernel_bound(n); }, n_max);
        rep.results.push_back(std::move(ev));
      }
    } else {
      if (!in.cert) {
        rep.admissible = false;
        rep.rejection =
            "no minorization certificate on A (a kernel column vanishes on A)";
        return rep;
      }
      std::vector<b::WindowCheck> structural = {
          {"chain reversible", in.reversible}};
      const double radius = even_series_radius(fn, in.M);
      const double hi = std::min(ehi, radius);
      for (double l : req.lambdas.empty()
                          ? b::lambda_grid(1.0, hi, req.grid_count)
                          : req.lambdas) {
        const double vt = fn(l);
        auto rate =
            b::reversible_nonatomic_rate(in.M, in.delta, in.nuA, in.piA, vt, l);
        auto r = b::reversible_perturbation(rate, req.dP);
        OpEvaluation ev;
        ev.lambda = l;
        ev.variant = "nonatomic";
        ev.feasible = with_structural(structural, r.feasible);
        ev.constants = {{"M", in.M},     {"delta", in.delta},
                        {"nu_A", in.nuA}, {"pi_A", in.piA},
                        {"vartheta", vt}, {"D3", rate.D3},
                        {"E3", rate.E3},  {"dP", req.dP},
                        {"stationary_bound", r.stationary_bound}};
        ev.stationary_bound = r.stationary_bound;
        if (ev.feasible.ok)
          ev.kernel_curve =
              sample_fn([&](int n) { return r.kernel_bound(n); }, n_max);
        rep.results.push_back(std::move(ev));
      }
    }
    finish_report(rep, n_max);
    return rep;
  }

  if (op == "general_perturbation") {
    for (double l : auto_grid(ehi)) {
      auto r = b::general_perturbation(in.M, l, req.dP);
      OpEvaluation ev;
      ev.lambda = l;
      ev.feasible = r.feasible;
      ev.constants = {{"M", in.M},
                      {"M0", r.M0},
                      {"threshold", r.threshold},
                      {"dP", req.dP},
                      {"stationary_bound", r.stationary_bound}};
      ev.stationary_bound = r.stationary_bound;
      rep.results.push_back(std::move(ev));
    }
    finish_report(rep, n_max);
    return rep;
  }

  throw std::logic_error("evaluate_bound: unhandled op " + op);
}

}  // namespace ergo::eval
