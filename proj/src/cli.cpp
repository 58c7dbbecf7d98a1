#include "ergo/cli.hpp"

#include "ergo/chain.hpp"
#include "ergo/chain_io.hpp"
#include "ergo/evaluate.hpp"
#include "ergo/hitting.hpp"
#include "ergo/splitting.hpp"
#include "ergo/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ergo::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no inf/nan literals; encode them as strings so nothing is lost
ordered_json jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ordered_json jvec(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jnum(v(i)));
  return a;
}

ordered_json jvec(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(jnum(x));
  return a;
}

ordered_json jmat(const Eigen::MatrixXd& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(jnum(m(i, j)));
    a.push_back(std::move(row));
  }
  return a;
}

ordered_json repro_header(const std::string& command, ordered_json params) {
  ordered_json h;
  h["tool"] = kToolName;
  h["version"] = kToolVersion;
  h["command"] = command;
  h["params"] = std::move(params);
  return h;
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::invalid_argument("cannot open for writing: " + out_path);
  f << text;
}

void emit_json(const ordered_json& doc, const std::string& out_path) {
  write_text(doc.dump(2) + "\n", out_path);
}

FiniteChain load(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--chain is required");
  return load_chain_file(path);
}

// "1,3,5" or label names; 0-based indices, deduplicated by StateSet
std::vector<int> parse_set(const FiniteChain& chain, const std::string& spec) {
  if (spec.empty()) throw std::invalid_argument("--set is required");
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t a = tok.find_first_not_of(" \t");
    size_t b = tok.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    tok = tok.substr(a, b - a + 1);
    bool is_int = false;
    int idx = 0;
    try {
      size_t used = 0;
      idx = std::stoi(tok, &used);
      is_int = used == tok.size();
    } catch (const std::invalid_argument&) {
      // not an integer; fall through to label lookup
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("state index out of range: " + tok);
    }
    if (is_int) {
      if (idx < 0 || idx >= chain.n_states())
        throw std::invalid_argument("state index out of range: " + tok);
      out.push_back(idx);
      continue;
    }
    const auto& labels = chain.labels();
    auto it = std::find(labels.begin(), labels.end(), tok);
    if (it == labels.end())
      throw std::invalid_argument("unknown state label: " + tok);
    out.push_back(static_cast<int>(it - labels.begin()));
  }
  if (out.empty()) throw std::invalid_argument("--set parsed to an empty set");
  return out;
}

ordered_json inputs_json(const eval::ExactInputs& in) {
  ordered_json j;
  j["set"] = in.A.members();
  j["pi_A"] = jnum(in.piA);
  j["M"] = jnum(in.M);
  j["delta"] = jnum(in.delta);
  j["nu_A"] = jnum(in.nuA);
  j["is_atom"] = in.is_atom;
  j["reversible"] = in.reversible;
  j["nonneg_definite"] = in.nonneg_definite;
  j["r0"] = jnum(in.r0);
  j["lambda_hi"] = jnum(in.lambda_hi);
  return j;
}

struct CommonOpts {
  std::string chain_path;
  std::string set_spec;
  std::string out_path;
  std::string format = "json";
};

int cmd_stationary(const CommonOpts& c) {
  FiniteChain chain = load(c.chain_path);
  StationaryLaw law = stationary_distribution(chain);
  ReversibilityCheck rev = check_reversible(chain);
  DefinitenessCheck def = check_nonneg_definite(chain);
  SpectralSummary spec = spectral_r0(chain);

  if (c.format == "csv") {
    std::string csv = "state,label,pi\n";
    for (int x = 0; x < chain.n_states(); ++x) {
      std::string label = chain.labels().empty()
                              ? std::to_string(x)
                              : chain.labels()[static_cast<size_t>(x)];
      csv += std::to_string(x) + "," + label + "," + fmt17(law.pi(x)) + "\n";
    }
    write_text(csv, c.out_path);
    return kOk;
  }

  ordered_json doc;
  doc["reproducibility"] =
      repro_header("stationary", {{"chain", c.chain_path}});
  doc["n_states"] = chain.n_states();
  doc["labels"] = chain.labels();
  doc["pi"] = jvec(law.pi);
  doc["reversible"] = rev.reversible;
  doc["detailed_balance_residual"] = jnum(rev.max_residual);
  doc["definiteness"] =
      def.result == Definiteness::nonnegative
          ? "nonnegative"
          : (def.result == Definiteness::indefinite ? "indefinite"
                                                    : "not_applicable");
  doc["min_symmetrized_eigenvalue"] = jnum(def.min_eigenvalue);
  doc["r0"] = jnum(spec.r0);
  doc["eigenvalue_moduli_certified"] = spec.is_reversible;
  doc["eigenvalue_moduli"] = jvec(spec.eigenvalues);
  doc["dobrushin_delta_1"] = jnum(dobrushin_coefficient(chain, 1));
  emit_json(doc, c.out_path);
  return kOk;
}

int cmd_tv_profile(const CommonOpts& c, int n_max) {
  FiniteChain chain = load(c.chain_path);
  std::vector<double> tv = tv_profile(chain, n_max);
  if (c.format == "csv") {
    std::string csv = "n,tv\n";
    for (size_t n = 0; n < tv.size(); ++n)
      csv += std::to_string(n) + "," + fmt17(tv[n]) + "\n";
    write_text(csv, c.out_path);
    return kOk;
  }
  ordered_json doc;
  doc["reproducibility"] = repro_header(
      "tv-profile", {{"chain", c.chain_path}, {"n", n_max}});
  doc["n_max"] = n_max;
  doc["tv"] = jvec(tv);
  emit_json(doc, c.out_path);
  return kOk;
}

int cmd_hitting(const CommonOpts& c, int horizon, bool emit_taboo) {
  FiniteChain chain = load(c.chain_path);
  StateSet A(parse_set(chain, c.set_spec), chain.n_states());
  int h = horizon > 0 ? horizon : adaptive_horizon(chain.kernel(), A);
  HittingProfile prof = hitting_profile(chain, A, h);

  if (c.format == "csv") {
    std::string csv = "state,n,F\n";
    for (int x = 0; x < chain.n_states(); ++x)
      for (int k = 0; k < prof.horizon; ++k)
        csv += std::to_string(x) + "," + std::to_string(k + 1) + "," +
               fmt17(prof.F(x, k)) + "\n";
    write_text(csv, c.out_path);
    return kOk;
  }

  ordered_json doc;
  doc["reproducibility"] = repro_header(
      "hitting", {{"chain", c.chain_path},
                  {"set", A.members()},
                  {"horizon", prof.horizon},
                  {"emit_taboo", emit_taboo}});
  doc["set"] = A.members();
  doc["horizon"] = prof.horizon;
  doc["M"] = jnum(prof.M);
  doc["sigma_mean"] = jvec(prof.sigma_mean);
  doc["return_mass"] = jvec(prof.return_mass);
  doc["F"] = jmat(prof.F);  // F[x][k] = P_x{tau_A = k+1}
  if (emit_taboo) {
    ordered_json taboo = ordered_json::array();
    for (const auto& m : prof.taboo) taboo.push_back(jmat(m));
    doc["taboo"] = std::move(taboo);
  }
  emit_json(doc, c.out_path);
  return kOk;
}

int cmd_moments(const CommonOpts& c, std::vector<double> lambdas, int ell_max) {
  FiniteChain chain = load(c.chain_path);
  StateSet A(parse_set(chain, c.set_spec), chain.n_states());
  double M = sigma_power_moment(chain, A, 1).maxCoeff();
  if (lambdas.empty()) lambdas.push_back(eval::default_kappa(M));

  ordered_json doc;
  doc["reproducibility"] = repro_header(
      "moments", {{"chain", c.chain_path},
                  {"set", A.members()},
                  {"lambda", lambdas},
                  {"ell", ell_max}});
  doc["set"] = A.members();
  doc["M"] = jnum(M);
  doc["mean_return"] = jvec(mean_return_time(chain, A));
  doc["rho_restricted"] = jnum(restricted_spectral_radius(chain.kernel(), A));

  ordered_json powers = ordered_json::array();
  for (int ell = 1; ell <= ell_max; ++ell) {
    Eigen::VectorXd m = sigma_power_moment(chain, A, ell);
    powers.push_back({{"ell", ell},
                      {"sup", jnum(m.maxCoeff())},
                      {"values", jvec(m)}});
  }
  doc["sigma_power_moments"] = std::move(powers);

  std::string csv = "lambda,L,sup_tau,sup_sigma,kac_residual\n";
  ordered_json geo = ordered_json::array();
  for (double l : lambdas) {
    ordered_json g;
    g["lambda"] = jnum(l);
    try {
      GeometricMoments gm = geometric_moments(chain, A, l);
      g["feasible"] = true;
      g["sigma_moment"] = jvec(gm.sigma_moment);
      g["tau_moment"] = jvec(gm.tau_moment);
      g["L"] = jnum(gm.L);
      g["sup_tau"] = jnum(gm.sup_tau);
      double kr = kac_residual(chain, A, l);
      g["kac_residual"] = jnum(kr);
      csv += fmt17(l) + "," + fmt17(gm.L) + "," + fmt17(gm.sup_tau) + "," +
             fmt17(gm.sigma_moment.maxCoeff()) + "," + fmt17(kr) + "\n";
    } catch (const DivergenceError& e) {
      g["feasible"] = false;
      g["rho_Q"] = jnum(e.rho_Q);
      g["reason"] = e.what();
    } catch (const std::invalid_argument& e) {
      g["feasible"] = false;
      g["reason"] = e.what();
    }
    geo.push_back(std::move(g));
  }
  doc["geometric_moments"] = std::move(geo);

  if (c.format == "csv") {
    write_text(csv, c.out_path);
    return kOk;
  }
  emit_json(doc, c.out_path);
  return kOk;
}

int cmd_split(const CommonOpts& c, const std::string& sidecar_path) {
  FiniteChain chain = load(c.chain_path);
  StateSet A(parse_set(chain, c.set_spec), chain.n_states());
  auto cert = find_minorization(chain, A);
  if (!cert)
    throw std::invalid_argument(
        "no minorization certificate on the given set (a kernel column "
        "vanishes on it)");
  SplitChain split = build_split_chain(chain, *cert);

  ordered_json meta;
  meta["delta"] = jnum(cert->delta);
  meta["nu"] = jvec(cert->nu);
  meta["base_set"] = A.members();
  meta["base_n_states"] = chain.n_states();
  meta["atom"] = split.atom_restricted.members();
  meta["regeneration_copies"] = split.a_copies_restricted.members();
  meta["pi_star"] = jvec(split.restricted.pi());
  meta["pi_invariance_residual"] = jnum(split.pi_invariance_residual);
  meta["to_restricted"] = split.to_restricted;
  meta["from_restricted"] = split.from_restricted;

  ordered_json doc;
  doc["reproducibility"] = repro_header(
      "split", {{"chain", c.chain_path},
                {"set", A.members()},
                {"out", c.out_path},
                {"sidecar", sidecar_path}});
  if (!c.out_path.empty()) {
    save_chain_file(split.restricted, c.out_path);
    std::string side =
        sidecar_path.empty() ? c.out_path + ".meta.json" : sidecar_path;
    emit_json(meta, side);
    doc["chain_file"] = c.out_path;
    doc["sidecar_file"] = side;
    doc["meta"] = std::move(meta);
    std::cout << doc.dump(2) << "\n";
  } else {
    doc["chain"] = ordered_json::parse(chain_to_json(split.restricted));
    doc["meta"] = std::move(meta);
    std::cout << doc.dump(2) << "\n";
  }
  return kOk;
}

int cmd_squared(const CommonOpts& c) {
  FiniteChain chain = load(c.chain_path);
  StateSet A(parse_set(chain, c.set_spec), chain.n_states());
  auto cert = find_minorization(chain, A);
  if (!cert)
    throw std::invalid_argument(
        "no minorization certificate on the given set (a kernel column "
        "vanishes on it)");
  SquaredTransfer sq = squared_chain(chain, *cert);

  ordered_json doc;
  doc["reproducibility"] = repro_header(
      "squared",
      {{"chain", c.chain_path}, {"set", A.members()}, {"out", c.out_path}});
  doc["delta"] = jnum(cert->delta);
  doc["delta_bar"] = jnum(sq.delta_bar);
  doc["has_certificate"] = sq.cert.has_value();
  if (sq.cert) doc["nu"] = jvec(sq.cert->nu);
  if (sq.nu_bar) doc["nu_bar"] = jvec(*sq.nu_bar);
  if (!c.out_path.empty()) {
    save_chain_file(sq.squared, c.out_path);
    doc["chain_file"] = c.out_path;
    std::cout << doc.dump(2) << "\n";
  } else {
    doc["chain"] = ordered_json::parse(chain_to_json(sq.squared));
    std::cout << doc.dump(2) << "\n";
  }
  return kOk;
}

ordered_json result_json(const eval::OpEvaluation& r) {
  ordered_json j;
  if (!std::isnan(r.lambda)) j["lambda"] = jnum(r.lambda);
  if (!r.variant.empty()) j["variant"] = r.variant;
  j["feasible"] = r.feasible.ok;
  ordered_json windows = ordered_json::array();
  for (const auto& w : r.feasible.windows)
    windows.push_back({{"name", w.name}, {"holds", w.holds}});
  j["windows"] = std::move(windows);
  ordered_json consts;
  for (const auto& [k, v] : r.constants) consts[k] = jnum(v);
  j["constants"] = std::move(consts);
  if (!std::isnan(r.stationary_bound))
    j["stationary_bound"] = jnum(r.stationary_bound);
  if (!r.curve.empty()) j["curve"] = jvec(r.curve);
  if (!r.kernel_curve.empty()) j["kernel_curve"] = jvec(r.kernel_curve);
  return j;
}

bool op_has_tv_curve(const std::string& op) {
  return op == "gamma_series_bounds" || op == "uniform_geometric_gamma" ||
         op == "atomic_rate" || op == "nonatomic_rate" ||
         op == "reversible_atomic_rate" || op == "reversible_nonatomic_rate";
}

int cmd_bound(const CommonOpts& c, const std::string& name,
              std::vector<double> lambdas, double dP, double kappa, int n_max,
              int grid, bool with_exact) {
  FiniteChain chain = load(c.chain_path);
  eval::EvalRequest req;
  req.op = name;
  if (!c.set_spec.empty()) req.A = parse_set(chain, c.set_spec);
  req.lambdas = std::move(lambdas);
  req.dP = dP;
  req.kappa = kappa;
  req.n_max = n_max;
  req.grid_count = grid;
  eval::EvalReport rep = eval::evaluate_bound(chain, req);

  if (c.format == "csv") {
    if (with_exact && !op_has_tv_curve(rep.op))
      throw std::invalid_argument(
          "--with-exact: no exact curve for operation " + rep.op);
    std::vector<double> tv;
    if (with_exact) tv = tv_profile(chain, n_max);
    std::string csv = with_exact ? "n,bound,exact\n" : "n,bound\n";
    for (size_t n = 0; n < rep.envelope.size(); ++n) {
      csv += std::to_string(n) + "," + fmt17(rep.envelope[n]);
      if (with_exact) csv += "," + fmt17(tv[n]);
      csv += "\n";
    }
    write_text(csv, c.out_path);
    return kOk;
  }

  ordered_json doc;
  doc["reproducibility"] = repro_header(
      "bound", {{"chain", c.chain_path},
                {"name", rep.op},
                {"set", req.A},
                {"lambda", req.lambdas},
                {"dP", dP},
                {"kappa", kappa},
                {"n", n_max},
                {"grid", grid}});
  doc["op"] = rep.op;
  doc["admissible"] = rep.admissible;
  if (!rep.admissible) {
    doc["rejection"] = rep.rejection;
    emit_json(doc, c.out_path);
    return kOk;
  }
  if (rep.inputs) doc["inputs"] = inputs_json(*rep.inputs);
  if (!std::isnan(rep.kappa)) {
    doc["kappa"] = jnum(rep.kappa);
    doc["L"] = jnum(rep.L);
  }
  // headline numbers for the moment bound, mirrored from the best grid point
  if (rep.op == "hitmoment_bound") {
    for (const auto& r : rep.results) {
      if (!r.feasible.ok) continue;
      for (const auto& [k, v] : r.constants)
        if (k == "M_bound" || k == "exact_sup")
          if (!doc.contains(k)) doc[k] = jnum(v);
      if (doc.contains("M_bound")) break;
    }
  }
  ordered_json results = ordered_json::array();
  for (const auto& r : rep.results) results.push_back(result_json(r));
  doc["results"] = std::move(results);
  if (!rep.envelope.empty()) doc["envelope"] = jvec(rep.envelope);
  doc["stationary_best"] = jnum(rep.stationary_best);
  emit_json(doc, c.out_path);
  return kOk;
}

int cmd_perturb(const CommonOpts& c, double epsilon, std::uint64_t seed) {
  FiniteChain chain = load(c.chain_path);
  verify::Perturbed pert = verify::perturb_chain(chain, epsilon, seed);
  ordered_json doc;
  doc["reproducibility"] = repro_header(
      "perturb", {{"chain", c.chain_path},
                  {"epsilon", epsilon},
                  {"seed", seed},
                  {"out", c.out_path}});
  doc["epsilon"] = jnum(epsilon);
  doc["seed"] = seed;
  doc["dP"] = jnum(pert.dP);
  if (!c.out_path.empty()) {
    save_chain_file(pert.chain, c.out_path);
    doc["chain_file"] = c.out_path;
    std::cout << doc.dump(2) << "\n";
  } else {
    doc["chain"] = ordered_json::parse(chain_to_json(pert.chain));
    std::cout << doc.dump(2) << "\n";
  }
  return kOk;
}

ordered_json soundness_json(const verify::SoundnessReport& rep) {
  ordered_json j;
  j["bound"] = rep.bound;
  j["recipe"] = rep.recipe;
  j["trials"] = rep.trials;
  j["feasible_count"] = rep.feasible_count;
  j["violations"] = rep.violations;
  j["worst_slack"] = jnum(rep.worst_slack);
  ordered_json log = ordered_json::array();
  for (const auto& t : rep.log)
    log.push_back({{"trial", t.trial},
                   {"seed", t.seed},
                   {"n_states", t.n_states},
                   {"feasible_points", t.feasible_points},
                   {"infeasible_points", t.infeasible_points},
                   {"rejected_sets", t.rejected_sets},
                   {"worst_slack", jnum(t.worst_slack)},
                   {"violated", t.violated}});
  j["trials_log"] = std::move(log);
  return j;
}

int cmd_verify(const std::string& bound, const std::string& suite,
               const std::string& recipe, int trials, std::uint64_t seed,
               int states, int draws, const std::string& out_path) {
  ordered_json doc;
  doc["reproducibility"] = repro_header(
      "verify", {{"bound", bound},
                 {"suite", suite},
                 {"recipe", recipe},
                 {"trials", trials},
                 {"seed", seed},
                 {"states", states},
                 {"draws", draws}});
  int violations = 0;

  if (!bound.empty()) {
    auto kind = verify::recipe_from_name(recipe);
    if (!kind) throw std::invalid_argument("unknown recipe: " + recipe);
    verify::ChainRecipe base;
    base.kind = *kind;
    base.n_states = states;
    base.seed = seed;
    verify::SoundnessReport rep = verify::soundness_suite(bound, base, trials);
    violations += rep.violations;
    doc["soundness"] = soundness_json(rep);
  } else if (suite == "identities" || suite == "all") {
    for (const auto& r : verify::identity_suite(seed, trials)) {
      violations += r.failures;
      doc["identities"].push_back({{"name", r.name},
                                   {"trials", r.trials},
                                   {"failures", r.failures},
                                   {"worst_residual", jnum(r.worst_residual)}});
    }
  }
  if (bound.empty() && (suite == "certificates" || suite == "all")) {
    for (const auto& r : verify::spectral_certificate_suite(seed, trials)) {
      violations += r.violations;
      doc["certificates"].push_back({{"name", r.name},
                                     {"trials", r.trials},
                                     {"violations", r.violations},
                                     {"worst_gap", jnum(r.worst_gap)}});
    }
  }
  if (bound.empty() && (suite == "transfer" || suite == "all")) {
    for (const auto& r : verify::moment_transfer_suite(seed, trials)) {
      violations += r.violations;
      doc["transfer"].push_back({{"name", r.name},
                                 {"trials", r.trials},
                                 {"applicable", r.applicable},
                                 {"violations", r.violations},
                                 {"worst_slack", jnum(r.worst_slack)}});
    }
  }
  if (bound.empty() && (suite == "honesty" || suite == "all")) {
    verify::HonestyReport rep = verify::feasibility_honesty_suite(seed, draws);
    violations += rep.inconsistencies;
    doc["honesty"] = {{"draws", rep.draws},
                      {"feasible_results", rep.feasible_results},
                      {"inconsistencies", rep.inconsistencies}};
  }

  doc["violations"] = violations;
  emit_json(doc, out_path);
  return violations > 0 ? kViolations : kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"exact ergodicity analysis for finite Markov chains"};
  app.require_subcommand(1);

  CommonOpts c;
  auto add_common = [&](CLI::App* sub, bool with_set) {
    sub->add_option("--chain", c.chain_path, "chain JSON file")->required();
    if (with_set)
      sub->add_option("--set", c.set_spec,
                      "target set: comma-separated 0-based indices or labels");
    sub->add_option("--out", c.out_path, "output file (default: stdout)");
    sub->add_option("--format", c.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* s_stat = app.add_subcommand("stationary",
                                    "stationary law and spectral summary");
  add_common(s_stat, false);

  int tv_n = 50;
  auto* s_tv = app.add_subcommand("tv-profile",
                                  "exact distance to stationarity per step");
  add_common(s_tv, false);
  s_tv->add_option("--n", tv_n, "largest step count");

  int horizon = 0;
  bool emit_taboo = false;
  auto* s_hit = app.add_subcommand("hitting", "hitting-time distribution");
  add_common(s_hit, true);
  s_hit->add_option("--horizon", horizon, "0 means automatic");
  s_hit->add_flag("--emit-taboo", emit_taboo, "include taboo kernel powers");

  std::vector<double> lambdas;
  int ell_max = 3;
  auto* s_mom = app.add_subcommand("moments",
                                   "hitting and return time moments");
  add_common(s_mom, true);
  s_mom->add_option("--lambda", lambdas, "geometric moment parameter(s)");
  s_mom->add_option("--ell", ell_max, "largest power moment");

  std::string sidecar;
  auto* s_split = app.add_subcommand("split", "Nummelin split chain");
  add_common(s_split, true);
  s_split->add_option("--sidecar", sidecar,
                      "certificate sidecar path (default: <out>.meta.json)");

  auto* s_sq = app.add_subcommand("squared",
                                  "two-step chain with transferred certificate");
  add_common(s_sq, true);

  std::string bound_name;
  double dP = 0.0, kappa = 0.0;
  int n_max = 200, grid = 21;
  bool with_exact = false;
  auto* s_bound = app.add_subcommand("bound", "evaluate a quantitative bound");
  add_common(s_bound, true);
  s_bound->add_option("--name", bound_name, "bound operation name")->required();
  s_bound->add_option("--lambda", lambdas, "explicit lambda grid");
  s_bound->add_option("--dP", dP, "kernel perturbation size");
  s_bound->add_option("--kappa", kappa, "moment parameter (0 = automatic)");
  s_bound->add_option("--n", n_max, "curve length");
  s_bound->add_option("--grid", grid, "automatic lambda grid size");
  s_bound->add_flag("--with-exact", with_exact,
                    "CSV: add the exact tv column");

  double epsilon = 0.0;
  std::uint64_t seed = 1;
  auto* s_pert = app.add_subcommand("perturb", "random kernel perturbation");
  add_common(s_pert, false);
  s_pert->add_option("--epsilon", epsilon, "target perturbation size")
      ->required();
  s_pert->add_option("--seed", seed, "rng seed");

  std::string v_bound, v_suite = "all", v_recipe = "lazy_reversible",
                       v_out;
  int trials = 100, states = 0, draws = 1000;
  std::uint64_t v_seed = 1;
  auto* s_ver = app.add_subcommand("verify", "randomized soundness suites");
  s_ver->add_option("--bound", v_bound, "bound operation to sweep");
  s_ver->add_option("--suite", v_suite,
                    "identities|certificates|transfer|honesty|all")
      ->check(CLI::IsMember(
          {"identities", "certificates", "transfer", "honesty", "all"}));
  s_ver->add_option("--recipe", v_recipe, "chain recipe for --bound");
  s_ver->add_option("--trials", trials, "trial count");
  s_ver->add_option("--seed", v_seed, "rng seed");
  s_ver->add_option("--states", states, "chain size (0 = cycle 2..12)");
  s_ver->add_option("--draws", draws, "draw count for the honesty suite");
  s_ver->add_option("--out", v_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (s_stat->parsed()) return cmd_stationary(c);
    if (s_tv->parsed()) return cmd_tv_profile(c, tv_n);
    if (s_hit->parsed()) return cmd_hitting(c, horizon, emit_taboo);
    if (s_mom->parsed()) return cmd_moments(c, lambdas, ell_max);
    if (s_split->parsed()) return cmd_split(c, sidecar);
    if (s_sq->parsed()) return cmd_squared(c);
    if (s_bound->parsed())
      return cmd_bound(c, bound_name, lambdas, dP, kappa, n_max, grid,
                       with_exact);
    if (s_pert->parsed()) return cmd_perturb(c, epsilon, seed);
    if (s_ver->parsed())
      return cmd_verify(v_bound, v_suite, v_recipe, trials, v_seed, states,
                        draws, v_out);
    std::cerr << "error: no subcommand\n";
    return kUsage;
  } catch (const AtomicCertificateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace ergo::cli
