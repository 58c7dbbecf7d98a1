#pragma once

#include "ergo/chain.hpp"
#include "ergo/evaluate.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

// Randomized oracle harness: generates structured chains, perturbs them,
// and checks every bound and identity against exact linear-algebra oracles.
// All randomness flows through mt19937_64 with explicit seed mixing, so runs
// are reproducible across platforms.

namespace ergo::verify {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  // 53-bit uniform in [0, 1), identical on every platform
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

enum class RecipeKind {
  random_reversible,   // symmetric conductances; reversible, maybe indefinite
  lazy_reversible,     // (1-l) K + l I with l >= 1/2; non-negative definite
  squared_reversible,  // K^2; reversible and non-negative definite
  random_general,      // iid positive rows; generically non-reversible
  rotation_mix         // cyclic rotation blended with the uniform kernel
};

struct ChainRecipe {
  RecipeKind kind = RecipeKind::random_reversible;
  int n_states = 0;  // 0 means: cycle sizes 2..12 across trials
  std::uint64_t seed = 1;
  double laziness = 0.5;
};

const std::vector<std::string>& recipe_names();
std::optional<RecipeKind> recipe_from_name(const std::string& name);
const std::string& recipe_name(RecipeKind kind);

FiniteChain random_chain(const ChainRecipe& recipe);

struct Perturbed {
  FiniteChain chain;
  double dP;  // exact max_x ||Ptilde(x,.) - P(x,.)||_1
};
// additive centered row noise, clipped and renormalized; retries with
// halved amplitude until the result is a valid chain with dP <= 2 epsilon
Perturbed perturb_chain(const FiniteChain& chain, double epsilon,
                        std::uint64_t seed);

struct TrialLog {
  int trial = 0;
  std::uint64_t seed = 0;
  int n_states = 0;
  int feasible_points = 0;
  int infeasible_points = 0;
  int rejected_sets = 0;  // A choices rejected by structural routing
  double worst_slack = -bounds::kInf;  // max over checks of exact - bound
  bool violated = false;
};

struct SoundnessReport {
  std::string bound;
  std::string recipe;
  int trials = 0;
  int feasible_count = 0;  // trials with at least one feasible evaluation
  int violations = 0;
  double worst_slack = -bounds::kInf;
  std::vector<TrialLog> log;
};

// evaluates one bound op across seeded chains, picking A automatically
// (a singleton plus a proper subset of size ceil(n/3)) and sweeping the
// default lambda grid; curves/bounds are compared against exact oracles
SoundnessReport soundness_suite(const std::string& bound_op,
                                const ChainRecipe& base, int trials);

// max residual over x and n <= n_max of the Abel rearrangement of the
// return-law series against its survival-function form
double abel_residual(const FiniteChain& chain, const StateSet& A, int n_max);

struct IdentityReport {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst_residual = 0.0;
};
// Kac, Abel, split marginality, split invariance, squared return law
std::vector<IdentityReport> identity_suite(std::uint64_t seed, int trials);

struct CertificateReport {
  std::string name;
  int trials = 0;
  int violations = 0;
  double worst_gap = -bounds::kInf;  // max of r0 - certified radius bound
};
// r0 <= e^{-1/M} on lazy reversible chains with a singleton atom, and
// r0 <= 1/varrho on possibly indefinite reversible chains
std::vector<CertificateReport> spectral_certificate_suite(std::uint64_t seed,
                                                          int trials);

struct TransferReport {
  std::string name;
  int trials = 0;
  int applicable = 0;  // trials where the hypotheses held
  int violations = 0;
  double worst_slack = -bounds::kInf;
};
// split-chain moment bound vs exact split-chain solve, and the skeleton
// generating-function inequality vs exact closed forms
std::vector<TransferReport> moment_transfer_suite(std::uint64_t seed,
                                                  int trials);

struct HonestyReport {
  int draws = 0;
  int feasible_results = 0;
  int inconsistencies = 0;
};
// re-derives every printed window from raw inputs and flags any op that
// reported feasible while a window fails
HonestyReport feasibility_honesty_suite(std::uint64_t seed, int draws);

}  // namespace ergo::verify
