#pragma once

#include <optional>
#include <string>
#include <vector>

#include "noether/invariants.hpp"
#include "noether/transform.hpp"

namespace noether {

struct PipelineOptions {
  int trials = 3;
  int prime_bits = 62;
  u64 seed = 1;
  i64 max_order = 1000000;
};

/// One named check inside a step.
struct CheckRecord {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Reduction tags attached to steps.
namespace node {
inline constexpr const char* kRestriction = "T21-restriction";
inline constexpr const char* kFiberDrop = "T22-fiber-drop";
inline constexpr const char* kLemma24 = "Lemma24";
inline constexpr const char* kFischer = "Fischer-diagonal";
inline constexpr const char* kMetacyclic = "T25-metacyclic";
}  // namespace node

/// Parameters that regenerate a cyclic linearization substitution.
struct CycleRecord {
  int n = 0;
  std::vector<std::string> block;
  std::string family;
  std::vector<i64> prefix;
};

struct StepRecord {
  /// "restriction", "generators", "monomial", "sublattice", "linear", "drop", "rational", "diagonal", "pattern"
  std::string kind;
  std::string node;  // empty, or one of the node:: tags
  std::string description;
  std::optional<Substitution> sub;
  std::optional<DropRecord> drop;
  std::optional<CycleRecord> cycle;
  GroupAction result;
  std::vector<CheckRecord> checks;
  std::vector<PitVerdict> pit;
  bool passed() const;
};

/// sigma : V_i -> zeta^{k^i} V_i with tau the cyclic shift (V-form), or
/// sigma : U_i -> zeta^{k^i - k^{i-1}} U_i with tau ending in the product inverse (U-form).
struct MetacyclicPattern {
  enum class Form { V, U };
  Form form = Form::U;
  i64 p = 0;
  int m = 0, n = 0, r = 0;
  i64 k = 0;  // 1 + p^r, or -1 + 2^r when p = 2
  std::size_t sigma = 0, tau = 0;
  std::vector<std::string> vars;
  std::vector<Root> spectrum;  // sigma coefficient on each variable
};

struct MatchResult {
  std::optional<MetacyclicPattern> pattern;
  std::string reason;  // why nothing matched
};

/// Recognizes a V-form or U-form on the whole variable space of a; every generator other than
/// sigma and tau must act as a power of sigma.
MatchResult match_metacyclic(const GroupAction& a, std::size_t sigma, std::size_t tau);

struct Terminal {
  enum class Kind { None, LinearAction, DiagonalFixedField, MetacyclicPattern };
  Kind kind = Kind::None;
  std::vector<std::string> generators;  // invariant monomials for DiagonalFixedField
  IntMatrix lattice;
  std::optional<MetacyclicPattern> pattern;
  std::vector<std::string> linear_vars;  // variables linearized next to a pattern block
};

struct GroupSummary {
  std::string name;
  i64 p = 0;
  i64 order = 0;
  std::size_t rank = 0;
  int nilpotency_class = 0;
  int a = 0;
  std::vector<std::string> h_generators;
  std::string top;
  std::string family;  // "G1 p,a,b,c,s,x" or empty
};

struct Certificate {
  enum class Status { Verified, Incomplete, InputError };
  GroupSummary group;
  std::string pipeline;  // "abelian", "class2", "G1", "G2"
  PipelineOptions options;
  u64 q1 = 0, q2 = 0;
  i64 level = 1;
  GroupAction initial;
  std::vector<StepRecord> steps;
  Terminal terminal;
  Status status = Status::Incomplete;
  std::string message;
  std::vector<std::string> notes;

  /// log2 of the union bound over every PIT verdict in the certificate.
  double log2_error_bound() const;
  int count_node(const std::string& tag) const;
  int count_kind(const std::string& kind) const;
  /// Variables of the latest action plus recorded drop invariants equals the initial count at every step.
  bool transcendence_ledger_ok() const;
};

std::string status_name(Certificate::Status s);
std::string terminal_name(Terminal::Kind k);

/// Generator replacement data: generators beta_j (one per block) with the slope of beta_j on block j.
struct Class2State {
  GroupAction action;
  int a = 0;
  i64 pa = 1;
  std::vector<Element> beta;
  std::vector<std::string> beta_words;
  std::vector<Root> rho;  // rho[j]: beta_j multiplies y[j,i] by c * rho[j]^i
  std::vector<int> b;     // log_p of the order of rho[j]
  std::vector<bool> split;          // block went through a proper DFT
  int rounds = 0;                   // generator replacement rounds with a nontrivial pivot
  std::vector<std::string> fibers;  // names of variables waiting for the fiber drop
  VerifyContext ctx;
  std::vector<StepRecord> steps;
};

/// Generator replacement and y[m,i] = x[m,i] * prod x[t,i]^{n_mt}; leaves state.action on y.
void normalize_generators(Class2State& st, const CommutatorData& d);
/// u[j,l,k] = sum_t xi^{l t} y[j, k + t p^A] for a block with b_jj = A >= 1 (skipped when A = a).
void dft_split(Class2State& st, std::size_t j);
/// v[j,0,i] = u[j,0,i]/u[j,0,i-1], v[j,l,k] = u[j,l,k]/u[j,0,k]; or w[j,i] = y[j,i]/y[j,i-1] when b_jj = 0.
void ratio_split(Class2State& st, std::size_t j);
/// Fiber drop of every pending variable.
void drop_pending(Class2State& st);
/// H-invariant passage, z relabeling and the cyclic linearization on every block.
void kill_torus(Class2State& st);

Certificate run_class2(std::shared_ptr<const PcGroup> g, const PipelineOptions& opt = {});

/// k(i) = (1 + p^s)^i and l(i) = sum_{t >= 1} C(i, t) p^{(t-1)s}.
std::pair<i64, i64> binomial_kl(i64 p, int s, i64 i);

Certificate run_family(const FamilyParams& f, const PipelineOptions& opt = {});
Certificate run_g1(i64 p, int a, int b, int c, int s, i64 x, const PipelineOptions& opt = {});
Certificate run_g2(i64 p, int a, int b, int c, int r, i64 x, const PipelineOptions& opt = {});

/// Standalone check of the cyclic linearization for C_n acting by the product-inverse cycle.
struct CycleReport {
  int n = 0;
  i64 level = 1;
  bool invertible = false;
  bool diagonal = false;  // tau(s_i) = xi^i s_i
  std::string detail;
  std::vector<PitVerdict> pit;
  double log2_error_bound() const;
};
/// n must be a prime power >= 2 (ArgumentError otherwise).
CycleReport verify_cycle_linearization(int n, const PipelineOptions& opt = {});

/// Dispatches on the group: family groups go to run_family, everything else to run_class2.
Certificate run_pipeline(std::shared_ptr<const PcGroup> g, const std::string& name, const PipelineOptions& opt = {});

}  // namespace noether
