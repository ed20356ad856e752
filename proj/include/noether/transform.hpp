#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "noether/action.hpp"

namespace noether {

/// Straight-line program over F_q-evaluable constants (rational times root).
class Slp {
 public:
  using Node = std::size_t;
  enum class Op { Input, Const, Add, Sub, Mul, Div, Pow };

  explicit Slp(std::size_t inputs = 0);
  std::size_t inputs() const { return inputs_; }
  Node input(std::size_t i) const;
  Node constant(const Rational& c, const Root& r);
  Node constant(const Rational& c);
  Node add(Node a, Node b);
  Node sub(Node a, Node b);
  Node mul(Node a, Node b);
  Node div(Node a, Node b);
  Node pow(Node a, i64 e);
  /// c * prod x_t^{e_t} over the given nodes.
  Node monomial(const Monomial& m, const std::vector<Node>& vars);
  void output(Node n) { outputs_.push_back(n); }
  const std::vector<Node>& outputs() const { return outputs_; }
  std::size_t size() const { return ops_.size(); }
  /// Appends this program's non-input instructions to dst; map[k] is the dst node for node k.
  void replay(Slp& dst, std::vector<Node>& map) const;

  /// Total degree bounds of numerator and denominator.
  std::pair<i64, i64> degree(Node n) const { return deg_.at(n); }
  /// Output values, or nullopt when a denominator vanishes.
  std::optional<std::vector<u64>> eval(const std::vector<u64>& point, const FFEmbedding& e) const;

 private:
  struct Instr {
    Op op;
    Node a = 0, b = 0;
    i64 e = 0;
    Rational c;
    Root r;
  };
  Node push(Instr ins, std::pair<i64, i64> deg);
  std::size_t inputs_;
  std::vector<Instr> ops_;
  std::vector<std::pair<i64, i64>> deg_;
  std::vector<Node> outputs_;
};

struct PitVerdict {
  enum class Outcome { Equal, Unequal, Inconclusive } outcome = Outcome::Inconclusive;
  int trials = 0;
  int resamples = 0;
  i64 degree = 0;
  double log2_per_trial = 0;  // log2(d/q)
  double log2_total = 0;      // trials * log2(d/q)
  std::vector<u64> witness;
  std::string detail;
  bool equal() const { return outcome == Outcome::Equal; }
};

/// Compares outputs of a and b pairwise at random points of F_q^n.
PitVerdict pit_equal(const Slp& a, const Slp& b, const FFEmbedding& e, int trials, u64 seed);

/// Shared verification knobs.
struct VerifyContext {
  FFEmbedding e1, e2;
  int trials = 3;
  u64 seed = 1;
  static VerifyContext make(i64 N, int prime_bits, int trials, u64 seed);
};

/// new_v = coeff[v] * prod_t old_t^{exps[v][t]}.
struct MonomialSub {
  VarSpace new_vars;
  std::vector<Root> coeff;
  IntMatrix exps;
  /// Allows a non-unimodular matrix (passage to a subfield); requires trivial coefficients.
  bool sublattice = false;
};

/// new_v = sum_t m[v][t] old_t.  dft_order > 0 marks a block DFT at that root order.
struct LinearSub {
  VarSpace new_vars;
  LinearMap matrix;
  i64 dft_order = 0;
};

/// Drops the listed variables; the others survive unchanged.
struct RatioDrop {
  std::vector<std::size_t> dropped;
};

/// new = forward(old), old = inverse(new).
struct RationalSub {
  VarSpace new_vars;
  Slp forward;
  Slp inverse;
  std::string label;
};

using Substitution = std::variant<MonomialSub, LinearSub, RatioDrop, RationalSub>;

struct InvertibilityEvidence {
  bool ok = false;
  std::string method;
  std::string detail;
  std::vector<PitVerdict> pit;
};

InvertibilityEvidence verify_invertible(const MonomialSub& s);
InvertibilityEvidence verify_invertible(const LinearSub& s, const VerifyContext& ctx);
InvertibilityEvidence verify_invertible(const RationalSub& s, const VerifyContext& ctx);

/// Exact conjugation of a monomial action.
GroupAction apply_monomial_sub(const GroupAction& a, const MonomialSub& s);
/// Checks S G = G' S for each generator against the claimed maps, then adopts them.
GroupAction apply_linear_sub(const GroupAction& a, const LinearSub& s, const std::vector<MonomialMap>& claimed,
                             const VerifyContext& ctx);

struct DropRecord {
  std::vector<std::string> dropped;
  std::vector<std::string> survivors;
  int invariants = 0;  // one per dropped variable
};

/// Fiber drop: g . x0 = lambda_g x0 with lambda_g free of dropped variables, survivors free of x0.
std::pair<GroupAction, DropRecord> drop_fibers(const GroupAction& a, const std::vector<std::size_t>& dropped);

/// PIT-verified adoption of claimed maps for a rational change of variables.
std::pair<GroupAction, std::vector<PitVerdict>> apply_rational_sub(const GroupAction& a, const RationalSub& s,
                                                                  const std::vector<MonomialMap>& claimed,
                                                                  const VerifyContext& ctx);

/// Change v_1..v_{n-1} -> s_1..s_{n-1} on the listed block; other variables pass through.
/// xi = zeta_n at level N.  New variables are family[prefix..., i].
RationalSub lemma24_sub(int n, i64 N, const VarSpace& old_vars, const std::vector<std::size_t>& block,
                        const std::string& family = "s", const std::vector<i64>& prefix = {});
/// Inlines src into dst with the given input nodes; returns the output nodes.
std::vector<Slp::Node> inline_slp(Slp& dst, const Slp& src, const std::vector<Slp::Node>& inputs);
/// tau: v_1 -> v_2 -> ... -> v_{n-1} -> (v_1...v_{n-1})^-1 on a block of n - 1 variables.
MonomialMap lemma24_cycle(int n, i64 N);
/// The claimed diagonal form tau^t: s_i -> xi^{i t} s_i.
MonomialMap lemma24_claim(int n, i64 N, i64 t);

/// Determinant of a square matrix mod q.
u64 det_mod(std::vector<std::vector<u64>> m, u64 q);

}  // namespace noether
