#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "noether/cyclo.hpp"
#include "noether/group.hpp"

namespace noether {

using Rational = boost::multiprecision::cpp_rational;

/// A variable such as x[2,0]: family letter plus indices, and the step that created it.
struct Variable {
  std::string family;
  std::vector<i64> idx;
  std::string origin;
  std::string name() const;
};

class VarSpace {
 public:
  VarSpace() = default;
  explicit VarSpace(std::vector<Variable> vars);
  std::size_t size() const { return vars_.size(); }
  const Variable& operator[](std::size_t i) const { return vars_.at(i); }
  const std::vector<Variable>& vars() const { return vars_; }
  std::optional<std::size_t> find(const std::string& family, const std::vector<i64>& idx) const;
  std::size_t at(const std::string& family, const std::vector<i64>& idx) const;
  std::string name(std::size_t i) const { return vars_.at(i).name(); }

 private:
  std::vector<Variable> vars_;
};

/// c * prod_t t^{e[t]}
struct Monomial {
  Root coeff;
  std::vector<i64> exps;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// v -> coeff[v] * prod_t t^{exps[v][t]}.
class MonomialMap {
 public:
  MonomialMap() = default;
  MonomialMap(std::vector<Root> coeff, IntMatrix exps);
  static MonomialMap identity(std::size_t n, i64 N);
  /// Permutation with per-variable roots: v -> coeff[v] * perm[v].
  static MonomialMap permutation(const std::vector<std::size_t>& perm, std::vector<Root> coeff);

  std::size_t size() const { return coeff_.size(); }
  i64 level() const { return level_; }
  const Root& coeff(std::size_t v) const { return coeff_.at(v); }
  const IntMatrix& exps() const { return exps_; }
  Monomial image(std::size_t v) const { return {coeff_.at(v), exps_.at(v)}; }
  Monomial apply(const Monomial& m) const;
  bool is_identity() const;
  /// Every row is a unit vector (the map is linear in the variables).
  bool is_linear() const;
  /// Image variable of v when the row is a unit vector.
  std::optional<std::size_t> target(std::size_t v) const;
  /// Restriction to a subset of variables that the map keeps closed.
  MonomialMap restrict(const std::vector<std::size_t>& keep) const;
  friend bool operator==(const MonomialMap&, const MonomialMap&) = default;

 private:
  std::vector<Root> coeff_;
  IntMatrix exps_;
  i64 level_ = 1;
};

/// (f o g)(v) = f(g(v)).
MonomialMap compose(const MonomialMap& f, const MonomialMap& g);
/// Requires a unimodular exponent matrix.
MonomialMap invert(const MonomialMap& f);
MonomialMap map_power(const MonomialMap& f, i64 n);

/// Finite sum of rational multiples of roots of unity at one level.
class FormalSum {
 public:
  FormalSum() = default;
  explicit FormalSum(i64 N) : level_(N) {}
  static FormalSum of(const Root& r, Rational c = 1);
  void add(const Root& r, const Rational& c);
  FormalSum operator+(const FormalSum& o) const;
  FormalSum operator*(const FormalSum& o) const;
  bool is_zero() const { return terms_.empty(); }
  const std::map<i64, Rational>& terms() const { return terms_; }
  i64 level() const { return level_; }
  u64 eval(const FFEmbedding& e) const;
  std::string str() const;
  friend bool operator==(const FormalSum&, const FormalSum&) = default;

 private:
  std::map<i64, Rational> terms_;  // root exponent -> coefficient
  i64 level_ = 1;
};

u64 rational_mod(const Rational& r, u64 q);

/// v -> sum_t m[v][t] * t.
struct LinearMap {
  std::vector<std::vector<FormalSum>> m;
  std::size_t size() const { return m.size(); }
  static LinearMap from_monomial(const MonomialMap& f);
  std::vector<std::vector<u64>> eval(const FFEmbedding& e) const;
};

LinearMap compose(const LinearMap& f, const LinearMap& g);
/// Exact when normalized forms coincide; otherwise compared under both embeddings.
bool linear_equal(const LinearMap& a, const LinearMap& b, const FFEmbedding& e1, const FFEmbedding& e2);

/// Generators of a PcGroup acting by monomial maps on a variable space.
struct GroupAction {
  std::shared_ptr<const PcGroup> group;
  VarSpace vars;
  std::vector<MonomialMap> gens;  // one map per PcGroup generator
  i64 level = 1;
  bool homomorphism = false;
  bool faithful = false;

  /// Map of a word: left action, so M(gh) = M(g) o M(h).
  MonomialMap word_map(const Word& w) const;
  MonomialMap element_map(const Element& x) const;
};

struct ActionReport {
  bool ok = false;
  std::string witness;
};

ActionReport verify_homomorphism(const GroupAction& a);
ActionReport verify_faithful(const GroupAction& a, i64 max_order = 1000000);

/// Level p^e large enough for the induced representation of g.
i64 induced_level(const PcGroup& g);
/// Induced representation from the characters of H along the powers of alpha; verified.
GroupAction induce_representation(std::shared_ptr<const PcGroup> g, i64 level = 0, i64 max_order = 1000000);

/// Writes g as alpha^t h with 0 <= t < p^a and h in H (coordinates over the H basis).
struct TopSplit {
  i64 t = 0;
  std::vector<i64> h;
};
TopSplit split_top(const PcGroup& g, const HDecomposer& dec, const Element& x, int a);

std::string format_monomial(const Monomial& m, const VarSpace& vars);
std::string format_map(const MonomialMap& f, const VarSpace& vars);

}  // namespace noether
