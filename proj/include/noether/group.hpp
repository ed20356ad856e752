#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noether/common.hpp"

namespace noether {

/// A word over the generators: (generator index, signed exponent) letters.
using Word = std::vector<std::pair<std::size_t, i64>>;

/// Normal form g_1^{e_1} ... g_n^{e_n} with 0 <= e_i < relative order of g_i.
using Element = std::vector<i64>;

/// Optional parameter shorthand for the two three-generator families.
struct FamilyParams {
  enum class Kind { G1, G2 } kind = Kind::G1;
  i64 p = 0;
  int a = 0, b = 0, c = 0;
  int s_or_r = 0;  // s for G1, r for G2
  i64 x = 0;
};

/// Power-commutator presentation of a finite p-group with a designated abelian
/// normal subgroup H and a top generator alpha whose image generates G/H.
///
/// Conventions: [g, h] = g^-1 h^-1 g h.  The relation for a pair j > i is stored
/// as [g_j, g_i] and must be a word in generators with index > i; power
/// relations g_i^{p^{a_i}} must be words in generators with index > i.
/// Collection tables are built on construction, after which the object is
/// immutable.
class PcGroup {
 public:
  PcGroup(i64 p, std::vector<std::string> names, std::vector<int> rel_exponents,
          std::vector<Word> powers, std::vector<std::vector<Word>> commutators,
          std::vector<std::size_t> h_generators, std::optional<std::size_t> top,
          std::optional<FamilyParams> family = std::nullopt);

  i64 p() const { return p_; }
  std::size_t rank() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  int rel_exponent(std::size_t i) const { return rel_exp_.at(i); }
  i64 rel_order(std::size_t i) const { return rel_order_.at(i); }
  i64 order() const { return order_; }
  const std::vector<std::size_t>& h_generators() const { return h_gens_; }
  /// Top generator; nullopt when H is the whole group.
  std::optional<std::size_t> top() const { return top_; }
  const std::optional<FamilyParams>& family() const { return family_; }

  const Word& power_word(std::size_t i) const { return powers_.at(i); }
  /// Stored word for [g_j, g_i], j > i.
  const Word& commutator_word(std::size_t j, std::size_t i) const { return comms_.at(j).at(i); }

  Element identity() const { return Element(rank(), 0); }
  Element generator(std::size_t i) const;
  /// Right-multiplies x in place by g_i.
  void mul_gen(Element& x, std::size_t i) const;
  Element multiply(const Element& x, const Element& y) const;
  Element inverse(const Element& x) const;
  Element power(const Element& x, i64 n) const;
  Element commutator(const Element& x, const Element& y) const;
  Element conjugate(const Element& x, const Element& by) const;  // by^-1 x by
  Element collect(const Word& w) const;
  /// Order of the generator as a group element (not its relative order).
  i64 generator_order(std::size_t i) const { return gen_order_.at(i); }

  std::size_t index(const Element& x) const;
  Element element_at(std::size_t idx) const;
  Word normal_word(const Element& x) const;
  std::string format(const Element& x) const;
  std::string format(const Word& w) const;

 private:
  void build_tables();
  void build_regular_tables(std::size_t i);
  void mul_elem(Element& x, const Element& y) const;
  void mul_gen_slow(Element& x, std::size_t i) const;
  std::size_t rm(std::size_t i, std::size_t x) const;
  std::size_t rm_elem(std::size_t x, const Element& y) const;

  i64 p_;
  std::vector<std::string> names_;
  std::vector<int> rel_exp_;
  std::vector<i64> rel_order_;
  std::vector<Word> powers_;
  std::vector<std::vector<Word>> comms_;
  std::vector<std::size_t> h_gens_;
  std::optional<std::size_t> top_;
  std::optional<FamilyParams> family_;
  i64 order_ = 1;
  std::vector<std::size_t> stride_;

  std::vector<Element> power_elem_;
  std::vector<std::vector<Element>> conj_;  // conj_[i][j] = g_i^-1 g_j g_i, j > i
  std::vector<Element> gen_inverse_;
  std::vector<i64> gen_order_;
  // right_[i][B] = index(B * g_i) for B in <g_i, ..., g_n>; empty for large groups
  bool tabled_ = false;
  std::vector<std::vector<std::uint32_t>> right_;
};

/// Parses the line-oriented group-spec format (see docs/group-spec.md).
PcGroup parse_group_spec(std::string_view text);
/// Spec text that parses back to the same presentation (the shorthand form for family groups).
std::string format_group_spec(const PcGroup& g);
/// Parses a word such as "a^2*b^-1*c" or "1".
Word parse_word(std::string_view text, const std::vector<std::string>& names, int line = 0);

/// Presentation of G1 or G2 with generators alpha, beta, gamma.
PcGroup make_family_group(const FamilyParams& params);

/// Enumerated right-regular permutation representation.
struct Enumeration {
  std::size_t size = 0;
  std::vector<std::vector<std::size_t>> right_mul;  // right_mul[g][x] = index(x * g_g)
  std::size_t multiply(const PcGroup& g, std::size_t x, std::size_t y) const;
};

Enumeration enumerate(const PcGroup& g, i64 max_order = 1000000);

struct ConsistencyReport {
  bool consistent = false;
  i64 order = 0;
  i64 exponent = 0;
  std::string witness;  // relator and element when inconsistent
};

ConsistencyReport verify_consistency(const PcGroup& g, i64 max_order = 1000000);

/// Length of the lower central series (1 for abelian groups, including the trivial group).
int nilpotency_class(const PcGroup& g, i64 max_order = 1000000);

struct AbcWitness {
  enum class Failure { None, HNotAbelian, HNotNormal, QuotientNotCyclic };
  Failure failure = Failure::None;
  bool h_abelian = false;
  bool h_normal = false;
  bool quotient_cyclic = false;
  i64 h_order = 0;
  int quotient_log = 0;  // G/H has order p^a
  bool split = false;    // alpha^{p^a} == 1
  bool h_basis = false;  // |H| equals the product of the orders of its generators
  std::string detail;
  bool ok() const { return failure == Failure::None; }
};

AbcWitness check_abc(const PcGroup& g, i64 max_order = 1000000);

/// Decomposition of gamma_j = [alpha_j, alpha] over the H basis.
struct CommutatorData {
  std::vector<Element> gamma;               // gamma[j]
  std::vector<std::vector<i64>> exponent;   // exponent[i][j]: alpha_i-exponent of gamma_j
  std::vector<std::vector<int>> valuation;  // r_ij, or -1 when the exponent vanishes
  std::vector<std::vector<i64>> unit;       // alpha_ij (0 when the exponent vanishes)
  std::vector<int> h_log_orders;            // a_i
  int a = 0;
  bool central = true;
};

CommutatorData commutator_data(const PcGroup& g, i64 max_order = 1000000);

/// Exponent vector of an element of H over the H generators, when H is a direct product of
/// the cyclic groups they generate.
class HDecomposer {
 public:
  HDecomposer(const PcGroup& g, i64 max_order = 1000000);
  std::optional<std::vector<i64>> decompose(const Element& h) const;
  const std::vector<i64>& orders() const { return orders_; }

 private:
  const PcGroup* g_;
  std::vector<i64> orders_;
  std::vector<std::vector<i64>> table_;  // indexed by element index; empty when not in H
};

std::string format_failure(AbcWitness::Failure f);

}  // namespace noether
