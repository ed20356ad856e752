#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "noether/action.hpp"

namespace noether {

/// Generator j scales variable v by zeta_{orders[j]}^{chars[j][v]}.
struct DiagonalAction {
  std::vector<std::vector<i64>> chars;
  std::vector<i64> orders;
  std::size_t vars() const { return chars.empty() ? 0 : chars[0].size(); }
  void validate() const;
};

struct HnfResult {
  IntMatrix H;
  IntMatrix U;  // U * M = H
};

/// Row-style Hermite normal form: positive pivots, entries above each pivot in [0, pivot).
HnfResult hnf(const IntMatrix& M);
IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b);

/// Rows (in HNF) generating {m in Z^n : chars . m = 0 mod orders}.
IntMatrix invariant_lattice(const DiagonalAction& d);
/// Product of the pivots of a square HNF basis.
i64 lattice_index(const IntMatrix& basis);
/// Exponent rows of the invariant Laurent monomials y^row (the HNF rows); each checked exactly.
IntMatrix fixed_generators(const DiagonalAction& d);
bool is_invariant(const DiagonalAction& d, const std::vector<i64>& m);
/// m lies in the Z-row span of a square HNF basis.
bool in_lattice(const IntMatrix& basis, const std::vector<i64>& m);

struct BruteReport {
  bool ok = false;
  i64 checked = 0;
  std::string witness;
};

/// Every invariant exponent vector in [-d, d]^n lies in the lattice, and every basis row is invariant.
BruteReport brute_check(const DiagonalAction& d, const IntMatrix& basis, i64 box);

/// Diagonal action read from a verified monomial action whose maps are all diagonal.
DiagonalAction diagonal_from_action(const GroupAction& a);

/// Text format:  "vars = n" then lines "gen <order>: e_1 ... e_n"; '#' starts a comment.
DiagonalAction parse_diagonal_spec(std::string_view text);

}  // namespace noether
