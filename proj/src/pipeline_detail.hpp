#pragma once

#include <string>
#include <vector>

#include "noether/pipeline.hpp"

namespace noether::detail {

StepRecord make_step(std::string kind, std::string node, std::string description, const GroupAction& result);
void add_check(StepRecord& st, std::string name, bool passed, std::string detail = {});
/// Throws VerificationError naming the check when passed is false.
void require(StepRecord& st, const std::string& name, bool passed, const std::string& detail);

/// Indices of the variables of a family whose index starts with prefix, in VarSpace order.
std::vector<std::size_t> family_indices(const VarSpace& vars, const std::string& family, const std::vector<i64>& prefix = {});

/// Monomial substitution that renames nothing and changes nothing; callers edit rows.
MonomialSub identity_sub(const VarSpace& vars, i64 N);

/// Power t with f restricted to block equal to the product-inverse cycle of length n - 1 raised to t.
std::optional<i64> cycle_power(const MonomialMap& f, const std::vector<std::size_t>& block, int n);

/// Applies the cyclic linearization to one block; every generator must act on it as a power of the cycle.
StepRecord lemma24_step(GroupAction& a, const std::vector<std::size_t>& block, int n, const std::string& family,
                        const std::vector<i64>& prefix, const VerifyContext& ctx);

/// Restriction of a to the listed variables (which must be closed under every generator).
GroupAction restrict_action(const GroupAction& a, const std::vector<std::size_t>& keep);

GroupSummary summarize(const PcGroup& g, const std::string& name, i64 max_order);

}  // namespace noether::detail
