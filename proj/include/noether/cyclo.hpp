#pragma once

#include <optional>
#include <string>

#include "noether/common.hpp"

namespace noether {

/// zeta_N^k at the session level N.
struct Root {
  i64 k = 0;
  i64 N = 1;

  Root() = default;
  Root(i64 exponent, i64 level);
  /// zeta_M^j rewritten at level N (M must divide N).
  static Root lift(i64 j, i64 M, i64 N);
  static Root one(i64 N) { return Root(0, N); }

  bool is_one() const { return k == 0; }
  /// Multiplicative order of the root.
  i64 order() const;
  std::string str() const;
  friend bool operator==(const Root&, const Root&) = default;
  friend auto operator<=>(const Root&, const Root&) = default;
};

Root root_mul(const Root& a, const Root& b);
Root root_pow(const Root& a, i64 n);
inline Root root_inv(const Root& a) { return root_pow(a, -1); }

/// Smallest prime q = 1 mod N when bits == 0; otherwise a prime q = 1 mod N with
/// q >= 2^bits, starting from a seed-dependent offset.
u64 find_prime(i64 N, int bits, u64 seed);

/// zeta_N^k -> omega^k mod q.
struct FFEmbedding {
  u64 q = 2;
  u64 omega = 1;
  i64 N = 1;
  u64 embed(const Root& r) const;
};

/// omega = g^{(q-1)/N} for a seeded random g, retried until omega has order exactly N.
FFEmbedding make_embedding(u64 q, i64 N, u64 seed);
/// Same construction for a given g; nullopt when the order check fails.
std::optional<FFEmbedding> embedding_from_generator(u64 q, i64 N, u64 g);
bool has_exact_order(u64 omega, i64 N, u64 q);

/// splitmix64 step used to derive independent sub-seeds from the session seed.
u64 derive_seed(u64 seed, u64 tag);

}  // namespace noether
