#include "noether/cyclo.hpp"

#include <random>

namespace noether {

Root::Root(i64 exponent, i64 level) : N(level) {
  if (level < 1) throw ArgumentError("root level must be >= 1");
  k = mod(exponent, level);
}

Root Root::lift(i64 j, i64 M, i64 N) {
  if (M < 1 || N % M != 0) throw ArgumentError("zeta_" + std::to_string(M) + " does not live at level " + std::to_string(N));
  return Root(mod(j, M) * (N / M), N);
}

i64 Root::order() const { return N / std::gcd(k, N); }

std::string Root::str() const {
  if (k == 0) return "1";
  return "zeta_" + std::to_string(N) + "^" + std::to_string(k);
}

Root root_mul(const Root& a, const Root& b) {
  if (a.N != b.N) throw ArgumentError("root level mismatch (" + std::to_string(a.N) + " vs " + std::to_string(b.N) + ")");
  return Root(a.k + b.k, a.N);
}

Root root_pow(const Root& a, i64 n) {
  const __int128 e = static_cast<__int128>(a.k) * mod(n, a.N);
  return Root(static_cast<i64>(e % a.N), a.N);
}

u64 derive_seed(u64 seed, u64 tag) {
  u64 z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

u64 find_prime(i64 N, int bits, u64 seed) {
  if (N < 1) throw ArgumentError("find_prime: N must be >= 1");
  if (bits != 0 && (bits < 8 || bits > 62)) throw ArgumentError("prime size must be 0 or between 8 and 62 bits");
  const u64 n = static_cast<u64>(N);
  constexpr u64 kBudget = 50000000;
  u64 q;
  if (bits == 0) {
    q = n + 1;
  } else {
    const u64 floor = u64{1} << bits;
    std::mt19937_64 rng(derive_seed(seed, 0x7072696d65));
    const u64 offset = rng() % 4096;
    q = ((floor + n - 1) / n + offset) * n + 1;
  }
  for (u64 step = 0; step < kBudget; ++step, q += n) {
    if (q >= (u64{1} << 63)) break;
    if (is_prime_u64(q)) return q;
  }
  throw ScopeError("find_prime: search budget exceeded for N = " + std::to_string(N));
}

u64 FFEmbedding::embed(const Root& r) const {
  if (r.N != N) throw ArgumentError("embedding level mismatch");
  return powmod(omega, static_cast<u64>(r.k), q);
}

bool has_exact_order(u64 omega, i64 N, u64 q) {
  if (powmod(omega, static_cast<u64>(N), q) != 1) return false;
  for (i64 l : prime_factors(N)) {
    if (powmod(omega, static_cast<u64>(N / l), q) == 1) return false;
  }
  return true;
}

std::optional<FFEmbedding> embedding_from_generator(u64 q, i64 N, u64 g) {
  if (N < 1 || (q - 1) % static_cast<u64>(N) != 0) throw ArgumentError("embedding requires q = 1 mod N");
  const u64 omega = powmod(g % q, (q - 1) / static_cast<u64>(N), q);
  if (!has_exact_order(omega, N, q)) return std::nullopt;
  return FFEmbedding{q, omega, N};
}

FFEmbedding make_embedding(u64 q, i64 N, u64 seed) {
  if (N < 1 || (q - 1) % static_cast<u64>(N) != 0) throw ArgumentError("embedding requires q = 1 mod N");
  if (N == 1) return FFEmbedding{q, 1, 1};
  std::mt19937_64 rng(derive_seed(seed, 0x656d6264));
  for (;;) {
    const u64 g = 2 + rng() % (q - 2);
    if (auto e = embedding_from_generator(q, N, g)) return *e;
  }
}

}  // namespace noether
