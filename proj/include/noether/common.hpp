#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace noether {

using i64 = std::int64_t;
using u64 = std::uint64_t;

/// Malformed group-spec or diagonal-spec text. Carries a 1-based line number
/// (0 when the error is not tied to a line).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Input outside what the library handles (non-split, class too large, bound exceeded).
class ScopeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A verification step failed; the message names the check and a witness.
class VerificationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad arguments to an API call.
class ArgumentError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

i64 ipow(i64 base, unsigned exp);
/// p-adic valuation of a nonzero integer.
int valuation(i64 n, i64 p);
/// Returns e with p^e == n, or -1 when n is not a power of p.
int log_p_exact(i64 n, i64 p);
i64 mod(i64 a, i64 m);
/// Inverse of a modulo m (gcd(a, m) must be 1).
i64 inverse_mod(i64 a, i64 m);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);
bool is_prime_u64(u64 n);
std::vector<i64> prime_factors(i64 n);

using IntMatrix = std::vector<std::vector<i64>>;

IntMatrix identity_matrix(std::size_t n);
/// Exact determinant (fraction-free elimination on big integers); throws on overflow of i64.
i64 determinant(const IntMatrix& m);
/// Exact inverse of a unimodular matrix; throws ArgumentError when |det| != 1.
IntMatrix unimodular_inverse(const IntMatrix& m);

/// Inverse of a nonsingular integer matrix as numer / denom with denom > 0 minimal.
struct ScaledInverse {
  IntMatrix numer;
  i64 denom = 1;
};
ScaledInverse scaled_inverse(const IntMatrix& m);

}  // namespace noether
