#pragma once

// Elementary integer utilities: smallest-prime-factor sieve, factorization,
// Kronecker symbol, exact square roots and square roots modulo prime powers.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace geotrace {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Smallest prime factor table on [0, limit]. Immutable after construction,
// so one instance can be shared by any number of threads.
class SpfTable {
 public:
  explicit SpfTable(u64 limit);

  u64 limit() const noexcept { return limit_; }

  // Requires 2 <= n <= limit().
  u32 spf(u64 n) const { return spf_[n]; }

  bool is_prime(u64 n) const { return n >= 2 && n <= limit_ && spf_[n] == n; }

  // All primes <= limit(), ascending.
  std::span<const u32> primes() const noexcept { return primes_; }

 private:
  u64 limit_;
  std::vector<u32> spf_;
  std::vector<u32> primes_;
};

// Throws Errc::invalid_argument when limit < 2.
SpfTable build_spf_table(u64 limit);

struct PrimePower {
  u64 prime;
  unsigned exponent;

  auto operator<=>(const PrimePower&) const = default;
};

// Primes strictly increasing, exponents >= 1. The empty list is 1.
using Factorization = std::vector<PrimePower>;

// Factorizes n by the sieve when n <= limit, otherwise by trial division with
// the sieved primes. A leftover cofactor above limit^2 that is not prime
// raises Errc::unsupported_input (the sieve is too small for n).
Factorization factorize(u64 n, const SpfTable& table);

// Product of prime^exponent. Throws Errc::invalid_argument on overflow.
u64 reconstruct(const Factorization& f);

// Factorization of the product of the two inputs.
Factorization multiply(const Factorization& lhs, const Factorization& rhs);

// Kronecker symbol (d / n) on its full domain, via quadratic reciprocity.
int kronecker(i64 d, i64 n);

u64 isqrt(u64 n);
u64 isqrt(u128 n);

// Root r with r*r == n, if n is a perfect square.
std::optional<u64> exact_sqrt(u64 n);
std::optional<u64> exact_sqrt(u128 n);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);

// Modular inverse of a modulo m; requires gcd(a, m) == 1.
u64 invmod(u64 a, u64 m);

// Deterministic for all 64-bit inputs (Miller-Rabin with a fixed base set).
bool is_prime(u64 n);

// One square root of a modulo an odd prime p (Tonelli-Shanks), or nullopt
// when a is a non-residue. a == 0 mod p yields 0.
std::optional<u64> sqrt_mod_prime(u64 a, u64 p);

// Every x in [0, p^e) with x^2 == a (mod p^e), ascending. Works for p == 2
// and for p | a. Coprime odd roots are Hensel-lifted; the remaining cases
// are lifted one digit at a time, which costs O(p) per root per level.
std::vector<u64> sqrt_mod_prime_power(u64 a, u64 p, unsigned e);

// Same as above, but starting from a precomputed root of a modulo p
// (root_mod_p == nullopt meaning a is a non-residue mod p).
std::vector<u64> lift_sqrt_mod_prime_power(u64 a, u64 p, unsigned e,
                                           std::optional<u64> root_mod_p);

// Chinese remaindering of two root sets: all x mod (m1*m2) with
// x == r1 (mod m1), x == r2 (mod m2) for r1 in roots1, r2 in roots2.
// The moduli must be coprime.
std::vector<u64> crt_combine(std::span<const u64> roots1, u64 m1,
                             std::span<const u64> roots2, u64 m2);

}  // namespace geotrace
