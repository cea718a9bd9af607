#include "geotrace/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geotrace/error.hpp"

namespace geotrace {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::unsupported_input: return "unsupported-input";
    case Errc::invalid_discriminant: return "invalid-discriminant";
    case Errc::tolerance_unreachable: return "tolerance-unreachable";
    case Errc::not_in_sl2: return "not-in-SL2";
    case Errc::instance_too_large: return "instance-too-large";
    case Errc::insufficient_data: return "insufficient-data";
  }
  return "unknown";
}

SpfTable::SpfTable(u64 limit) : limit_(limit) {
  if (limit < 2) {
    throw Error(Errc::invalid_argument, "sieve limit must be at least 2");
  }
  if (limit > std::numeric_limits<u32>::max()) {
    throw Error(Errc::invalid_argument, "sieve limit exceeds 32-bit range");
  }
  spf_.assign(limit + 1, 0);
  // Linear sieve: every composite is struck exactly once by its smallest
  // prime factor.
  for (u64 n = 2; n <= limit; ++n) {
    if (spf_[n] == 0) {
      spf_[n] = static_cast<u32>(n);
      primes_.push_back(static_cast<u32>(n));
    }
    for (u32 q : primes_) {
      if (q > spf_[n] || n * q > limit) break;
      spf_[n * q] = q;
    }
  }
}

SpfTable build_spf_table(u64 limit) { return SpfTable(limit); }

Factorization factorize(u64 n, const SpfTable& table) {
  if (n == 0) throw Error(Errc::invalid_argument, "cannot factorize 0");
  Factorization out;
  auto push = [&out](u64 q) {
    if (!out.empty() && out.back().prime == q) {
      ++out.back().exponent;
    } else {
      out.push_back({q, 1});
    }
  };
  if (n <= table.limit()) {
    while (n > 1) {
      const u64 q = table.spf(n);
      push(q);
      n /= q;
    }
    return out;
  }
  for (u32 q : table.primes()) {
    if (static_cast<u64>(q) * q > n) break;
    while (n % q == 0) {
      push(q);
      n /= q;
    }
  }
  if (n > 1) {
    const u128 lim2 = static_cast<u128>(table.limit()) * table.limit();
    if (static_cast<u128>(n) > lim2 && !is_prime(n)) {
      throw Error(Errc::unsupported_input,
                  "composite cofactor " + std::to_string(n) +
                      " exceeds the square of the sieve limit");
    }
    push(n);
  }
  return out;
}

u64 reconstruct(const Factorization& f) {
  u128 acc = 1;
  for (const auto& [q, e] : f) {
    for (unsigned i = 0; i < e; ++i) {
      acc *= q;
      if (acc > std::numeric_limits<u64>::max()) {
        throw Error(Errc::invalid_argument, "factorization overflows 64 bits");
      }
    }
  }
  return static_cast<u64>(acc);
}

Factorization multiply(const Factorization& lhs, const Factorization& rhs) {
  Factorization out;
  out.reserve(lhs.size() + rhs.size());
  auto i = lhs.begin();
  auto j = rhs.begin();
  while (i != lhs.end() || j != rhs.end()) {
    if (j == rhs.end() || (i != lhs.end() && i->prime < j->prime)) {
      out.push_back(*i++);
    } else if (i == lhs.end() || j->prime < i->prime) {
      out.push_back(*j++);
    } else {
      out.push_back({i->prime, i->exponent + j->exponent});
      ++i;
      ++j;
    }
  }
  return out;
}

namespace {

// Jacobi symbol (a / n) for odd n > 0.
int jacobi(u64 a, u64 n) {
  int result = 1;
  a %= n;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      const u64 r = n & 7;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

u64 magnitude(i64 v) {
  return v < 0 ? static_cast<u64>(-(v + 1)) + 1 : static_cast<u64>(v);
}

}  // namespace

int kronecker(i64 d, i64 n) {
  if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
  int result = 1;
  u64 m = magnitude(n);
  if (n < 0 && d < 0) result = -result;
  if ((m & 1) == 0) {
    if ((d & 1) == 0) return 0;
    // (d / 2) depends on d mod 8.
    const u64 r = static_cast<u64>(d) & 7;
    const int two = (r == 1 || r == 7) ? 1 : -1;
    while ((m & 1) == 0) {
      m >>= 1;
      result *= two;
    }
  }
  if (m == 1) return result;
  u64 residue;
  if (d >= 0) {
    residue = static_cast<u64>(d) % m;
  } else {
    residue = (m - magnitude(d) % m) % m;
  }
  return result * jacobi(residue, m);
}

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

u64 isqrt(u128 n) {
  if (n <= std::numeric_limits<u64>::max()) return isqrt(static_cast<u64>(n));
  long double est = std::sqrt(static_cast<long double>(n));
  u64 r = est >= 18446744073709551615.0L ? std::numeric_limits<u64>::max()
                                         : static_cast<u64>(est);
  while (static_cast<u128>(r) * r > n) --r;
  while (r < std::numeric_limits<u64>::max() &&
         static_cast<u128>(r + 1) * (r + 1) <= n) {
    ++r;
  }
  return r;
}

std::optional<u64> exact_sqrt(u64 n) {
  const u64 r = isqrt(n);
  if (static_cast<u128>(r) * r == n) return r;
  return std::nullopt;
}

std::optional<u64> exact_sqrt(u128 n) {
  const u64 r = isqrt(n);
  if (static_cast<u128>(r) * r == n) return r;
  return std::nullopt;
}

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 invmod(u64 a, u64 m) {
  __int128 r0 = m, r1 = a % m;
  __int128 s0 = 0, s1 = 1;
  while (r1 != 0) {
    const __int128 q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    s0 -= q * s1;
    std::swap(s0, s1);
  }
  if (r0 != 1) throw Error(Errc::invalid_argument, "element is not invertible");
  if (s0 < 0) s0 += m;
  return static_cast<u64>(s0);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::optional<u64> sqrt_mod_prime(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  if (p == 2) return a;
  if (powmod(a, (p - 1) / 2, p) != 1) return std::nullopt;
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);

  u64 q = p - 1;
  unsigned s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u64 z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;

  u64 m = s;
  u64 c = powmod(z, q, p);
  u64 t = powmod(a, q, p);
  u64 r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0;
    u64 t2 = t;
    while (t2 != 1) {
      t2 = mulmod(t2, t2, p);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + 1 < m - i; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

std::vector<u64> lift_sqrt_mod_prime_power(u64 a, u64 p, unsigned e,
                                           std::optional<u64> root_mod_p) {
  if (e == 0) return {0};
  u64 pe = 1;
  for (unsigned i = 0; i < e; ++i) pe *= p;
  a %= pe;

  if (p != 2 && a % p != 0) {
    if (!root_mod_p) return {};
    u64 r = *root_mod_p % p;
    u64 mod = p;
    for (unsigned j = 1; j < e; ++j) {
      mod *= p;
      // r <- r - (r^2 - a) / (2r)  (mod p^(j+1))
      const u64 f = (mulmod(r, r, mod) + mod - a % mod) % mod;
      const u64 inv = invmod(mulmod(2, r, mod), mod);
      r = (r + mod - mulmod(f, inv, mod)) % mod;
    }
    std::vector<u64> out{r, pe - r};
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<u64> cur;
  if (p == 2) {
    cur.push_back(a & 1);
  } else {
    cur.push_back(0);  // p | a
  }
  u64 mod = p;
  for (unsigned j = 1; j < e; ++j) {
    const u64 next = mod * p;
    const u64 target = a % next;
    std::vector<u64> lifted;
    for (u64 r : cur) {
      for (u64 i = 0; i < p; ++i) {
        const u64 cand = r + i * mod;
        if (mulmod(cand, cand, next) == target) lifted.push_back(cand);
      }
    }
    cur = std::move(lifted);
    mod = next;
    if (cur.empty()) break;
  }
  std::sort(cur.begin(), cur.end());
  return cur;
}

std::vector<u64> sqrt_mod_prime_power(u64 a, u64 p, unsigned e) {
  std::optional<u64> root;
  if (p != 2) root = sqrt_mod_prime(a, p);
  return lift_sqrt_mod_prime_power(a, p, e, root);
}

std::vector<u64> crt_combine(std::span<const u64> roots1, u64 m1,
                             std::span<const u64> roots2, u64 m2) {
  std::vector<u64> out;
  out.reserve(roots1.size() * roots2.size());
  const u64 inv = m2 == 1 ? 0 : invmod(m1 % m2, m2);
  for (u64 r1 : roots1) {
    for (u64 r2 : roots2) {
      const u64 diff = (r2 % m2 + m2 - r1 % m2) % m2;
      const u64 k = mulmod(diff, inv, m2);
      out.push_back(r1 + m1 * k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace geotrace
