#include <random>

#include "doctest.h"
#include "geotrace/numtheory.hpp"
#include "support.hpp"

using namespace geotrace;

namespace {

// Plain trial division, no sieve.
Factorization trial_division(u64 n) {
  Factorization out;
  for (u64 q = 2; q * q <= n; ++q) {
    unsigned e = 0;
    while (n % q == 0) {
      n /= q;
      ++e;
    }
    if (e) out.push_back({q, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

// Legendre symbol by scanning all squares mod q.
int legendre_by_squares(i64 d, u64 q) {
  const u64 r = static_cast<u64>(((d % static_cast<i64>(q)) + static_cast<i64>(q)) %
                                 static_cast<i64>(q));
  if (r == 0) return 0;
  for (u64 x = 1; x < q; ++x) {
    if (x * x % q == r) return 1;
  }
  return -1;
}

}  // namespace

TEST_CASE("spf table examples") {
  const SpfTable t = build_spf_table(50);
  CHECK(t.spf(49) == 7);
  CHECK(t.spf(15) == 3);
  CHECK(t.spf(47) == 47);
  CHECK(test::error_code([] { build_spf_table(1); }) == Errc::invalid_argument);
}

TEST_CASE("spf entries are the least prime divisor up to 1e5") {
  const u64 limit = 100'000;
  const SpfTable t = build_spf_table(limit);
  for (u64 n = 2; n <= limit; ++n) {
    const u64 s = t.spf(n);
    REQUIRE(n % s == 0);
    REQUIRE(trial_division(s).size() == 1);
    REQUIRE(trial_division(n).front().prime == s);
    REQUIRE((s == n) == t.is_prime(n));
  }
}

TEST_CASE("factorize examples") {
  const SpfTable t = build_spf_table(1000);
  CHECK(factorize(12, t) == Factorization{{2, 2}, {3, 1}});
  CHECK(factorize(1, t).empty());
  CHECK(factorize(9997, t) == trial_division(9997));
  CHECK(factorize(9997, t) == Factorization{{13, 1}, {769, 1}});
}

TEST_CASE("factorize beyond the sieve") {
  const SpfTable t = build_spf_table(100);
  // Large prime cofactor is allowed.
  CHECK(factorize(2 * 1'000'003ull, t) == Factorization{{2, 1}, {1'000'003, 1}});
  // 101 * 103 is composite, above 100^2 and free of sieved primes.
  CHECK(test::error_code([&] { factorize(101ull * 103 * 107, t); }) ==
        Errc::unsupported_input);
}

TEST_CASE("factorize and reconstruct are inverse up to 1e6") {
  const SpfTable t = build_spf_table(1'000'000);
  for (u64 n = 1; n <= 1'000'000; ++n) {
    const Factorization f = factorize(n, t);
    REQUIRE(reconstruct(f) == n);
    for (std::size_t i = 1; i < f.size(); ++i) REQUIRE(f[i - 1].prime < f[i].prime);
  }
}

TEST_CASE("multiply merges factorizations") {
  const SpfTable t = build_spf_table(1000);
  CHECK(multiply(factorize(12, t), factorize(90, t)) == factorize(1080, t));
}

TEST_CASE("kronecker examples") {
  CHECK(kronecker(5, 11) == 1);
  CHECK(kronecker(8, 2) == 0);
  CHECK(kronecker(12, 35) == 1);
  CHECK(kronecker(12, 35) == legendre_by_squares(12, 5) * legendre_by_squares(12, 7));
}

TEST_CASE("kronecker matches Euler's criterion for odd primes to 997") {
  const SpfTable t = build_spf_table(997);
  for (u32 q : t.primes()) {
    if (q == 2) continue;
    for (i64 d = 0; d < q; ++d) {
      const u64 e = powmod(static_cast<u64>(d), (q - 1) / 2, q);
      const int euler = e == 0 ? 0 : (e == 1 ? 1 : -1);
      REQUIRE(kronecker(d, q) == euler);
      REQUIRE(kronecker(d - 3 * static_cast<i64>(q), q) == euler);
    }
  }
}

TEST_CASE("kronecker is completely multiplicative in n") {
  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<i64> dd(-100'000, 100'000);
  std::uniform_int_distribution<i64> nn(1, 30'000);
  for (int i = 0; i < 10'000; ++i) {
    const i64 d = dd(rng), m = nn(rng), n = nn(rng);
    REQUIRE(kronecker(d, m * n) == kronecker(d, m) * kronecker(d, n));
  }
}

TEST_CASE("kronecker is zero exactly on shared factors") {
  for (i64 d = -60; d <= 60; ++d) {
    for (i64 n = 1; n <= 60; ++n) {
      i64 g = d < 0 ? -d : d;
      i64 h = n;
      while (h) {
        const i64 r = g % h;
        g = h;
        h = r;
      }
      REQUIRE((kronecker(d, n) == 0) == (g != 1));
    }
  }
}

TEST_CASE("integer square roots") {
  CHECK(isqrt(u64{0}) == 0);
  CHECK(isqrt(u64{15}) == 3);
  CHECK(isqrt(u64{16}) == 4);
  CHECK(isqrt(~u64{0}) == 0xFFFFFFFFull);
  CHECK(exact_sqrt(u64{49}) == 7u);
  CHECK_FALSE(exact_sqrt(u64{50}).has_value());
  const u128 big = static_cast<u128>(3'000'000'000'000ull) * 3'000'000'000'000ull;
  CHECK(exact_sqrt(big) == 3'000'000'000'000ull);
  CHECK_FALSE(exact_sqrt(big + 1).has_value());
}

TEST_CASE("Miller-Rabin agrees with the sieve") {
  const SpfTable t = build_spf_table(200'000);
  for (u64 n = 0; n <= 200'000; ++n) REQUIRE(is_prime(n) == t.is_prime(n));
  CHECK(is_prime(18'446'744'073'709'551'557ull));
  CHECK_FALSE(is_prime(3'215'031'751ull));  // strong pseudoprime to 2, 3, 5, 7
}

TEST_CASE("square roots modulo primes and prime powers") {
  const SpfTable t = build_spf_table(200);
  for (u32 q : t.primes()) {
    for (u64 e = 1; e <= 3; ++e) {
      u64 mod = 1;
      for (u64 i = 0; i < e; ++i) mod *= q;
      if (mod > 2000) break;
      for (u64 a = 0; a < mod; ++a) {
        std::vector<u64> expect;
        for (u64 x = 0; x < mod; ++x) {
          if (x * x % mod == a) expect.push_back(x);
        }
        REQUIRE(sqrt_mod_prime_power(a, q, static_cast<unsigned>(e)) == expect);
      }
    }
  }
}

TEST_CASE("crt_combine") {
  const std::vector<u64> r1{1, 3}, r2{2};
  const auto r = crt_combine(r1, 4, r2, 5);
  REQUIRE(r.size() == 2);
  for (u64 x : r) {
    CHECK(x < 20);
    CHECK((x % 4 == 1 || x % 4 == 3));
    CHECK(x % 5 == 2);
  }
}
