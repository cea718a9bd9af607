#include "geotrace/quadforms.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

#include "geotrace/error.hpp"

namespace geotrace {

namespace {

// Per-thread sieve large enough to factor the |a| < sqrt(D) coefficients.
const SpfTable& coefficient_sieve(u64 limit) {
  thread_local std::unique_ptr<SpfTable> table;
  if (!table || table->limit() < limit) {
    u64 size = 1024;
    while (size < limit) size *= 2;
    table = std::make_unique<SpfTable>(size);
  }
  return *table;
}

i64 gcd3(i64 a, i64 b, i64 c) {
  return std::gcd(std::gcd(a, b), c);
}

// sqrt(D) - b < 2|a| < sqrt(D) + b with 0 < b <= floor(sqrt(D)), in integers.
// Since sqrt(D) is irrational, x < sqrt(D) <=> x <= isqrt(D) for integer x.
bool in_reduced_window(i64 abs_a, i64 b, i64 s) {
  return b >= 1 && b <= s && 2 * abs_a + b >= s + 1 && 2 * abs_a - b <= s;
}

}  // namespace

bool QuadForm::is_primitive() const noexcept { return gcd3(a, b, c) == 1; }

bool QuadForm::is_reduced() const noexcept {
  const i64 d = discriminant();
  if (d <= 0 || b <= 0) return false;
  const i64 s = static_cast<i64>(isqrt(static_cast<u64>(d)));
  if (s * s == d) return false;
  return in_reduced_window(a < 0 ? -a : a, b, s);
}

bool Discriminant::is_valid(i64 value) noexcept {
  if (value < 5) return false;
  const i64 r = value & 3;
  if (r != 0 && r != 1) return false;
  return !exact_sqrt(static_cast<u64>(value)).has_value();
}

Discriminant::Discriminant(i64 value) : value_(value), isqrt_(0) {
  if (!is_valid(value)) {
    throw Error(Errc::invalid_discriminant,
                "invalid discriminant " + std::to_string(value));
  }
  isqrt_ = static_cast<i64>(geotrace::isqrt(static_cast<u64>(value)));
}

std::vector<QuadForm> reduced_forms(const Discriminant& disc) {
  const i64 d = disc.value();
  const i64 s = disc.isqrt();
  const SpfTable& sieve = coefficient_sieve(static_cast<u64>(s) + 1);

  // Square root of D modulo each odd prime q <= s, computed on first use.
  // -1: non-residue, -2: not yet computed.
  std::vector<i64> prime_root(static_cast<std::size_t>(s) + 1, -2);
  auto root_mod = [&](u64 q) -> std::optional<u64> {
    i64& slot = prime_root[q];
    if (slot == -2) {
      const auto r = sqrt_mod_prime(static_cast<u64>(d) % q, q);
      slot = r ? static_cast<i64>(*r) : -1;
    }
    if (slot < 0) return std::nullopt;
    return static_cast<u64>(slot);
  };

  std::vector<QuadForm> out;
  std::vector<u64> roots;
  for (i64 a = 1; a <= s; ++a) {
    const i64 lo = std::max({i64{1}, s + 1 - 2 * a, 2 * a - s});
    if (lo > s) continue;

    // b^2 == D (mod 4a), assembled prime power by prime power.
    u64 rest = static_cast<u64>(a);
    unsigned two_exp = 2;
    while ((rest & 1) == 0) {
      rest >>= 1;
      ++two_exp;
    }
    roots = lift_sqrt_mod_prime_power(static_cast<u64>(d), 2, two_exp, 0);
    u64 modulus = u64{1} << two_exp;
    while (rest > 1 && !roots.empty()) {
      const u64 q = sieve.spf(rest);
      unsigned e = 0;
      u64 qe = 1;
      while (rest % q == 0) {
        rest /= q;
        qe *= q;
        ++e;
      }
      const auto local = lift_sqrt_mod_prime_power(static_cast<u64>(d), q, e,
                                                   root_mod(q));
      if (local.empty()) {
        roots.clear();
        break;
      }
      roots = crt_combine(roots, modulus, local, qe);
      modulus *= qe;
    }
    if (roots.empty()) continue;

    // Roots mod 4a come in pairs r, r + 2a; b only matters mod 2a.
    const u64 step = 2 * static_cast<u64>(a);
    for (u64& r : roots) r %= step;
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

    for (u64 r : roots) {
      const u64 lo_u = static_cast<u64>(lo);
      u64 b = lo_u + (r + step - lo_u % step) % step;
      for (; b <= static_cast<u64>(s); b += step) {
        const i64 bi = static_cast<i64>(b);
        const i64 c = (bi * bi - d) / (4 * a);
        if (gcd3(a, bi, c) != 1) continue;
        out.push_back({a, bi, c});
        out.push_back({-a, bi, -c});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<QuadForm> reduced_forms_by_divisors(const Discriminant& disc) {
  const i64 d = disc.value();
  const i64 s = disc.isqrt();
  std::vector<QuadForm> out;
  for (i64 b = 1; b <= s; ++b) {
    if (((b * b - d) & 3) != 0) continue;
    const i64 n = (d - b * b) / 4;  // = -ac > 0
    for (i64 a = 1; a * a <= n; ++a) {
      if (n % a != 0) continue;
      for (const i64 abs_a : {a, n / a}) {
        const i64 c = -n / abs_a;
        for (const i64 sign : {1, -1}) {
          const QuadForm f{sign * abs_a, b, sign * c};
          if (f.is_reduced() && f.is_primitive()) out.push_back(f);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

QuadForm reduction_step(const QuadForm& f, const Discriminant& disc) {
  const i64 s = disc.isqrt();
  const i64 two_c = 2 * (f.c < 0 ? -f.c : f.c);
  const i64 shift = ((s + f.b) % two_c + two_c) % two_c;
  const i64 b = s - shift;
  return {f.c, b, (b * b - disc.value()) / (4 * f.c)};
}

NarrowClassNumber class_number_narrow(const Discriminant& disc) {
  const std::vector<QuadForm> forms = reduced_forms(disc);
  std::vector<char> seen(forms.size(), 0);
  auto index_of = [&](const QuadForm& f) {
    const auto it = std::lower_bound(forms.begin(), forms.end(), f);
    if (it == forms.end() || *it != f) {
      throw std::logic_error("reduction step left the set of reduced forms");
    }
    return static_cast<std::size_t>(it - forms.begin());
  };

  NarrowClassNumber result;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (seen[i]) continue;
    ++result.h_plus;
    // Forms are sorted, so the first unseen form is the least in its cycle.
    result.representatives.push_back(forms[i]);
    std::size_t j = i;
    do {
      seen[j] = 1;
      j = index_of(reduction_step(forms[j], disc));
    } while (j != i);
  }
  return result;
}

PellSolution pell_from_known(const Discriminant& disc, u64 t, u64 m) {
  const u128 d = static_cast<u128>(disc.value());
  if (t < 3 || m == 0) {
    throw Error(Errc::invalid_argument, "known solution needs t >= 3, m >= 1");
  }
  const u128 lhs = static_cast<u128>(t) * t - 4;
  if (lhs % d != 0 || lhs / d != static_cast<u128>(m) * m) {
    throw Error(Errc::invalid_argument,
                "(t, m) does not satisfy t^2 - m^2 D = 4");
  }
  for (u64 s = 1; s <= m; ++s) {
    if (m % s != 0) continue;
    if (const auto tau = exact_sqrt(static_cast<u128>(s) * s * d + 4)) {
      return {*tau, s};
    }
  }
  throw std::logic_error("unreachable: s = m always solves");
}

double log_unit(const Discriminant& disc, const PellSolution& pell) {
  const long double root = std::sqrt(static_cast<long double>(disc.value()));
  const long double unit =
      (static_cast<long double>(pell.tau) + pell.s * root) / 2.0L;
  return static_cast<double>(std::log(unit));
}

OrderData order_data(const Discriminant& disc, KnownSolution known,
                     Backend backend, double l_tol) {
  OrderData out{disc, std::nullopt, pell_from_known(disc, known.t, known.m),
                0.0, 0.0, {}};
  out.log_eps = log_unit(disc, out.pell);
  if (backend == Backend::exact) {
    NarrowClassNumber h = class_number_narrow(disc);
    out.h_plus = h.h_plus;
    out.weight = static_cast<double>(h.h_plus) * out.log_eps;
    out.representatives = std::move(h.representatives);
  } else {
    out.weight = std::sqrt(static_cast<double>(disc.value())) *
                 l_value_truncated(disc, l_tol);
  }
  return out;
}

}  // namespace geotrace
