#include "geotrace/sl2fp.hpp"

#include <algorithm>
#include <stdexcept>

#include "geotrace/error.hpp"

namespace geotrace {

namespace {

u32 reduce(i64 v, u32 p) {
  const i64 r = v % static_cast<i64>(p);
  return static_cast<u32>(r < 0 ? r + p : r);
}

void require_prime(u32 p) {
  if (!is_prime(p)) {
    throw Error(Errc::invalid_argument, std::to_string(p) + " is not prime");
  }
}

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

MatModP MatModP::from_integers(i64 a, i64 b, i64 c, i64 d, u32 p) {
  return {{reduce(a, p), reduce(b, p), reduce(c, p), reduce(d, p)}, p};
}

u32 MatModP::det() const noexcept {
  const u64 ad = static_cast<u64>(e[0]) * e[3] % p;
  const u64 bc = static_cast<u64>(e[1]) * e[2] % p;
  return static_cast<u32>((ad + p - bc) % p);
}

MatModP MatModP::inverse() const {
  return {{e[3], (p - e[1]) % p, (p - e[2]) % p, e[0]}, p};
}

MatModP operator*(const MatModP& x, const MatModP& y) {
  const u64 p = x.p;
  auto dot = [p](u64 a, u64 b, u64 c, u64 d) {
    return static_cast<u32>((a * b + c * d) % p);
  };
  return {{dot(x.e[0], y.e[0], x.e[1], y.e[2]),
           dot(x.e[0], y.e[1], x.e[1], y.e[3]),
           dot(x.e[2], y.e[0], x.e[3], y.e[2]),
           dot(x.e[2], y.e[1], x.e[3], y.e[3])},
          x.p};
}

ClassKind negate(const ClassKind& kind, u32 p) {
  if (p == 2) return kind;
  return std::visit(
      overloaded{
          [p](const SplitSemisimple& k) -> ClassKind {
            const u32 neg = p - k.mu;
            const u32 neg_inv = static_cast<u32>(invmod(neg, p));
            return SplitSemisimple{std::min(neg, neg_inv)};
          },
          [p](const NonsplitSemisimple& k) -> ClassKind {
            return NonsplitSemisimple{(p - k.trace) % p};
          },
          [](const Central& k) -> ClassKind { return Central{-k.sign}; },
          [](const Unipotent& k) -> ClassKind {
            return Unipotent{-k.sign, k.alpha_square};
          },
      },
      kind);
}

std::string row_name(const ClassKind& kind) {
  return std::visit(overloaded{
                        [](const SplitSemisimple&) { return "split"; },
                        [](const NonsplitSemisimple&) { return "nonsplit"; },
                        [](const Central&) { return "central"; },
                        [](const Unipotent&) { return "unipotent"; },
                    },
                    kind);
}

std::string describe(const ClassKind& kind) {
  auto sign = [](int s) { return s > 0 ? std::string("+") : std::string("-"); };
  return std::visit(
      overloaded{
          [](const SplitSemisimple& k) {
            return "split(mu=" + std::to_string(k.mu) + ")";
          },
          [](const NonsplitSemisimple& k) {
            return "nonsplit(a=" + std::to_string(k.trace) + ")";
          },
          [&](const Central& k) { return "central(" + sign(k.sign) + ")"; },
          [&](const Unipotent& k) {
            return "unipotent(" + sign(k.sign) + "," +
                   (k.alpha_square ? "square" : "nonsquare") + ")";
          },
      },
      kind);
}

u64 sl2_order(u32 p) {
  const u64 q = p;
  return q * (q * q - 1);
}

ConjClassDescriptor classify(const MatModP& a) {
  const u32 p = a.p;
  if (a.det() != 1 % p) {
    throw Error(Errc::not_in_sl2, "matrix determinant is not 1 mod p");
  }
  const u32 tr = a.trace();
  const i64 disc = (static_cast<i64>(tr) * tr + p * 4 - 4) % p;
  const int leg = kronecker(disc, p);
  const u64 order = sl2_order(p);

  if (p == 2) {
    if (a == MatModP::identity(2)) return {Central{1}, 0, 1, 6, 0};
    if (tr == 0) return {Unipotent{1, true}, 0, 3, 2, 0};
    return {NonsplitSemisimple{1}, 1, 2, 3, -1};
  }

  const u64 q = p;
  if (leg == 1) {
    const u64 root = *sqrt_mod_prime(static_cast<u64>(disc), p);
    const u64 half = (q + 1) / 2;
    const u64 mu1 = (tr + root) % q * half % q;
    const u64 mu2 = (tr + q - root) % q * half % q;
    return {SplitSemisimple{static_cast<u32>(std::min(mu1, mu2))}, tr,
            q * (q + 1), q - 1, 1};
  }
  if (leg == -1) {
    return {NonsplitSemisimple{tr}, tr, q * (q - 1), q + 1, -1};
  }

  const int sign = tr == 2 ? 1 : -1;
  const u32 s = sign > 0 ? 1 : p - 1;
  if (a == MatModP::from_integers(s, 0, 0, s, p)) {
    return {Central{sign}, tr, 1, order, 0};
  }
  // N = sign*A - I is nilpotent; conjugating [[0, alpha], [0, 0]] by
  // [[x, y], [z, w]] gives alpha * [[-xz, x^2], [-z^2, xz]].
  const u64 n12 = static_cast<u64>(s) * a.e[1] % q;
  const u64 n21 = static_cast<u64>(s) * a.e[2] % q;
  const u64 alpha = n12 != 0 ? n12 : (q - n21) % q;
  const bool square = kronecker(static_cast<i64>(alpha), p) == 1;
  return {Unipotent{sign, square}, tr, (q * q - 1) / 2, 2 * q, 0};
}

std::vector<ConjClassDescriptor> class_table(u32 p) {
  require_prime(p);
  if (p == 2) {
    return {{Central{1}, 0, 1, 6, 0},
            {Unipotent{1, true}, 0, 3, 2, 0},
            {NonsplitSemisimple{1}, 1, 2, 3, -1}};
  }
  const u64 q = p;
  const u64 order = sl2_order(p);
  std::vector<ConjClassDescriptor> table;
  for (u64 mu = 2; mu + 2 <= q; ++mu) {
    const u64 inv = invmod(mu, q);
    if (mu < inv) {
      table.push_back({SplitSemisimple{static_cast<u32>(mu)},
                       static_cast<u32>((mu + inv) % q), q * (q + 1), q - 1,
                       1});
    }
  }
  for (u32 a = 0; a < p; ++a) {
    const i64 disc = (static_cast<i64>(a) * a + 4 * q - 4) % p;
    if (kronecker(disc, p) == -1) {
      table.push_back({NonsplitSemisimple{a}, a, q * (q - 1), q + 1, -1});
    }
  }
  table.push_back({Central{1}, 2, 1, order, 0});
  table.push_back({Central{-1}, p - 2, 1, order, 0});
  for (int sign : {1, -1}) {
    const u32 tr = sign > 0 ? 2 : p - 2;
    for (bool sq : {true, false}) {
      table.push_back({Unipotent{sign, sq}, tr, (q * q - 1) / 2, 2 * q, 0});
    }
  }
  return table;
}

std::size_t class_index(const std::vector<ConjClassDescriptor>& table,
                        const ClassKind& kind) {
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].kind == kind) return i;
  }
  throw std::out_of_range("class kind not present in table: " +
                          describe(kind));
}

std::vector<Orbit> brute_force_classes(u32 p, u64 cap) {
  require_prime(p);
  const u64 order = sl2_order(p);
  if (order > cap) {
    throw Error(Errc::instance_too_large,
                "|SL2(F_" + std::to_string(p) + ")| = " +
                    std::to_string(order) + " exceeds cap " +
                    std::to_string(cap));
  }
  const u64 q = p;
  auto encode = [q](const MatModP& m) {
    return ((m.e[0] * q + m.e[1]) * q + m.e[2]) * q + m.e[3];
  };

  std::vector<MatModP> elements;
  elements.reserve(order);
  for (u32 a = 0; a < p; ++a)
    for (u32 b = 0; b < p; ++b)
      for (u32 c = 0; c < p; ++c)
        for (u32 d = 0; d < p; ++d) {
          MatModP m{{a, b, c, d}, p};
          if (m.det() == 1 % p) elements.push_back(m);
        }

  const MatModP s = MatModP::from_integers(0, -1, 1, 0, p);
  const MatModP t = MatModP::from_integers(1, 1, 0, 1, p);
  const std::array<std::pair<MatModP, MatModP>, 2> gens{
      std::pair{s, s.inverse()}, std::pair{t, t.inverse()}};

  std::vector<char> seen(q * q * q * q, 0);
  std::vector<Orbit> orbits;
  std::vector<MatModP> frontier;
  for (const MatModP& start : elements) {
    if (seen[encode(start)]) continue;
    seen[encode(start)] = 1;
    frontier.assign(1, start);
    u64 size = 0;
    while (!frontier.empty()) {
      const MatModP m = frontier.back();
      frontier.pop_back();
      ++size;
      for (const auto& [g, g_inv] : gens) {
        const MatModP c = g * m * g_inv;
        if (!seen[encode(c)]) {
          seen[encode(c)] = 1;
          frontier.push_back(c);
        }
      }
    }
    u64 cent = 0;
    for (const MatModP& g : elements) {
      if (g * start == start * g) ++cent;
    }
    orbits.push_back({start, start.trace(), size, cent});
  }
  return orbits;
}

ClassMass trace_mass(u32 p, u32 a) {
  if (a >= p) throw Error(Errc::invalid_argument, "residue out of range");
  Rational mass;
  for (const auto& cls : class_table(p)) {
    if (cls.trace == a) {
      mass += Rational(2, static_cast<std::int64_t>(cls.centralizer_order));
    }
  }
  return {p, a, mass};
}

Rational predicted_density(u32 p, u32 a) {
  require_prime(p);
  if (a >= p) throw Error(Errc::invalid_argument, "residue out of range");
  if (p == 2) return a == 0 ? Rational(2, 3) : Rational(1, 3);
  const i64 q = p;
  const i64 disc = (static_cast<i64>(a) * a + 4 * q - 4) % q;
  switch (kronecker(disc, q)) {
    case 1: return Rational(1, q - 1);
    case -1: return Rational(1, q + 1);
    default: return Rational(q, q * q - 1);
  }
}

}  // namespace geotrace
