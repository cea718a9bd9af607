#pragma once

// Conjugacy classes of SL2(F_p): closed-form table, classification of single
// elements, an exhaustive orbit oracle, class masses 2/|cent(A)| and the
// predicted trace densities derived from them.

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "geotrace/numtheory.hpp"
#include "geotrace/rational.hpp"

namespace geotrace {

// [[e[0], e[1]], [e[2], e[3]]] with entries reduced into [0, p).
struct MatModP {
  std::array<u32, 4> e{};
  u32 p = 2;

  static MatModP from_integers(i64 a, i64 b, i64 c, i64 d, u32 p);
  static MatModP identity(u32 p) { return {{1 % p, 0, 0, 1 % p}, p}; }

  u32 trace() const noexcept { return (e[0] + e[3]) % p; }
  u32 det() const noexcept;
  MatModP inverse() const;  // requires det() == 1

  friend MatModP operator*(const MatModP& x, const MatModP& y);
  friend bool operator==(const MatModP&, const MatModP&) = default;
};

// Eigenvalues mu, 1/mu in F_p; mu is the smaller residue of the pair.
struct SplitSemisimple {
  u32 mu;
  friend bool operator==(const SplitSemisimple&, const SplitSemisimple&) = default;
};
// Eigenvalues in F_{p^2} \ F_p; the trace determines the class.
struct NonsplitSemisimple {
  u32 trace;
  friend bool operator==(const NonsplitSemisimple&, const NonsplitSemisimple&) = default;
};
// +I or -I.
struct Central {
  int sign;
  friend bool operator==(const Central&, const Central&) = default;
};
// Conjugate to sign * [[1, alpha], [0, 1]], alpha != 0, up to squares.
struct Unipotent {
  int sign;
  bool alpha_square;
  friend bool operator==(const Unipotent&, const Unipotent&) = default;
};

using ClassKind =
    std::variant<SplitSemisimple, NonsplitSemisimple, Central, Unipotent>;

struct ConjClassDescriptor {
  ClassKind kind;
  u32 trace = 0;
  u64 size = 0;
  u64 centralizer_order = 0;
  int legendre_case = 0;  // kronecker(trace^2 - 4, p)

  friend bool operator==(const ConjClassDescriptor&,
                         const ConjClassDescriptor&) = default;
};

// Kind of the class of -A given the kind of the class of A.
ClassKind negate(const ClassKind& kind, u32 p);

// "split", "nonsplit", "central" or "unipotent".
std::string row_name(const ClassKind& kind);
// Short label such as "split(mu=2)" or "unipotent(-,nonsquare)".
std::string describe(const ClassKind& kind);

// p (p^2 - 1)
u64 sl2_order(u32 p);

// Throws Errc::not_in_sl2 unless det A == 1.
ConjClassDescriptor classify(const MatModP& a);

// p >= 3: (p-3)/2 split, (p-1)/2 nonsplit, 2 central, 4 unipotent classes.
// p == 2: identity, the three involutions, the two elements of order 3.
// Throws Errc::invalid_argument if p is not prime.
std::vector<ConjClassDescriptor> class_table(u32 p);

// Position of the class with the given kind in `table`; throws
// std::out_of_range when absent.
std::size_t class_index(const std::vector<ConjClassDescriptor>& table,
                        const ClassKind& kind);

struct Orbit {
  MatModP representative;  // least element of the orbit in row-major order
  u32 trace = 0;
  u64 size = 0;
  u64 centralizer_order = 0;  // counted directly, not via orbit-stabilizer
};

inline constexpr u64 kBruteForceCap = 1'000'000;

// Exhaustive partition of SL2(F_p) into conjugacy orbits, ordered by
// representative. Throws Errc::instance_too_large when |SL2(F_p)| > cap.
std::vector<Orbit> brute_force_classes(u32 p, u64 cap = kBruteForceCap);

struct ClassMass {
  u32 p = 0;
  u32 a = 0;
  Rational mass;
};

// Sum of 2/|cent(A)| over the classes of trace a.
ClassMass trace_mass(u32 p, u32 a);

// 1/(p-1), 1/(p+1), p/(p^2-1) by kronecker(a^2 - 4, p) = 1, -1, 0;
// for p = 2: 2/3 at a = 0, 1/3 at a = 1.
Rational predicted_density(u32 p, u32 a);

}  // namespace geotrace
