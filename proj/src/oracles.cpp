#include "geotrace/oracles.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace geotrace::oracle {

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;

  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t x, std::size_t y) { parent[find(x)] = find(y); }
};

}  // namespace

u64 equivalence_class_count(const Discriminant& disc, double box_factor) {
  const i64 d = disc.value();
  const i64 b_max = static_cast<i64>(box_factor * std::sqrt(static_cast<double>(d)));

  // (a, b) determines c; enumerate every primitive form in the box.
  std::map<std::pair<i64, i64>, std::size_t> index;
  std::vector<QuadForm> nodes;
  for (i64 b = -b_max; b <= b_max; ++b) {
    const i64 num = b * b - d;  // = 4ac
    if (num % 4 != 0) continue;
    const i64 ac = num / 4;
    const i64 mag = ac < 0 ? -ac : ac;
    for (i64 a = 1; a <= mag; ++a) {
      if (mag % a != 0) continue;
      for (i64 sa : {a, -a}) {
        const QuadForm f{sa, b, ac / sa};
        if (std::gcd(std::gcd(f.a, f.b), f.c) != 1) continue;
        index.emplace(std::pair{f.a, f.b}, nodes.size());
        nodes.push_back(f);
      }
    }
  }

  DisjointSets sets(nodes.size());
  auto link = [&](std::size_t i, const QuadForm& g) {
    if (auto it = index.find({g.a, g.b}); it != index.end()) sets.unite(i, it->second);
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const QuadForm& f = nodes[i];
    link(i, {f.c, -f.b, f.a});
    link(i, {f.a, f.b + 2 * f.a, f.a + f.b + f.c});
    link(i, {f.a, f.b - 2 * f.a, f.a - f.b + f.c});
  }

  std::vector<char> counted(nodes.size(), 0);
  u64 classes = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_reduced()) continue;
    const std::size_t root = sets.find(i);
    if (!counted[root]) {
      counted[root] = 1;
      ++classes;
    }
  }
  return classes;
}

std::optional<PellSolution> pell_by_scan(const Discriminant& disc, u64 s_max) {
  const u128 d = static_cast<u128>(disc.value());
  for (u64 s = 1; s <= s_max; ++s) {
    if (const auto tau = exact_sqrt(static_cast<u128>(s) * s * d + 4)) {
      return PellSolution{*tau, s};
    }
  }
  return std::nullopt;
}

}  // namespace geotrace::oracle
