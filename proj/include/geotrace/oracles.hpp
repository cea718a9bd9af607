#pragma once

// Brute-force references used by the test suites and `geotrace verify`.
// Nothing here shares code paths with the implementations it checks.

#include <optional>

#include "geotrace/numtheory.hpp"
#include "geotrace/quadforms.hpp"

namespace geotrace::oracle {

// Number of SL2(Z)-classes of primitive forms of discriminant D, found as
// connected components of the finite graph of primitive forms with
// |b| <= box_factor * sqrt(D) under S: (a,b,c) -> (c,-b,a) and
// T^{+-1}: (a,b,c) -> (a, b +- 2a, a +- b + c). Only components that contain
// a reduced form are counted.
u64 equivalence_class_count(const Discriminant& disc, double box_factor = 2.0);

// Minimal tau^2 - D s^2 = 4 by scanning s = 1..s_max.
std::optional<PellSolution> pell_by_scan(const Discriminant& disc, u64 s_max);

}  // namespace geotrace::oracle
