#include "geotrace/census.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "geotrace/error.hpp"
#include "geotrace/summation.hpp"

namespace geotrace {

namespace {

// Runs body(lo, hi) over [begin, end) split into fixed-size chunks. Chunk
// boundaries depend only on `chunk`, never on the thread count.
template <class Body>
void for_each_chunk(u64 begin, u64 end, std::size_t chunk, unsigned threads,
                    Body&& body) {
  if (begin >= end) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const u64 chunks = (end - begin + chunk - 1) / chunk;
  std::atomic<u64> next{0};
  auto worker = [&] {
    for (u64 c = next++; c < chunks; c = next++) {
      const u64 lo = begin + c * chunk;
      body(lo, std::min<u64>(end, lo + chunk));
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || chunks == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned i = 0; i < std::min<u64>(threads, chunks); ++i) {
    pool.emplace_back([&] {
      try {
        worker();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = chunks;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> prepare_checkpoints(double x_max,
                                        std::vector<double> checkpoints) {
  if (checkpoints.empty()) checkpoints.push_back(x_max);
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const double x = checkpoints[i];
    if (!(x > 0.0) || x > x_max || (i > 0 && x < checkpoints[i - 1])) {
      throw Error(Errc::invalid_argument,
                  "checkpoints must be positive, ascending and <= x_max");
    }
  }
  return checkpoints;
}

std::vector<u64> checkpoint_traces(const std::vector<double>& checkpoints,
                                   Normalization norm) {
  std::vector<u64> out;
  out.reserve(checkpoints.size());
  for (double x : checkpoints) out.push_back(trace_bound(x, norm));
  return out;
}

SpfTable census_sieve(u64 t_max) { return SpfTable(std::max<u64>(t_max + 2, 16)); }

}  // namespace

u64 trace_bound(double x, Normalization norm) {
  if (!(x > 0.0)) return 0;
  const long double u = norm == Normalization::geodesic
                            ? std::sqrt(static_cast<long double>(x))
                            : static_cast<long double>(x);
  // t <= u + 1/u  <=>  t*u <= u^2 + 1 for u > 0.
  const long double rhs = u * u + 1.0L;
  u64 t = static_cast<u64>(std::floor(u + 1.0L / u));
  while (t > 0 && static_cast<long double>(t) * u > rhs) --t;
  while (static_cast<long double>(t + 1) * u <= rhs) ++t;
  return t;
}

double weight_scale(Normalization norm) noexcept {
  return norm == Normalization::geodesic ? 2.0 : 1.0;
}

TraceDecomposition trace_decomposition(u64 t, const SpfTable& table) {
  if (t < 3) throw Error(Errc::invalid_argument, "trace must be at least 3");
  if (t + 2 > table.limit()) {
    throw Error(Errc::unsupported_input,
                "sieve limit " + std::to_string(table.limit()) +
                    " too small for trace " + std::to_string(t));
  }
  const Factorization f = multiply(factorize(t - 2, table), factorize(t + 2, table));
  const u64 n = t * t - 4;

  // Enumerate m over divisors with exponents up to floor(e/2).
  std::vector<u64> ms{1};
  for (const auto& [q, e] : f) {
    const std::size_t base = ms.size();
    u64 qk = 1;
    for (unsigned k = 1; k <= e / 2; ++k) {
      qk *= q;
      for (std::size_t i = 0; i < base; ++i) ms.push_back(ms[i] * qk);
    }
  }
  std::sort(ms.begin(), ms.end());

  TraceDecomposition out{t, {}};
  for (u64 m : ms) {
    const u64 d = n / (m * m);
    if ((d & 3) == 0 || (d & 3) == 1) {
      out.parts.push_back({m, Discriminant(static_cast<i64>(d))});
    }
  }
  return out;
}

std::shared_ptr<const OrderData> OrderCache::get(const Discriminant& disc,
                                                 KnownSolution known) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(disc.value()); it != entries_.end()) {
      return it->second;
    }
  }
  const bool analytic = options_.backend == Backend::analytic &&
                        disc.value() >= options_.delta_switch;
  auto data = std::make_shared<const OrderData>(order_data(
      disc, known, analytic ? Backend::analytic : Backend::exact,
      options_.l_tol));
  std::unique_lock lock(mutex_);
  // A racing insert computed the same value; keep whichever landed first.
  return entries_.try_emplace(disc.value(), std::move(data)).first->second;
}

std::size_t OrderCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

double CensusLine::total() const noexcept {
  double sum = 0.0;
  for (const auto& part : parts) sum += part.order->weight;
  return sum;
}

CensusLine census_line(u64 t, const SpfTable& table, OrderCache& cache) {
  const TraceDecomposition dec = trace_decomposition(t, table);
  CensusLine line{t, {}};
  line.parts.reserve(dec.parts.size());
  for (const auto& part : dec.parts) {
    line.parts.push_back({part.m, cache.get(part.disc, {t, part.m})});
  }
  return line;
}

double CensusSeries::psi(std::size_t i) const {
  double sum = 0.0;
  for (double v : psi_a.at(i)) sum += v;
  return sum;
}

double CensusSeries::psi_pm(std::size_t i, u32 a) const {
  const auto& row = psi_a.at(i);
  return (row.at(a) + row.at((p - a % p) % p)) / 2.0;
}

double ClassResolvedSeries::marginal(std::size_t i, u32 a) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (classes[k].trace == a) sum += accumulators.at(i)[k];
  }
  return sum;
}

std::vector<double> geometric_checkpoints(double lo, double hi,
                                          std::size_t count) {
  if (count < 2 || !(hi > lo) || !(lo > 0.0)) return {hi};
  std::vector<double> out(count);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo * std::exp(ratio * static_cast<double>(i) /
                           static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> line_totals(u64 t_max, const CensusOptions& options) {
  std::vector<double> totals(t_max + 1, 0.0);
  if (t_max < 3) return totals;
  const SpfTable table = census_sieve(t_max);
  OrderCache cache(options);
  for_each_chunk(3, t_max + 1, options.chunk, options.threads,
                 [&](u64 lo, u64 hi) {
                   for (u64 t = lo; t < hi; ++t) {
                     totals[t] = census_line(t, table, cache).total();
                   }
                 });
  return totals;
}

CensusSeries accumulate_series(std::span<const double> totals, u32 p,
                               std::vector<double> checkpoints,
                               Normalization norm) {
  if (!is_prime(p)) {
    throw Error(Errc::invalid_argument, std::to_string(p) + " is not prime");
  }
  const std::vector<u64> bounds = checkpoint_traces(checkpoints, norm);
  const double scale = weight_scale(norm);
  CensusSeries series{p, norm, std::move(checkpoints), {}};
  std::vector<NeumaierSum> sums(p);
  u64 t = 3;
  for (u64 bound : bounds) {
    if (bound >= totals.size() && bound >= 3) {
      throw Error(Errc::invalid_argument, "line totals do not reach checkpoint");
    }
    for (; t <= bound; ++t) sums[t % p].add(totals[t]);
    std::vector<double> row(p);
    for (u32 a = 0; a < p; ++a) row[a] = scale * sums[a].value();
    series.psi_a.push_back(std::move(row));
  }
  return series;
}

CensusSeries run_census(double x_max, u32 p, std::vector<double> checkpoints,
                        const CensusOptions& options) {
  checkpoints = prepare_checkpoints(x_max, std::move(checkpoints));
  const u64 t_max = trace_bound(x_max, options.normalization);
  const std::vector<double> totals = line_totals(t_max, options);
  return accumulate_series(totals, p, std::move(checkpoints),
                           options.normalization);
}

ClassResolvedSeries run_census_by_class(double x_max, u32 p,
                                        std::vector<double> checkpoints,
                                        const CensusOptions& options) {
  if (options.backend != Backend::exact) {
    throw Error(Errc::invalid_argument,
                "class-resolved census needs the exact backend");
  }
  checkpoints = prepare_checkpoints(x_max, std::move(checkpoints));
  ClassResolvedSeries series{p, options.normalization, checkpoints,
                             class_table(p), {}};
  const u64 t_max = trace_bound(x_max, options.normalization);
  const std::size_t n_classes = series.classes.size();

  // Per-line contributions (class index, log eps+) in a fixed order.
  std::vector<std::vector<std::pair<std::size_t, double>>> contributions(
      t_max + 1);
  if (t_max >= 3) {
    const SpfTable table = census_sieve(t_max);
    OrderCache cache(options);
    for_each_chunk(3, t_max + 1, options.chunk, options.threads,
                   [&](u64 lo, u64 hi) {
      for (u64 t = lo; t < hi; ++t) {
        const CensusLine line = census_line(t, table, cache);
        const i64 ti = static_cast<i64>(t);
        for (const auto& part : line.parts) {
          for (const QuadForm& rep : part.order->representatives) {
            const QuadForm f = rep.scaled(static_cast<i64>(part.m));
            if (((ti - f.b) & 1) != 0) {
              throw std::logic_error("trace and middle coefficient parity differ");
            }
            const MatModP mat = MatModP::from_integers(
                (ti - f.b) / 2, -f.c, f.a, (ti + f.b) / 2, p);
            const std::size_t k =
                class_index(series.classes, classify(mat).kind);
            contributions[t].emplace_back(k, part.order->log_eps);
          }
        }
      }
    });
  }

  const double scale = weight_scale(options.normalization);
  std::vector<NeumaierSum> sums(n_classes);
  u64 t = 3;
  for (u64 bound : checkpoint_traces(series.checkpoints, options.normalization)) {
    for (; t <= bound; ++t) {
      for (const auto& [k, w] : contributions[t]) sums[k].add(w);
    }
    std::vector<double> row(n_classes);
    for (std::size_t k = 0; k < n_classes; ++k) row[k] = scale * sums[k].value();
    series.accumulators.push_back(std::move(row));
  }
  return series;
}

CensusSeries unit_power_oracle(double x_max, u32 p, i64 delta_bound,
                               std::vector<double> checkpoints,
                               Normalization norm) {
  checkpoints = prepare_checkpoints(x_max, std::move(checkpoints));
  const u64 t_max = trace_bound(x_max, norm);
  if (t_max >= 3 && static_cast<u128>(delta_bound) + 4 <
                        static_cast<u128>(t_max) * t_max) {
    throw Error(Errc::invalid_argument,
                "delta_bound must be at least T(x)^2 - 4");
  }

  struct Contribution {
    u64 t;
    i64 disc;
    double weight;
  };
  std::vector<Contribution> found;
  const u128 t_sq = static_cast<u128>(t_max) * t_max;
  for (i64 d = 5; t_max >= 3 && d <= delta_bound; ++d) {
    if (!Discriminant::is_valid(d)) continue;
    // Smallest s with 4 + s^2 D square, among those with tau <= T.
    std::optional<PellSolution> fundamental;
    for (u64 s = 1;; ++s) {
      const u128 q = static_cast<u128>(s) * s * static_cast<u128>(d) + 4;
      if (q > t_sq) break;
      if (const auto tau = exact_sqrt(q)) {
        fundamental = PellSolution{*tau, s};
        break;
      }
    }
    if (!fundamental) continue;
    const Discriminant disc(d);
    const double weight =
        static_cast<double>(class_number_narrow(disc).h_plus) *
        log_unit(disc, *fundamental);
    u128 prev = 2;
    u128 cur = fundamental->tau;
    while (cur <= t_max) {
      found.push_back({static_cast<u64>(cur), d, weight});
      const u128 next = static_cast<u128>(fundamental->tau) * cur - prev;
      prev = cur;
      cur = next;
    }
  }
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    return x.t != y.t ? x.t < y.t : x.disc < y.disc;
  });

  const double scale = weight_scale(norm);
  CensusSeries series{p, norm, checkpoints, {}};
  std::vector<NeumaierSum> sums(p);
  std::size_t idx = 0;
  for (u64 bound : checkpoint_traces(checkpoints, norm)) {
    for (; idx < found.size() && found[idx].t <= bound; ++idx) {
      sums[found[idx].t % p].add(found[idx].weight);
    }
    std::vector<double> row(p);
    for (u32 a = 0; a < p; ++a) row[a] = scale * sums[a].value();
    series.psi_a.push_back(std::move(row));
  }
  return series;
}

}  // namespace geotrace
