#include <algorithm>
#include <cmath>
#include <numeric>

#include "dampen/sensitivity.hpp"

namespace dampen {
namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

bool subtracts(const SensitivityFunction& f) { return f.monotonicity != Monotonicity::non_increasing; }

}  // namespace

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return std::nan("");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nan("");
  return sab / std::sqrt(saa * sbb);
}

MonotonicityReport check_monotonicity(const SensitivityFunction& delta, const SelectionProblem& problem,
                                      std::span<const std::size_t> ts) {
  const std::size_t m = problem.size();
  bool flat = true, nondec = true, noninc = true;
  double corr_sum = 0.0;
  std::size_t corr_count = 0;
  for (std::size_t t : ts) {
    std::vector<double> d(m);
    for (std::size_t r = 0; r < m; ++r) d[r] = delta.eval(t, r);
    for (std::size_t i = 0; i < m; ++i) {
      if (d[i] != d[0]) flat = false;
      for (std::size_t j = 0; j < m; ++j) {
        if (problem.utility[i] >= problem.utility[j]) {
          if (d[i] < d[j]) nondec = false;
          if (d[i] > d[j]) noninc = false;
        }
      }
    }
    const double c = spearman_correlation(problem.utility, d);
    if (!std::isnan(c)) {
      corr_sum += c;
      ++corr_count;
    }
  }
  MonotonicityReport rep;
  rep.spearman = corr_count ? corr_sum / static_cast<double>(corr_count) : 0.0;
  if (flat) rep.classification = Monotonicity::flat;
  else if (nondec) rep.classification = Monotonicity::non_decreasing;
  else if (noninc) rep.classification = Monotonicity::non_increasing;
  else rep.classification = Monotonicity::none;
  return rep;
}

std::vector<std::size_t> utility_order(const SelectionProblem& problem) {
  std::vector<std::size_t> order(problem.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return problem.utility[a] > problem.utility[b]; });
  return order;
}

std::vector<std::size_t> default_dominance_ts(const SelectionProblem& problem) {
  std::vector<std::size_t> ts;
  const std::size_t last = std::min<std::size_t>(problem.database_size, 8);
  for (std::size_t t = 0; t <= last; ++t) ts.push_back(t);
  return ts;
}

DominanceReport check_dominance(const SensitivityFunction& a, const SensitivityFunction& b,
                                const SelectionProblem& problem, std::span<const std::size_t> ts,
                                GapOrientation orientation, double tolerance) {
  DominanceReport rep;
  rep.ordered_range = utility_order(problem);
  rep.ts.assign(ts.begin(), ts.end());
  if (orientation == GapOrientation::literal) {
    rep.nonincreasing_required = true;
  } else if (subtracts(a) != subtracts(b)) {
    rep.dominates = false;
    rep.note = "the two functions shift in opposite directions";
  } else {
    rep.nonincreasing_required = !subtracts(a);
  }

  const auto& order = rep.ordered_range;
  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    const std::size_t t = ts[ti];
    std::vector<double> gaps(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) gaps[j] = b.eval(t, order[j]) - a.eval(t, order[j]);
    rep.gaps.push_back(gaps);
    if (!rep.dominates) continue;

    // Candidates with equal utility form one block; the gap order is only
    // constrained between blocks.
    double bound_prev = rep.nonincreasing_required ? INFINITY : -INFINITY;
    std::size_t j = 0;
    while (j < order.size() && rep.dominates) {
      std::size_t k = j;
      while (k + 1 < order.size() && problem.utility[order[k + 1]] == problem.utility[order[j]]) ++k;
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t q = j; q <= k; ++q) {
        if (gaps[q] < -tolerance) {
          rep.dominates = false;
          rep.first_violation = {{t, q}};
          break;
        }
        const bool bad = rep.nonincreasing_required ? gaps[q] > bound_prev + tolerance
                                                    : gaps[q] < bound_prev - tolerance;
        if (bad) {
          rep.dominates = false;
          rep.first_violation = {{t, q}};
          break;
        }
        lo = std::min(lo, gaps[q]);
        hi = std::max(hi, gaps[q]);
      }
      bound_prev = rep.nonincreasing_required ? std::min(bound_prev, lo) : std::max(bound_prev, hi);
      j = k + 1;
    }
  }
  return rep;
}

AccuracyOrderReport accuracy_order_check(const SensitivityFunction& a, const SensitivityFunction& b,
                                         const SelectionProblem& problem, double epsilon,
                                         GapOrientation orientation, double tolerance) {
  auto stable = [](const SensitivityFunction& f) {
    return f.declared_admissible && f.declared_bounded && f.monotonicity != Monotonicity::none;
  };
  if (!stable(a) || !stable(b)) {
    throw ContractViolation("accuracy_order_check: both functions must be admissible, bounded and monotonic");
  }
  const std::size_t horizon = std::min<std::size_t>(problem.database_size, 100000);
  std::vector<std::size_t> ts(horizon);
  std::iota(ts.begin(), ts.end(), std::size_t{0});
  const DominanceReport dom = check_dominance(a, b, problem, ts, orientation);
  if (!dom.dominates) throw ContractViolation("accuracy_order_check: first function does not dominate the second");

  const auto da = shifted_local_dampening_distribution(problem, a, epsilon);
  const auto db = shifted_local_dampening_distribution(problem, b, epsilon);
  AccuracyOrderReport rep;
  rep.error_a = expected_error(da, problem);
  rep.error_b = expected_error(db, problem);
  const double best = problem.max_utility();
  for (double u : problem.utility) rep.thetas.push_back(best - u);
  std::sort(rep.thetas.begin(), rep.thetas.end());
  rep.thetas.erase(std::unique(rep.thetas.begin(), rep.thetas.end()), rep.thetas.end());
  rep.pass = rep.error_a <= rep.error_b + tolerance;
  for (double th : rep.thetas) {
    rep.tail_a.push_back(error_tail(da, problem, th));
    rep.tail_b.push_back(error_tail(db, problem, th));
    if (rep.tail_a.back() > rep.tail_b.back() + tolerance) rep.pass = false;
  }
  return rep;
}

}  // namespace dampen
