// Exact element local sensitivity at distance t for percentile selection.
//
// LS(y, 0, r) depends only on the value w held by r and on the four order
// statistics of the other records at positions k-2..k+1 (the window). The
// search enumerates windows reachable from x together with the number of
// edits they cost, then either keeps r at its value or moves it (one more
// edit) to a critical point.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "dampen/percentile.hpp"

namespace dampen {
namespace {

struct Ctx {
  std::vector<double> others;  // sorted, record r removed
  std::size_t n = 0;           // size including r
  std::size_t k = 0;
  double lam = 0.0;
  std::vector<long> pos;       // window positions present among the others
};

// o[p - (k - 2)] holds the other-record statistic at position p, with pads.
using Window = std::array<double, 4>;

double local_ls0(double w, const Window& o, const Ctx& c) {
  const long k = static_cast<long>(c.k);
  auto at = [&](long p) { return o[static_cast<std::size_t>(p - (k - 2))]; };
  if (k - 1 >= 1 && w <= at(k - 1)) {
    const double ykm = std::max(w, at(k - 2)), yk = at(k - 1), ykp = at(k);
    return std::max({yk - w, ykp - yk, yk - ykm, std::fabs(yk + ykp - w - c.lam), w});
  }
  if (w <= at(k)) {
    const double ykm = at(k - 1), ykp = at(k);
    double m = 0.0;
    if (k >= 2) m = std::max(m, ykp - w);
    if (static_cast<std::size_t>(k) + 1 <= c.n) m = std::max(m, w - ykm);
    return std::max({m, c.lam - ykp, ykm});
  }
  const double ykm = at(k - 1), yk = at(k), ykp = std::min(w, at(k + 1));
  return std::max({w - yk, ykp - yk, yk - ykm, c.lam - w, std::fabs(w - yk - ykm)});
}

Window window_of(const Ctx& c, const double* vals) {
  Window o{};
  const long k = static_cast<long>(c.k);
  const long big_n = static_cast<long>(c.others.size());
  for (long p = k - 2; p <= k + 1; ++p) {
    double v;
    if (p <= 0) v = 0.0;
    else if (p >= big_n + 1) v = c.lam;
    else v = vals[p - c.pos.front()];
    o[static_cast<std::size_t>(p - (k - 2))] = v;
  }
  return o;
}

// A window slot filled either by an unmoved record (index into others) or by
// an edited value.
struct Slot {
  bool original = false;
  long index = -1;
  double value = 0.0;
  bool operator==(const Slot& s) const {
    return original == s.original && (original ? index == s.index : value == s.value);
  }
};

}  // namespace

std::vector<double> ls_profile_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t record) {
  if (record >= x.size()) throw InvalidInput("ls_profile_percentile: record out of range");
  Ctx c;
  c.n = x.size();
  c.k = q.k(c.n);
  c.lam = x.lambda();
  for (std::size_t rank = 1; rank <= c.n; ++rank) {
    if (x.record_at_rank(rank) != record) c.others.push_back(x.at_rank(rank));
  }
  const double v = x.records()[record].value;
  const long big_n = static_cast<long>(c.others.size());
  for (long p = static_cast<long>(c.k) - 2; p <= static_cast<long>(c.k) + 1; ++p) {
    if (p >= 1 && p <= big_n) c.pos.push_back(p);
  }
  const std::size_t width = c.pos.size();

  std::vector<double> prof(c.n + 1, 0.0);
  auto finish = [&] {
    for (std::size_t t = 1; t < prof.size(); ++t) prof[t] = std::max(prof[t], prof[t - 1]);
    return prof;
  };

  if (width == 0) {
    const Window o = window_of(c, nullptr);
    prof[0] = local_ls0(v, o, c);
    for (double w : {0.0, c.lam, v}) prof[1] = std::max(prof[1], local_ls0(w, o, c));
    return finish();
  }

  const auto& others = c.others;
  auto val = [&](const Slot& s) { return s.original ? others[static_cast<std::size_t>(s.index)] : s.value; };
  auto upper = [&](double a) { return static_cast<long>(std::upper_bound(others.begin(), others.end(), a) - others.begin()); };
  auto lower = [&](double a) { return static_cast<long>(std::lower_bound(others.begin(), others.end(), a) - others.begin()); };
  const long pf = c.pos.front(), pl = c.pos.back();

  auto cost_of = [&](const std::vector<Slot>& combo, const double* vals) {
    long first_idx = -1, last_idx = -1, used = 0;
    for (const Slot& s : combo) {
      if (!s.original) continue;
      if (first_idx < 0) first_idx = s.index;
      last_idx = s.index;
      ++used;
    }
    const double v0 = vals[0], v1 = vals[combo.size() - 1];
    long kept;
    if (used > 0) {
      const long below = std::min(first_idx, upper(v0));
      const long above = big_n - std::max(last_idx + 1, lower(v1));
      kept = std::min(below, pf - 1) + used + std::min(above, big_n - pl);
    } else {
      const long p_count = upper(v0), s_count = big_n - lower(v1);
      const long both = std::max(0L, upper(v0) - lower(v1));
      kept = std::min(std::min(p_count, pf - 1) + std::min(s_count, big_n - pl), p_count + s_count - both);
    }
    return big_n - kept;
  };

  std::vector<Slot> ends;
  for (long j = 0; j < big_n; ++j) ends.push_back({true, j, 0.0});
  for (double z : {0.0, c.lam, v}) ends.push_back({false, -1, z});

  const long jv = upper(v);
  std::vector<Slot> inner, combo(width);
  std::array<double, 4> vals{};

  auto consider = [&] {
    for (std::size_t s = 0; s < width; ++s) vals[s] = val(combo[s]);
    for (std::size_t s = 0; s + 1 < width; ++s) {
      if (vals[s] > vals[s + 1]) return;
    }
    long prev = -1;
    for (const Slot& s : combo) {
      if (!s.original) continue;
      if (s.index <= prev) return;
      prev = s.index;
    }
    const long cost = cost_of(combo, vals.data());
    const Window o = window_of(c, vals.data());
    if (cost <= big_n) {
      auto& slot = prof[static_cast<std::size_t>(cost)];
      slot = std::max(slot, local_ls0(v, o, c));
    }
    if (static_cast<std::size_t>(cost) + 1 <= c.n) {
      auto& slot = prof[static_cast<std::size_t>(cost) + 1];
      slot = std::max({slot, local_ls0(0.0, o, c), local_ls0(c.lam, o, c)});
      for (std::size_t s = 0; s < width; ++s) slot = std::max(slot, local_ls0(vals[s], o, c));
    }
  };

  for (const Slot& first : ends) {
    for (const Slot& last : ends) {
      const double a = val(first), d = val(last);
      if (a > d) continue;
      if (width == 1 && !(first == last)) continue;
      if (first.original && last.original && first.index > last.index) continue;
      if (width >= 2 && first == last && first.original) continue;

      const long lo = first.original ? first.index + 1 : 0;
      const long hi = last.original ? last.index - 1 : big_n - 1;
      inner.clear();
      auto add = [&](const Slot& s) {
        if (std::find(inner.begin(), inner.end(), s) == inner.end()) inner.push_back(s);
      };
      for (long j : {lo, hi, jv - 1, jv, jv - 2, jv + 1}) {
        if (j >= lo && j <= hi && j >= 0 && j < big_n && a <= others[j] && others[j] <= d) add({true, j, 0.0});
      }
      for (double z : {a, d, v}) {
        if (a <= z && z <= d) add({false, -1, z});
      }

      combo[0] = first;
      combo[width - 1] = last;
      if (width <= 2) {
        consider();
      } else if (width == 3) {
        for (const Slot& m : inner) {
          combo[1] = m;
          consider();
        }
      } else {
        for (const Slot& m1 : inner) {
          for (const Slot& m2 : inner) {
            combo[1] = m1;
            combo[2] = m2;
            consider();
          }
        }
      }
    }
  }
  return finish();
}

}  // namespace dampen
