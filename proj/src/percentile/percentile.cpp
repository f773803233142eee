#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <memory>
#include <set>
#include <string>
#include <unordered_set>

#include "dampen/error.hpp"
#include "dampen/parallel.hpp"
#include "dampen/percentile.hpp"

namespace dampen {
namespace {

void check_rank(const NumericVector& x, std::size_t i) {
  if (i < 1 || i > x.size()) throw InvalidInput("percentile: rank index out of range");
}

std::string hex_key(const std::vector<double>& v) {
  std::string out;
  char buf[40];
  for (double d : v) {
    std::snprintf(buf, sizeof buf, "%a;", d);
    out += buf;
  }
  return out;
}

double kth_of(std::vector<double> values, std::size_t k) {
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
  return values[k - 1];
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

NumericVector::NumericVector(std::vector<LabeledValue> records, double lambda)
    : records_(std::move(records)), lambda_(lambda) {
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw InvalidInput("NumericVector: lambda must be positive");
  std::unordered_set<std::string> labels;
  for (const auto& r : records_) {
    if (!std::isfinite(r.value) || r.value < 0.0 || r.value > lambda_) {
      throw InvalidInput("NumericVector: value " + std::to_string(r.value) + " of '" + r.label +
                         "' outside [0, lambda]");
    }
    if (!labels.insert(r.label).second) throw InvalidInput("NumericVector: duplicate label '" + r.label + "'");
  }
  resort();
}

NumericVector NumericVector::from_values(const std::vector<double>& values, double lambda) {
  const std::size_t width = std::to_string(values.empty() ? 0 : values.size() - 1).size();
  std::vector<LabeledValue> recs;
  recs.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::string digits = std::to_string(i);
    recs.push_back({"x" + std::string(width - digits.size(), '0') + digits, values[i]});
  }
  return NumericVector(std::move(recs), lambda);
}

std::vector<double> NumericVector::values() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.value);
  return out;
}

double NumericVector::at_rank(std::size_t rank) const {
  if (rank == 0) return 0.0;
  if (rank > records_.size()) return lambda_;
  return records_[order_[rank - 1]].value;
}

void NumericVector::set_value(std::size_t record, double value) {
  if (record >= records_.size()) throw InvalidInput("NumericVector: record out of range");
  if (!std::isfinite(value) || value < 0.0 || value > lambda_) {
    throw InvalidInput("NumericVector: value outside [0, lambda]");
  }
  records_[record].value = value;
  resort();
}

void NumericVector::resort() {
  order_.resize(records_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    if (records_[a].value != records_[b].value) return records_[a].value < records_[b].value;
    return records_[a].label < records_[b].label;
  });
  rank_.assign(records_.size(), 0);
  for (std::size_t i = 0; i < order_.size(); ++i) rank_[order_[i]] = i + 1;
}

std::size_t PercentileQuery::k(std::size_t n) const {
  if (p < 1 || p > 100) throw InvalidInput("PercentileQuery: p must lie in [1, 100]");
  if (n == 0) throw InvalidInput("PercentileQuery: empty vector");
  const std::size_t raw = (static_cast<std::size_t>(p) * (n + 1) + 99) / 100;
  return std::clamp<std::size_t>(raw, 1, n);
}

double utility_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t i) {
  check_rank(x, i);
  return -std::fabs(x.at_rank(q.k(x.size())) - x.at_rank(i));
}

double global_sensitivity_percentile(const NumericVector& x) { return x.lambda(); }

double ls0_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t i) {
  check_rank(x, i);
  const std::size_t n = x.size();
  const std::size_t k = q.k(n);
  const double lam = x.lambda();
  const double xi = x.at_rank(i), xk = x.at_rank(k), xkp = x.at_rank(k + 1), xkm = x.at_rank(k - 1);
  double m, p, r;
  if (i == k) {
    m = 0.0;
    if (k >= 2) m = std::max(m, xkp - xk);
    if (k + 1 <= n) m = std::max(m, xk - xkm);
    p = lam - xkp;
    r = xkm;
  } else {
    m = std::max({std::fabs(xk - xi), xkp - xk, xk - xkm});
    if (i > k) {
      p = lam - xi;
      r = std::fabs(xi - xk - xkm);
    } else {
      p = std::fabs(xk + xkp - xi - lam);
      r = xi;
    }
  }
  return std::max({m, p, r});
}

double ls0_percentile_index_form(const NumericVector& x, const PercentileQuery& q, std::size_t i) {
  check_rank(x, i);
  const std::size_t k = q.k(x.size());
  const double lam = x.lambda();
  const double xi = x.at_rank(i), xk = x.at_rank(k), xkp = x.at_rank(k + 1), xkm = x.at_rank(k - 1);
  const double m = std::max({std::fabs(xk - xi), xkp - xk, xk - xkm});
  double p, r;
  if (i > k) {
    p = lam - xi;
    r = xi;
  } else if (i == k) {
    p = lam - xkp;
    r = xkm;
  } else {
    p = lam + xi - 3.0 * xk + xkp;
    r = 3.0 * xk - xi - xkm;
  }
  return std::max({m, p, r});
}

double utility_of_record(const NumericVector& x, const PercentileQuery& q, std::size_t record) {
  return utility_percentile(x, q, x.rank_of(record));
}

double ls0_of_record(const NumericVector& x, const PercentileQuery& q, std::size_t record) {
  return ls0_percentile(x, q, x.rank_of(record));
}

std::vector<NumericVector> candidates_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t t,
                                                 std::size_t i) {
  check_rank(x, i);
  if (t == 0) return {x};
  const std::size_t k = q.k(x.size());
  const double lam = x.lambda();
  auto replace = [](const NumericVector& y, std::size_t record, double v) {
    NumericVector out = y;
    out.set_value(record, v);
    return out;
  };
  if (t == 1) {
    const std::size_t r = x.record_at_rank(i);
    const std::size_t kr = x.record_at_rank(k);
    return {replace(x, r, lam), x, replace(x, r, 0.0), x, replace(x, kr, lam), replace(x, kr, 0.0)};
  }
  std::vector<NumericVector> prev = candidates_percentile(x, q, t - 1, i);
  std::vector<NumericVector> out;
  out.reserve(prev.size());
  for (std::size_t j = 0; j < prev.size(); ++j) {
    out.push_back(replace(prev[j], prev[j].record_at_rank(k), j % 2 == 0 ? 0.0 : lam));
  }
  return out;
}

double ls_t_percentile_candidates(const NumericVector& x, const PercentileQuery& q, std::size_t t, std::size_t i) {
  check_rank(x, i);
  const std::size_t record = x.record_at_rank(i);
  double best = 0.0;
  for (std::size_t s = 0; s <= t; ++s) {
    for (const auto& y : candidates_percentile(x, q, s, i)) best = std::max(best, ls0_of_record(y, q, record));
  }
  return best;
}

double ls_t_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t t, std::size_t i) {
  check_rank(x, i);
  const auto profile = ls_profile_percentile(x, q, x.record_at_rank(i));
  return profile[std::min(t, profile.size() - 1)];
}

SelectionProblem percentile_problem(const NumericVector& x, const PercentileQuery& q) {
  SelectionProblem problem;
  problem.global_sensitivity = global_sensitivity_percentile(x);
  problem.database_size = x.size();
  for (std::size_t i = 1; i <= x.size(); ++i) {
    problem.range.push_back(x.records()[x.record_at_rank(i)].label);
    problem.utility.push_back(utility_percentile(x, q, i));
  }
  return problem;
}

SensitivityFunction percentile_sensitivity(const NumericVector& x, const PercentileQuery& q) {
  auto profiles = std::make_shared<std::vector<std::vector<double>>>(x.size());
  parallel_for(x.size(), [&](std::size_t pos) {
    (*profiles)[pos] = ls_profile_percentile(x, q, x.record_at_rank(pos + 1));
  });
  SensitivityFunction raw;
  const double lam = x.lambda();
  raw.eval = [profiles, lam](std::size_t t, std::size_t r) {
    const auto& p = (*profiles)[r];
    return t < p.size() ? p[t] : lam;
  };
  raw.declared_admissible = true;
  raw.monotonicity = Monotonicity::none;
  return bound_sensitivity(raw, lam, x.size());
}

DatasetModel<std::vector<double>> percentile_dataset_model(const NumericVector& x, const PercentileQuery& q,
                                                           std::size_t grid) {
  const std::size_t n = x.size();
  const std::size_t k = q.k(n);
  const double lam = x.lambda();
  std::vector<std::size_t> range_records;
  for (std::size_t i = 1; i <= n; ++i) range_records.push_back(x.record_at_rank(i));

  std::vector<double> base_points{0.0, lam};
  for (std::size_t g = 0; g < grid; ++g) {
    base_points.push_back(grid == 1 ? 0.0 : lam * static_cast<double>(g) / static_cast<double>(grid - 1));
  }

  DatasetModel<std::vector<double>> model;
  model.global_sensitivity = lam;
  model.database_size = n;
  model.key = hex_key;
  model.utilities = [range_records, k](const std::vector<double>& db) {
    const double kth = kth_of(db, k);
    std::vector<double> u;
    u.reserve(range_records.size());
    for (std::size_t rec : range_records) u.push_back(-std::fabs(kth - db[rec]));
    return u;
  };
  model.neighbors = [base_points](const std::vector<double>& db,
                                  const std::function<void(const std::vector<double>&)>& emit) {
    std::set<double> points(base_points.begin(), base_points.end());
    points.insert(db.begin(), db.end());
    std::vector<double> y = db;
    for (std::size_t j = 0; j < db.size(); ++j) {
      for (double v : points) {
        if (v == db[j]) continue;
        y[j] = v;
        emit(y);
      }
      y[j] = db[j];
    }
  };
  return model;
}

NumericVector load_numeric_vector(std::istream& in, double lambda) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    double v = 0.0;
    if (!parse_double(s, v)) {
      if (!seen_data && values.empty()) {
        seen_data = true;
        if (s.find(',') != std::string::npos) throw ParseError("expected a single column, got '" + s + "'", line_no);
        continue;
      }
      throw ParseError("not a number: '" + s + "'", line_no);
    }
    seen_data = true;
    if (!std::isfinite(v) || v < 0.0 || v > lambda) {
      throw ParseError("value " + s + " outside [0, " + std::to_string(lambda) + "]", line_no);
    }
    values.push_back(v);
  }
  if (in.bad()) throw IoError("read failure");
  if (values.empty()) throw ParseError("no values");
  return NumericVector::from_values(values, lambda);
}

}  // namespace dampen
