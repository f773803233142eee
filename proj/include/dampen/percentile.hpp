#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "dampen/core.hpp"
#include "dampen/sensitivity.hpp"

namespace dampen {

struct LabeledValue {
  std::string label;
  double value = 0.0;
};

// Values in [0, lambda]. Records keep their input position as identity;
// ranks follow value order with ties broken by label.
class NumericVector {
 public:
  NumericVector(std::vector<LabeledValue> records, double lambda);
  // Labels x0, x1, ... zero-padded to a common width.
  static NumericVector from_values(const std::vector<double>& values, double lambda);

  std::size_t size() const { return records_.size(); }
  double lambda() const { return lambda_; }
  const std::vector<LabeledValue>& records() const { return records_; }
  std::vector<double> values() const;

  // 1-based ranks. at_rank(0) = 0 and at_rank(n + 1) = lambda.
  std::size_t rank_of(std::size_t record) const { return rank_[record]; }
  std::size_t record_at_rank(std::size_t rank) const { return order_[rank - 1]; }
  double at_rank(std::size_t rank) const;

  void set_value(std::size_t record, double value);

 private:
  void resort();
  std::vector<LabeledValue> records_;
  double lambda_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;
};

struct PercentileQuery {
  int p = 50;
  // ceil(p (n + 1) / 100) clamped to [1, n].
  std::size_t k(std::size_t n) const;
};

// Rank-indexed operations: i is a 1-based rank in x.
double utility_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t i);
double global_sensitivity_percentile(const NumericVector& x);
double ls0_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t i);
// The closed form with the case tables taken literally from the index-based
// statement. Disagrees with the exhaustive oracle on many inputs.
double ls0_percentile_index_form(const NumericVector& x, const PercentileQuery& q, std::size_t i);

// Record-indexed variants.
double utility_of_record(const NumericVector& x, const PercentileQuery& q, std::size_t record);
double ls0_of_record(const NumericVector& x, const PercentileQuery& q, std::size_t record);

// The six-database construction. Entries are fresh vectors (record
// identities preserved); `i` is a rank in x.
std::vector<NumericVector> candidates_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t t,
                                                 std::size_t i);
// max of ls0 over candidates at distances 0..t.
double ls_t_percentile_candidates(const NumericVector& x, const PercentileQuery& q, std::size_t t, std::size_t i);

// Exact element local sensitivity at distance t for the record of rank i.
double ls_t_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t t, std::size_t i);
// LS(x, t, record) for t = 0..n, nondecreasing.
std::vector<double> ls_profile_percentile(const NumericVector& x, const PercentileQuery& q, std::size_t record);

// Candidates are the records in ascending rank order of x.
SelectionProblem percentile_problem(const NumericVector& x, const PercentileQuery& q);
// Exact LS at distance t bounded by lambda; profiles are computed in parallel
// up front. Matches the range order of percentile_problem.
SensitivityFunction percentile_sensitivity(const NumericVector& x, const PercentileQuery& q);

// Exhaustive model over value vectors (record order). A neighbour moves one
// record to 0, lambda, any current value, or a point of a uniform grid with
// `grid` points on [0, lambda].
DatasetModel<std::vector<double>> percentile_dataset_model(const NumericVector& x, const PercentileQuery& q,
                                                           std::size_t grid = 64);

// One value per line, or a one-column CSV with a header. Blank lines and
// lines starting with '#' are skipped.
NumericVector load_numeric_vector(std::istream& in, double lambda);

}  // namespace dampen
