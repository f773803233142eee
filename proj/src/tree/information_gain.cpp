#include <algorithm>
#include <cmath>
#include <numbers>

#include "dampen/error.hpp"
#include "dampen/tree.hpp"

namespace dampen {
namespace {

double xlog2x(double x) { return x <= 0.0 ? 0.0 : x * std::log2(x); }

void check_shape(const Contingency& counts, std::size_t classes) {
  if (classes == 0 || counts.size() % classes != 0) throw InvalidInput("contingency: shape mismatch");
}

}  // namespace

Contingency contingency(const LabeledTable& table, std::size_t attribute, const std::vector<std::size_t>* rows) {
  const auto& spec = table.attributes.at(attribute);
  if (spec.kind != AttributeSpec::Kind::categorical) throw InvalidInput("contingency: attribute is not categorical");
  if (attribute == table.class_index) throw InvalidInput("contingency: attribute is the class attribute");
  const std::size_t classes = table.class_count();
  Contingency counts(spec.values.size() * classes, 0);
  auto add = [&](std::size_t r) { ++counts[table.code(r, attribute) * classes + table.code(r, table.class_index)]; };
  if (rows) {
    for (std::size_t r : *rows) add(r);
  } else {
    for (std::size_t r = 0; r < table.size(); ++r) add(r);
  }
  return counts;
}

double ig_utility(const Contingency& counts, std::size_t classes) {
  check_shape(counts, classes);
  double total = 0.0;
  for (std::size_t j = 0; j < counts.size() / classes; ++j) {
    double nj = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      const double n = static_cast<double>(counts[j * classes + c]);
      total += xlog2x(n);
      nj += n;
    }
    total -= xlog2x(nj);
  }
  return std::min(total, 0.0);
}

double ig_utility(const LabeledTable& table, std::size_t attribute, const std::vector<std::size_t>* rows) {
  return ig_utility(contingency(table, attribute, rows), table.class_count());
}

double global_sensitivity_ig(std::size_t table_size) {
  return std::log2(static_cast<double>(table_size) + 1.0) + 1.0 / std::numbers::ln2;
}

double ig_f(double x) { return x <= 0.0 ? 0.0 : xlog2x(x + 1.0) - xlog2x(x); }

double ig_g(double x) { return x <= 1.0 ? 0.0 : -ig_f(x - 1.0); }

double ig_h(double a, double b) { return std::max(ig_f(a) - ig_f(b), ig_g(b) - ig_g(a)); }

double ls0_ig(const Contingency& counts, std::size_t classes) {
  check_shape(counts, classes);
  double best = 0.0;
  for (std::size_t j = 0; j < counts.size() / classes; ++j) {
    std::size_t nj = 0;
    for (std::size_t c = 0; c < classes; ++c) nj += counts[j * classes + c];
    for (std::size_t c = 0; c < classes; ++c) {
      best = std::max(best, ig_h(static_cast<double>(nj), static_cast<double>(counts[j * classes + c])));
    }
  }
  return best;
}

const std::vector<IgCandidateCache::Pairs>& IgCandidateCache::levels(long a, long b, long tau, std::size_t t,
                                                                      IgGuard guard) {
  auto& lv = store_[{a, b, guard == IgGuard::table_size ? tau : -1, static_cast<int>(guard)}];
  if (lv.size() > t) {
    ++hits_;
    return lv;
  }
  if (lv.empty()) lv.push_back({{a, b}});
  while (lv.size() <= t) {
    Pairs next;
    for (const auto& [x, y] : lv.back()) {
      if (x > 0 && y > 0) next.insert({x - 1, y - 1});
      if (guard == IgGuard::none || x < tau) next.insert({x + 1, y});
    }
    lv.push_back(std::move(next));
  }
  return lv;
}

IgCandidateCache::Pairs candidates_ig(long a, long b, long tau, std::size_t t, IgGuard guard, IgCandidateCache* cache) {
  if (cache) return cache->levels(a, b, tau, t, guard)[t];
  IgCandidateCache scratch;
  return scratch.levels(a, b, tau, t, guard)[t];
}

double ls_t_ig_candidates(const Contingency& counts, std::size_t classes, std::size_t t, IgGuard guard,
                          IgCandidateCache* cache) {
  check_shape(counts, classes);
  IgCandidateCache scratch;
  IgCandidateCache& use = cache ? *cache : scratch;
  long tau = 0;
  for (std::size_t n : counts) tau += static_cast<long>(n);
  double best = 0.0;
  for (std::size_t j = 0; j < counts.size() / classes; ++j) {
    long nj = 0;
    for (std::size_t c = 0; c < classes; ++c) nj += static_cast<long>(counts[j * classes + c]);
    for (std::size_t c = 0; c < classes; ++c) {
      const auto& lv = use.levels(nj, static_cast<long>(counts[j * classes + c]), tau, t, guard);
      for (std::size_t s = 0; s <= t; ++s) {
        for (const auto& [x, y] : lv[s]) {
          best = std::max(best, ig_h(static_cast<double>(x), static_cast<double>(y)));
        }
      }
    }
  }
  return best;
}

namespace {

// Largest h over pairs reachable in exactly s unguarded steps from (a, b):
// (a + s - 2i, b - i) for 0 <= i <= min(b, s).
double level_max(long a, long b, std::size_t s) {
  double best = 0.0;
  const long steps = static_cast<long>(s);
  for (long i = 0; i <= std::min(b, steps); ++i) {
    best = std::max(best, ig_h(static_cast<double>(a + steps - 2 * i), static_cast<double>(b - i)));
  }
  return best;
}

}  // namespace

double ls_t_ig(const Contingency& counts, std::size_t classes, std::size_t t) {
  check_shape(counts, classes);
  double best = 0.0;
  for (std::size_t j = 0; j < counts.size() / classes; ++j) {
    long nj = 0;
    for (std::size_t c = 0; c < classes; ++c) nj += static_cast<long>(counts[j * classes + c]);
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t s = 0; s <= t; ++s) {
        best = std::max(best, level_max(nj, static_cast<long>(counts[j * classes + c]), s));
      }
    }
  }
  return best;
}

SensitivityFunction ig_sensitivity(const std::vector<Contingency>& per_attribute, std::size_t classes,
                                   std::size_t database_size) {
  struct Memo {
    std::mutex lock;
    std::vector<std::vector<double>> profile;  // per attribute, prefix-max over t
  };
  auto memo = std::make_shared<Memo>();
  memo->profile.resize(per_attribute.size());
  for (const auto& counts : per_attribute) check_shape(counts, classes);

  SensitivityFunction raw;
  raw.eval = [per_attribute, classes, memo](std::size_t t, std::size_t r) {
    std::lock_guard<std::mutex> g(memo->lock);
    auto& prof = memo->profile.at(r);
    const auto& counts = per_attribute[r];
    while (prof.size() <= t) {
      const std::size_t s = prof.size();
      double best = prof.empty() ? 0.0 : prof.back();
      for (std::size_t j = 0; j < counts.size() / classes; ++j) {
        long nj = 0;
        for (std::size_t c = 0; c < classes; ++c) nj += static_cast<long>(counts[j * classes + c]);
        for (std::size_t c = 0; c < classes; ++c) {
          best = std::max(best, level_max(nj, static_cast<long>(counts[j * classes + c]), s));
        }
      }
      prof.push_back(best);
    }
    return prof[t];
  };
  raw.declared_admissible = true;
  raw.monotonicity = Monotonicity::none;
  return bound_sensitivity(raw, global_sensitivity_ig(database_size), database_size);
}

DatasetModel<Contingency> ig_dataset_model(std::size_t values, std::size_t classes, std::size_t database_size) {
  DatasetModel<Contingency> model;
  model.global_sensitivity = global_sensitivity_ig(database_size);
  model.database_size = database_size;
  model.key = [](const Contingency& x) {
    std::string k;
    for (std::size_t n : x) k += std::to_string(n) + ",";
    return k;
  };
  model.utilities = [classes](const Contingency& x) { return std::vector<double>{ig_utility(x, classes)}; };
  model.neighbors = [values, classes](const Contingency& x, const std::function<void(const Contingency&)>& emit) {
    if (x.size() != values * classes) throw InvalidInput("ig model: contingency shape mismatch");
    Contingency y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
      ++y[i];
      emit(y);
      --y[i];
      if (y[i] > 0) {
        --y[i];
        emit(y);
        ++y[i];
      }
    }
  };
  return model;
}

std::vector<Contingency> marginal_contingencies(const Contingency& joint, const std::vector<std::size_t>& arities,
                                                std::size_t classes) {
  std::size_t cells = classes;
  for (std::size_t a : arities) cells *= a;
  if (joint.size() != cells) throw InvalidInput("marginal_contingencies: joint shape mismatch");
  std::vector<Contingency> out;
  for (std::size_t a : arities) out.emplace_back(a * classes, 0);
  for (std::size_t cell = 0; cell < joint.size(); ++cell) {
    if (joint[cell] == 0) continue;
    const std::size_t c = cell % classes;
    std::size_t rest = cell / classes;
    for (std::size_t i = arities.size(); i-- > 0;) {
      out[i][(rest % arities[i]) * classes + c] += joint[cell];
      rest /= arities[i];
    }
  }
  return out;
}

DatasetModel<Contingency> ig_table_dataset_model(const std::vector<std::size_t>& arities, std::size_t classes,
                                                 std::size_t database_size) {
  std::size_t cells = classes;
  for (std::size_t a : arities) cells *= a;
  DatasetModel<Contingency> model;
  model.global_sensitivity = global_sensitivity_ig(database_size);
  model.database_size = database_size;
  model.key = [](const Contingency& x) {
    std::string k;
    for (std::size_t n : x) k += std::to_string(n) + ",";
    return k;
  };
  model.utilities = [arities, classes](const Contingency& x) {
    std::vector<double> u;
    for (const auto& m : marginal_contingencies(x, arities, classes)) u.push_back(ig_utility(m, classes));
    return u;
  };
  model.neighbors = [cells](const Contingency& x, const std::function<void(const Contingency&)>& emit) {
    if (x.size() != cells) throw InvalidInput("ig table model: joint shape mismatch");
    Contingency y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
      ++y[i];
      emit(y);
      --y[i];
      if (y[i] > 0) {
        --y[i];
        emit(y);
        ++y[i];
      }
    }
  };
  return model;
}

double noisy_count(std::size_t count, double epsilon, Rng& rng) {
  if (!(epsilon > 0.0)) throw InvalidInput("noisy_count: epsilon must be positive");
  return static_cast<double>(count) + laplace(rng, 1.0 / epsilon);
}

}  // namespace dampen
