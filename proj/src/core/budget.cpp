#include <algorithm>
#include <cmath>

#include "dampen/core.hpp"
#include "dampen/error.hpp"

namespace dampen {

BudgetAccountant::BudgetAccountant() { scopes_.emplace("", Scope{Composition::sequential, {}, {}}); }

void BudgetAccountant::open_scope(const std::string& id, Composition mode, const std::string& parent) {
  if (id.empty()) throw InvalidInput("budget: scope id must be nonempty");
  if (scopes_.count(id)) throw InvalidInput("budget: scope '" + id + "' already exists");
  auto p = scopes_.find(parent);
  if (p == scopes_.end()) throw InvalidInput("budget: unknown parent scope '" + parent + "'");
  p->second.children.push_back(id);
  scopes_.emplace(id, Scope{mode, {}, {}});
}

bool BudgetAccountant::has_scope(const std::string& id) const { return scopes_.count(id) != 0; }

BudgetAccountant& BudgetAccountant::account(const std::string& scope, double epsilon, std::string note) {
  auto it = scopes_.find(scope);
  if (it == scopes_.end()) throw InvalidInput("budget: unknown scope '" + scope + "'");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidInput("budget: epsilon must be positive");
  it->second.entries.push_back(epsilon);
  ledger_.push_back({scope, epsilon, std::move(note)});
  return *this;
}

double BudgetAccountant::total(const std::string& scope) const {
  auto it = scopes_.find(scope);
  if (it == scopes_.end()) throw InvalidInput("budget: unknown scope '" + scope + "'");
  const Scope& s = it->second;
  double acc = 0.0;
  const bool seq = s.mode == Composition::sequential;
  for (double e : s.entries) acc = seq ? acc + e : std::max(acc, e);
  for (const auto& child : s.children) {
    const double c = total(child);
    acc = seq ? acc + c : std::max(acc, c);
  }
  return acc;
}

}  // namespace dampen
