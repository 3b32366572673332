#include "l2g/oracle.hpp"

#include <algorithm>
#include <bit>

#include "json.hpp"
#include "l2g/error.hpp"

namespace l2g {

int valid_index(SemanticConfig c) {
  const auto& valid = enumerate_valid();
  const auto it = std::lower_bound(valid.begin(), valid.end(), c);
  if (it == valid.end() || *it != c) return -1;
  return static_cast<int>(it - valid.begin());
}

ConfigSet ConfigSet::all() {
  return ConfigSet((std::uint64_t{1} << enumerate_valid().size()) - 1);
}

ConfigSet ConfigSet::from(const std::vector<SemanticConfig>& configs) {
  ConfigSet s;
  for (auto c : configs) s.insert(c);
  return s;
}

bool ConfigSet::contains(SemanticConfig c) const {
  const int k = valid_index(c);
  return k >= 0 && ((mask_ >> k) & 1U);
}

void ConfigSet::insert(SemanticConfig c) {
  const int k = valid_index(c);
  if (k < 0) throw Error(ErrorCode::kInvalidConfig, c.to_string() + " is not a valid configuration");
  mask_ |= std::uint64_t{1} << k;
}

std::size_t ConfigSet::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<SemanticConfig> ConfigSet::members() const {
  std::vector<SemanticConfig> out;
  const auto& valid = enumerate_valid();
  for (std::size_t k = 0; k < valid.size(); ++k) {
    if ((mask_ >> k) & 1U) out.push_back(valid[k]);
  }
  return out;
}

std::vector<SemanticConfig> compatible_set(SemanticConfig ci, const ShiftMeaning& meaning) {
  if (!is_valid(ci)) {
    throw Error(ErrorCode::kInvalidConfig, ci.to_string() + " is not a valid configuration");
  }
  if (!meaning.applicable(ci)) {
    throw Error(ErrorCode::kInapplicableShift, to_string(meaning) + " at " + ci.to_string());
  }
  std::vector<SemanticConfig> out;
  for (auto cf : enumerate_valid()) {
    if (cf[meaning.slot] == target_value(meaning.direction)) out.push_back(cf);
  }
  return out;
}

const std::vector<OracleEntry>& build_oracle() {
  static const std::vector<OracleEntry> kEntries = [] {
    std::vector<OracleEntry> out;
    for (auto ci : enumerate_valid()) {
      for (const auto& s : instruction_set().sentences()) {
        if (!s.meaning.applicable(ci)) continue;
        out.push_back({ci, &s, compatible_set(ci, s.meaning)});
      }
    }
    return out;
  }();
  return kEntries;
}

Oracle::Oracle() : entries_(&build_oracle()) {
  for (std::size_t i = 0; i < entries_->size(); ++i) {
    const auto& e = (*entries_)[i];
    index_.emplace(std::pair{e.ci.code(), e.sentence->text}, i);
  }
}

const OracleEntry* Oracle::find(SemanticConfig ci, std::string_view text) const {
  const auto it = index_.find({ci.code(), lowercase(text)});
  return it == index_.end() ? nullptr : &(*entries_)[it->second];
}

double Oracle::mean_set_size() const {
  double total = 0.0;
  for (const auto& e : *entries_) total += static_cast<double>(e.cf_set.size());
  return entries_->empty() ? 0.0 : total / static_cast<double>(entries_->size());
}

bool satisfied(SemanticConfig ci, SemanticConfig cf, const LogicalExpr& expr) {
  using K = LogicalExpr::Kind;
  switch (expr.kind()) {
    case K::kLeaf:
      for (const auto* s : instruction_set().lookup(expr.sentence().text)) {
        if (s->meaning.achieved(ci, cf)) return true;
      }
      return false;
    case K::kNot: return !satisfied(ci, cf, expr.child(0));
    case K::kAnd: return satisfied(ci, cf, expr.child(0)) && satisfied(ci, cf, expr.child(1));
    case K::kOr: return satisfied(ci, cf, expr.child(0)) || satisfied(ci, cf, expr.child(1));
  }
  return false;
}

ConfigSet compatible_set_expr(SemanticConfig ci, const LogicalExpr& expr) {
  using K = LogicalExpr::Kind;
  switch (expr.kind()) {
    case K::kLeaf: {
      ConfigSet out;
      for (const auto* s : instruction_set().lookup(expr.sentence().text)) {
        if (s->meaning.applicable(ci)) out = out | ConfigSet::from(compatible_set(ci, s->meaning));
      }
      return out;
    }
    case K::kNot: return compatible_set_expr(ci, expr.child(0)).complement();
    case K::kAnd: return compatible_set_expr(ci, expr.child(0)) & compatible_set_expr(ci, expr.child(1));
    case K::kOr: return compatible_set_expr(ci, expr.child(0)) | compatible_set_expr(ci, expr.child(1));
  }
  return {};
}

std::string oracle_to_json(const std::vector<OracleEntry>& entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json cf = nlohmann::json::array();
    for (auto c : e.cf_set) cf.push_back(c.to_string());
    out.push_back({{"ci", e.ci.to_string()}, {"s", e.sentence->text}, {"cf", std::move(cf)}});
  }
  return out.dump(1);
}

}  // namespace l2g
