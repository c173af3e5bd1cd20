#include <algorithm>
#include <set>
#include <stdexcept>

#include "statemon/statespace.hpp"

namespace statemon {

namespace {

Expr fold(BinaryOp op, const std::vector<std::string>& names) {
  if (names.empty()) return Expr::boolean(true);
  Expr acc = Expr::ref(names.front());
  for (std::size_t i = 1; i < names.size(); ++i) {
    acc = Expr::binary(op, std::move(acc), Expr::ref(names[i]));
  }
  return acc;
}

std::string default_state_rule_name(const StateDef& s) { return "is" + s.id; }

StateSpaceResult make_result(const StateSpaceDef& ss, const EvalContext& ctx,
                             std::optional<SpaceMode> mode) {
  StateSpaceResult r;
  r.statespace = ss.name;
  r.mode = mode.value_or(ss.mode);
  r.grid = ctx.grid();
  const std::size_t n = r.grid.cell_count();
  for (const auto& st : ss.states) {
    r.per_state.push_back({st.id, TriStateSeries{st.id, r.grid, std::vector<TriState>(n)}});
  }
  r.space_rules_series = {ss.name + ":rules", r.grid, std::vector<TriState>(n)};
  r.verdict = {ss.name, r.grid, std::vector<TriState>(n)};
  r.active.resize(n);
  return r;
}

// Folds per-state series and space rules into verdict and active columns.
void combine_columns(StateSpaceResult& r) {
  const auto count = static_cast<std::int64_t>(r.grid.cell_count());
  const std::size_t k = r.per_state.size();
#pragma omp parallel for schedule(static) if (count >= 4096)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto cell = static_cast<std::size_t>(i);
    std::vector<TriState> states(k);
    for (std::size_t s = 0; s < k; ++s) states[s] = r.per_state[s].series.cells[cell];
    CellOutcome o = combine_states(r.mode, states, r.space_rules_series.cells[cell]);
    r.verdict.cells[cell] = o.verdict;
    r.active[cell] = std::move(o.active);
  }
}

TriState conjunction_at(const std::vector<NameRef>& refs, const EvalContext& ctx,
                        std::size_t cell) {
  TriState acc = TriState::Satisfied;
  for (const auto& ref : refs) {
    const auto& rule = std::get<RuleDef>(ctx.spec().element(ref.index));
    acc = tri_and(acc, std::get<TriState>(eval_expr(rule.body, ctx, cell)));
  }
  return acc;
}

std::vector<TriState> conjunction_column(const std::vector<NameRef>& refs, SeriesEvaluator& ev,
                                         std::size_t n) {
  std::vector<TriState> acc(n, TriState::Satisfied);
  for (const auto& ref : refs) {
    const auto& column = ev.rule(ref.index);
    for (std::size_t i = 0; i < n; ++i) acc[i] = tri_and(acc[i], column[i]);
  }
  return acc;
}

}  // namespace

CellOutcome combine_states(SpaceMode mode, std::span<const TriState> states,
                           TriState space_rules) {
  CellOutcome out;
  std::size_t satisfied = 0;
  std::size_t unknown = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == TriState::Satisfied) {
      ++satisfied;
      out.active.states.push_back(i);
    } else if (states[i] == TriState::NoData) {
      ++unknown;
    }
  }

  // The state part alone: satisfied, violated, or open.
  TriState part;
  if (mode == SpaceMode::Exclusive) {
    if (satisfied >= 2) part = TriState::Violated;
    else if (unknown > 0) part = TriState::NoData;
    else part = tri_from_bool(satisfied == 1);
  } else {
    if (satisfied >= 1) part = TriState::Satisfied;
    else part = unknown > 0 ? TriState::NoData : TriState::Violated;
  }
  out.verdict = tri_and(part, space_rules);

  if (unknown > 0 && part == TriState::NoData) {
    out.active.no_data = true;
    out.active.states.clear();
  }
  return out;
}

RuleDef infer_state_rule(const StateDef& state) {
  std::vector<std::string> names;
  for (const auto& ref : state.rule_refs) names.push_back(ref.name);
  RuleDef rule;
  rule.name = default_state_rule_name(state);
  rule.body = fold(BinaryOp::And, names);
  return rule;
}

RuleDef infer_space_rule(const StateSpaceDef& ss, const std::vector<std::string>& state_rule_names) {
  std::vector<std::string> names = state_rule_names;
  if (names.empty()) {
    for (const auto& st : ss.states) names.push_back(default_state_rule_name(st));
  }
  if (names.size() != ss.states.size()) {
    throw std::invalid_argument("infer_space_rule: one rule name per state required");
  }
  RuleDef rule;
  rule.name = "is" + ss.name + "Satisfied";
  rule.body = fold(BinaryOp::Or, names);
  return rule;
}

InferredRules with_inferred_rules(const SpecDocument& doc) {
  InferredRules out{doc, {}, {}};
  std::set<std::string> taken;
  for (const auto& e : doc.elements) taken.insert(std::string(element_name(e)));

  auto claim = [&](const std::string& wanted, const std::string& fallback, SourceLoc loc) {
    std::string name = wanted;
    if (taken.count(name)) {
      name = fallback;
      for (int i = 2; taken.count(name); ++i) name = fallback + std::to_string(i);
      out.warnings.push_back({Severity::Warning,
                              "inferred rule name '" + wanted + "' is taken; using '" + name + "'",
                              loc});
    }
    taken.insert(name);
    out.added.push_back(name);
    return name;
  };

  for (const auto& e : doc.elements) {
    const auto* ss = std::get_if<StateSpaceDef>(&e);
    if (!ss) continue;
    std::vector<std::string> state_names;
    for (const auto& st : ss->states) {
      RuleDef rule = infer_state_rule(st);
      rule.name = claim(rule.name, rule.name + "State", st.loc);
      state_names.push_back(rule.name);
      out.document.elements.emplace_back(std::move(rule));
    }
    RuleDef space = infer_space_rule(*ss, state_names);
    space.name = claim(space.name, space.name, ss->loc);
    out.document.elements.emplace_back(std::move(space));
  }
  return out;
}

StateSpaceResult eval_statespace(const StateSpaceDef& ss, const EvalContext& ctx,
                                 std::optional<SpaceMode> mode) {
  StateSpaceResult r = make_result(ss, ctx, mode);
  const std::size_t n = r.grid.cell_count();
  SeriesEvaluator ev(ctx);
  for (std::size_t s = 0; s < ss.states.size(); ++s) {
    r.per_state[s].series.cells = conjunction_column(ss.states[s].rule_refs, ev, n);
  }
  r.space_rules_series.cells = conjunction_column(ss.space_rules, ev, n);
  combine_columns(r);
  return r;
}

StateSpaceResult eval_statespace_reference(const StateSpaceDef& ss, const EvalContext& ctx,
                                           std::optional<SpaceMode> mode) {
  StateSpaceResult r = make_result(ss, ctx, mode);
  const std::size_t n = r.grid.cell_count();
  std::vector<TriState> states(ss.states.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < ss.states.size(); ++s) {
      states[s] = conjunction_at(ss.states[s].rule_refs, ctx, i);
      r.per_state[s].series.cells[i] = states[s];
    }
    const TriState rules = conjunction_at(ss.space_rules, ctx, i);
    r.space_rules_series.cells[i] = rules;
    CellOutcome o = combine_states(r.mode, states, rules);
    r.verdict.cells[i] = o.verdict;
    r.active[i] = std::move(o.active);
  }
  return r;
}

void attach_markers(StateSpaceResult& result, const MarkerSeries& markers) {
  if (!(markers.grid == result.grid) || markers.cells.size() != result.cell_count()) {
    throw std::invalid_argument("marker series grid differs from the evaluation grid");
  }
  result.observed_markers = markers.cells;
}

std::map<std::string, std::string> marker_map(const StateSpaceDef& ss) {
  std::map<std::string, std::string> out;
  for (const auto& st : ss.states) {
    if (st.marker) out.emplace(st.id, *st.marker);
  }
  return out;
}

Reconciliation reconcile_markers(const StateSpaceResult& result, const MarkerSeries& markers,
                                 const std::map<std::string, std::string>& marker_map) {
  if (!(markers.grid == result.grid) || markers.cells.size() != result.cell_count()) {
    throw std::invalid_argument("marker series grid differs from the evaluation grid");
  }
  std::map<std::string, std::size_t> state_of_marker;
  Reconciliation out;
  for (std::size_t s = 0; s < result.per_state.size(); ++s) {
    const auto it = marker_map.find(result.per_state[s].state_id);
    if (it == marker_map.end()) {
      ++out.states_without_marker;
      continue;
    }
    state_of_marker.emplace(it->second, s);
  }

  for (std::size_t i = 0; i < result.cell_count(); ++i) {
    const auto& observed = markers.cells[i];
    const ActiveSet& active = result.active[i];
    if (!observed || active.no_data) {
      ++out.skipped;
      continue;
    }
    const auto known = state_of_marker.find(*observed);
    if (known != state_of_marker.end() &&
        result.per_state[known->second].series.cells[i] == TriState::NoData) {
      ++out.skipped;
      continue;
    }
    ++out.examined;
    const bool agrees =
        known == state_of_marker.end()
            ? active.states.empty()
            : std::find(active.states.begin(), active.states.end(), known->second) !=
                  active.states.end();
    if (agrees) continue;
    MarkerMismatch m{i, {}, observed};
    for (const std::size_t s : active.states) m.expected_states.push_back(result.per_state[s].state_id);
    out.mismatches.push_back(std::move(m));
  }
  return out;
}

std::vector<TransitionDiagnostic> transition_diagnostics(const MarkerSeries& markers,
                                                         const StateSpaceDef& ss) {
  std::map<std::string, std::string> state_of_marker;
  for (const auto& st : ss.states) {
    if (st.marker) state_of_marker.emplace(*st.marker, st.id);
  }
  std::set<std::pair<std::string, std::string>> declared;
  for (const auto& t : ss.transitions) {
    declared.emplace(t.from, t.to);
    declared.emplace(t.to, t.from);
  }

  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  for (std::size_t i = 1; i < markers.cells.size(); ++i) {
    const auto& a = markers.cells[i - 1];
    const auto& b = markers.cells[i];
    if (a && b && *a != *b) ++counts[{*a, *b}];
  }

  std::vector<TransitionDiagnostic> out;
  for (const auto& [pair, count] : counts) {
    const auto sa = state_of_marker.find(pair.first);
    const auto sb = state_of_marker.find(pair.second);
    const bool is_declared = sa != state_of_marker.end() && sb != state_of_marker.end() &&
                             declared.count({sa->second, sb->second}) > 0;
    out.push_back({pair.first, pair.second, count, is_declared});
  }
  return out;
}

}  // namespace statemon
