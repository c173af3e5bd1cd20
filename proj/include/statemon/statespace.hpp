#pragma once

// State and state-space evaluation, inferred integrating rules, marker
// reconciliation and transition diagnostics.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "statemon/evaluator.hpp"

namespace statemon {

struct StateResult {
  std::string state_id;
  TriStateSeries series;

  bool operator==(const StateResult&) const = default;
};

/// Indices into StateSpaceResult::per_state of the satisfied states, or
/// no_data when an unknown state leaves the outcome open.
struct ActiveSet {
  bool no_data = false;
  std::vector<std::size_t> states;

  bool operator==(const ActiveSet&) const = default;
};

struct StateSpaceResult {
  std::string statespace;
  SpaceMode mode = SpaceMode::Exclusive;
  Grid grid;
  std::vector<StateResult> per_state;
  TriStateSeries space_rules_series;
  TriStateSeries verdict;
  std::vector<ActiveSet> active;
  std::vector<std::optional<std::string>> observed_markers;  // empty or one per cell

  std::size_t cell_count() const { return grid.cell_count(); }
  bool operator==(const StateSpaceResult&) const = default;
};

struct CellOutcome {
  TriState verdict = TriState::NoData;
  ActiveSet active;
};

/// The per-cell combination step of eval_statespace.
CellOutcome combine_states(SpaceMode mode, std::span<const TriState> states, TriState space_rules);

/// `is<StateId>` = conjunction of the state's rules (`true` when it has none).
RuleDef infer_state_rule(const StateDef& state);

/// `is<Space>Satisfied` = disjunction of the state rules. `state_rule_names`
/// overrides the default `is<StateId>` names, one per state.
RuleDef infer_space_rule(const StateSpaceDef& ss,
                         const std::vector<std::string>& state_rule_names = {});

struct InferredRules {
  SpecDocument document;  // input plus the synthetic rules
  std::vector<std::string> added;
  std::vector<Diagnostic> warnings;
};

/// Appends the inferred rules of every state space. A name already taken
/// falls back to `is<StateId>State`, then a numeric suffix, with a warning.
InferredRules with_inferred_rules(const SpecDocument& doc);

/// Column kernels; `mode` overrides the declared mode.
StateSpaceResult eval_statespace(const StateSpaceDef& ss, const EvalContext& ctx,
                                 std::optional<SpaceMode> mode = std::nullopt);

/// Per-cell serial reference.
StateSpaceResult eval_statespace_reference(const StateSpaceDef& ss, const EvalContext& ctx,
                                           std::optional<SpaceMode> mode = std::nullopt);

/// Copies marker cells into the result. Throws std::invalid_argument if the
/// grids differ.
void attach_markers(StateSpaceResult& result, const MarkerSeries& markers);

/// state id -> marker for the states that declare one.
std::map<std::string, std::string> marker_map(const StateSpaceDef& ss);

struct MarkerMismatch {
  std::size_t cell_index = 0;
  std::vector<std::string> expected_states;
  std::optional<std::string> observed_marker;

  bool operator==(const MarkerMismatch&) const = default;
};

struct Reconciliation {
  std::vector<MarkerMismatch> mismatches;
  std::size_t examined = 0;
  std::size_t skipped = 0;  // marker missing or outcome undecided
  std::size_t states_without_marker = 0;
};

/// Cell-wise comparison of the observed marker with the active set. A cell is
/// skipped when the marker is missing, the active set is unknown, or the
/// observed marker's own state is no-data.
Reconciliation reconcile_markers(const StateSpaceResult& result, const MarkerSeries& markers,
                                 const std::map<std::string, std::string>& marker_map);

struct TransitionDiagnostic {
  std::string from_marker;
  std::string to_marker;
  std::size_t count = 0;
  bool declared = false;

  bool operator==(const TransitionDiagnostic&) const = default;
};

/// Observed marker changes between adjacent cells, sorted by (from, to).
std::vector<TransitionDiagnostic> transition_diagnostics(const MarkerSeries& markers,
                                                         const StateSpaceDef& ss);

}  // namespace statemon
