#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "statemon/spec_language.hpp"

namespace statemon {

namespace {

std::string_view type_name(ValueType t) {
  return t == ValueType::Logical ? "boolean" : "numeric";
}

class Resolver {
 public:
  explicit Resolver(SpecDocument doc) { spec_.document = std::move(doc); }

  ResolveResult run() {
    build_index();
    build_sensor_table();
    for (std::size_t i = 0; i < spec_.document.elements.size(); ++i) {
      auto& element = spec_.document.elements[i];
      if (auto* rule = std::get_if<RuleDef>(&element)) {
        check_expr_element(*rule, i, ValueType::Logical);
      } else if (auto* fn = std::get_if<FunctionDef>(&element)) {
        check_expr_element(*fn, i, ValueType::Numeric);
      } else if (auto* ch = std::get_if<CharacteristicDef>(&element)) {
        check_characteristic(*ch);
      } else if (auto* c = std::get_if<ConstantDef>(&element)) {
        if (!std::isfinite(c->value)) error("constant '" + c->name + "' is not finite", c->loc);
      } else if (auto* tr = std::get_if<TimeRoutineDef>(&element)) {
        check_time_routine(*tr);
      }
    }
    order_definitions();
    for (auto& element : spec_.document.elements) {
      if (auto* ss = std::get_if<StateSpaceDef>(&element)) check_state_space(*ss);
    }

    ResolveResult result;
    result.diagnostics = diagnostics_;
    if (!has_errors(diagnostics_)) {
      for (const auto& d : diagnostics_) {
        if (d.severity == Severity::Warning) spec_.warnings.push_back(d);
      }
      result.spec = std::move(spec_);
    }
    return result;
  }

 private:
  void error(std::string message, SourceLoc loc) {
    diagnostics_.push_back({Severity::Error, std::move(message), loc});
  }
  void warning(std::string message, SourceLoc loc) {
    diagnostics_.push_back({Severity::Warning, std::move(message), loc});
  }

  void build_index() {
    const auto& elements = spec_.document.elements;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      const std::string name(element_name(elements[i]));
      if (!spec_.index.emplace(name, i).second) {
        error("duplicate element name '" + name + "'", element_loc(elements[i]));
      }
    }
  }

  void build_sensor_table() {
    std::set<std::string> ids;
    for (const auto& element : spec_.document.elements) {
      if (const auto* e = std::get_if<RuleDef>(&element)) {
        for (const auto& b : e->sensors) ids.insert(b.bms_id);
      } else if (const auto* f = std::get_if<FunctionDef>(&element)) {
        for (const auto& b : f->sensors) ids.insert(b.bms_id);
      } else if (const auto* ch = std::get_if<CharacteristicDef>(&element)) {
        ids.insert(ch->x_sensor);
        ids.insert(ch->y_sensor);
      }
    }
    spec_.sensor_table.assign(ids.begin(), ids.end());
  }

  std::size_t sensor_slot(const std::string& bms_id) const {
    const auto& table = spec_.sensor_table;
    return static_cast<std::size_t>(std::lower_bound(table.begin(), table.end(), bms_id) -
                                    table.begin());
  }

  void check_characteristic(const CharacteristicDef& ch) {
    if (ch.points.size() < 2) {
      error("characteristic '" + ch.name + "' needs at least two points", ch.loc);
    }
    for (std::size_t i = 1; i < ch.points.size(); ++i) {
      if (!(ch.points[i].x > ch.points[i - 1].x)) {
        error("characteristic '" + ch.name + "': x values must be strictly increasing", ch.loc);
        break;
      }
    }
    for (const auto& p : ch.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        error("characteristic '" + ch.name + "': points must be finite", ch.loc);
        break;
      }
    }
    if (!(ch.margin >= 0) || !std::isfinite(ch.margin)) {
      error("characteristic '" + ch.name + "': margin must be finite and non-negative",
            ch.loc);
    }
  }

  void check_time_routine(const TimeRoutineDef& tr) {
    if (tr.windows.empty()) error("time routine '" + tr.name + "' has no windows", tr.loc);
    for (const auto& w : tr.windows) {
      if (w.start_minute < 0 || w.start_minute >= 1440 || w.end_minute < 0 ||
          w.end_minute > 1440) {
        error("time routine '" + tr.name + "': window out of range", w.loc);
      } else if (w.start_minute == w.end_minute) {
        warning("time routine '" + tr.name + "': empty window", w.loc);
      }
      if (w.days && *w.days == 0) {
        warning("time routine '" + tr.name + "': window matches no day", w.loc);
      }
    }
  }

  // -- expressions -----------------------------------------------------------

  struct Scope {
    const ExprElement* owner;
    std::size_t position;
    std::set<std::size_t>* dependencies;
  };

  void require(std::optional<ValueType> got, ValueType want, const Expr& at) {
    if (got && *got != want) {
      error("type mismatch: " + std::string(type_name(want)) + " required, found " +
                std::string(type_name(*got)) + " expression",
            at.loc);
    }
  }

  std::optional<ValueType> check(Expr& e, const Scope& scope) {
    switch (e.kind) {
      case ExprKind::BoolLiteral:
        return ValueType::Logical;
      case ExprKind::NumberLiteral:
        if (!std::isfinite(e.number)) {
          error("numeric literal is not finite", e.loc);
          return std::nullopt;
        }
        return ValueType::Numeric;
      case ExprKind::Ref:
        return bind_ref(e, scope);
      case ExprKind::Satisfies: {
        const auto it = spec_.index.find(e.name);
        if (it == spec_.index.end()) {
          error("undefined reference '" + e.name + "'", e.loc);
          return ValueType::Logical;
        }
        if (!std::holds_alternative<CharacteristicDef>(spec_.document.elements[it->second])) {
          error("satisfies(...) requires a characteristic, '" + e.name + "' is a " +
                    std::string(element_keyword(spec_.document.elements[it->second])),
                e.loc);
          return ValueType::Logical;
        }
        e.ref_kind = RefKind::Characteristic;
        e.ref_index = it->second;
        return ValueType::Logical;
      }
      case ExprKind::Not: {
        require(check(e.operands[0], scope), ValueType::Logical, e.operands[0]);
        return ValueType::Logical;
      }
      case ExprKind::Negate:
      case ExprKind::Abs: {
        require(check(e.operands[0], scope), ValueType::Numeric, e.operands[0]);
        return ValueType::Numeric;
      }
      case ExprKind::Binary: {
        const auto lhs = check(e.operands[0], scope);
        const auto rhs = check(e.operands[1], scope);
        switch (e.op) {
          case BinaryOp::And:
          case BinaryOp::Or:
          case BinaryOp::Implies:
            require(lhs, ValueType::Logical, e.operands[0]);
            require(rhs, ValueType::Logical, e.operands[1]);
            return ValueType::Logical;
          case BinaryOp::Eq:
          case BinaryOp::Lt:
          case BinaryOp::Gt:
          case BinaryOp::Le:
          case BinaryOp::Ge:
            require(lhs, ValueType::Numeric, e.operands[0]);
            require(rhs, ValueType::Numeric, e.operands[1]);
            return ValueType::Logical;
          default:
            require(lhs, ValueType::Numeric, e.operands[0]);
            require(rhs, ValueType::Numeric, e.operands[1]);
            return ValueType::Numeric;
        }
      }
      case ExprKind::If: {
        require(check(e.operands[0], scope), ValueType::Logical, e.operands[0]);
        const auto then_type = check(e.operands[1], scope);
        const auto else_type = check(e.operands[2], scope);
        if (then_type && else_type && *then_type != *else_type) {
          error("type mismatch: if branches differ (" + std::string(type_name(*then_type)) +
                    " vs " + std::string(type_name(*else_type)) + ")",
                e.loc);
          return std::nullopt;
        }
        return then_type ? then_type : else_type;
      }
    }
    return std::nullopt;
  }

  std::optional<ValueType> bind_ref(Expr& e, const Scope& scope) {
    const auto& sensors = scope.owner->sensors;
    const auto local = std::find_if(sensors.begin(), sensors.end(),
                                    [&](const SensorBinding& b) { return b.local_id == e.name; });
    if (local != sensors.end()) {
      e.ref_kind = RefKind::Sensor;
      e.ref_index = sensor_slot(local->bms_id);
      return ValueType::Numeric;
    }
    const auto it = spec_.index.find(e.name);
    if (it == spec_.index.end()) {
      error("undefined reference '" + e.name + "'", e.loc);
      return std::nullopt;
    }
    e.ref_index = it->second;
    const auto& target = spec_.document.elements[it->second];
    switch (target.index()) {
      case 0:  // RuleDef
        e.ref_kind = RefKind::Rule;
        scope.dependencies->insert(it->second);
        return ValueType::Logical;
      case 1:  // FunctionDef
        e.ref_kind = RefKind::Function;
        scope.dependencies->insert(it->second);
        return ValueType::Numeric;
      case 2:
        e.ref_kind = RefKind::Constant;
        return ValueType::Numeric;
      case 3:
        e.ref_kind = RefKind::TimeRoutine;
        return ValueType::Logical;
      case 4:
        error("characteristic '" + e.name + "' must be used via satisfies(" + e.name + ")",
              e.loc);
        return ValueType::Logical;
      default:
        error("state space '" + e.name + "' cannot be used in an expression", e.loc);
        return std::nullopt;
    }
  }

  void check_expr_element(ExprElement& element, std::size_t position, ValueType want) {
    for (const auto& b : element.sensors) {
      if (spec_.index.count(b.local_id)) {
        warning("sensor identifier '" + b.local_id + "' in '" + element.name +
                    "' shadows the element of the same name",
                b.loc);
      }
    }
    Scope scope{&element, position, &dependencies_[position]};
    const auto got = check(element.body, scope);
    if (got && *got != want) {
      error("type mismatch in '" + element.name + "': " + std::string(type_name(want)) +
                " required, found " + std::string(type_name(*got)) + " expression",
            element.body.loc);
    }
  }

  // Depth-first topological sort; reports each cycle once with its path.
  void order_definitions() {
    enum class Mark { None, Active, Done };
    std::map<std::size_t, Mark> marks;
    std::vector<std::size_t> stack;

    std::function<void(std::size_t)> visit = [&](std::size_t node) {
      marks[node] = Mark::Active;
      stack.push_back(node);
      for (const std::size_t dep : dependencies_[node]) {
        const Mark m = marks[dep];
        if (m == Mark::Active) {
          const auto from = std::find(stack.begin(), stack.end(), dep);
          std::string path;
          for (auto it = from; it != stack.end(); ++it) {
            path += std::string(element_name(spec_.document.elements[*it])) + " -> ";
          }
          path += std::string(element_name(spec_.document.elements[dep]));
          error("reference cycle: " + path, element_loc(spec_.document.elements[dep]));
        } else if (m == Mark::None) {
          visit(dep);
        }
      }
      stack.pop_back();
      marks[node] = Mark::Done;
      spec_.evaluation_order.push_back(node);
    };

    for (std::size_t i = 0; i < spec_.document.elements.size(); ++i) {
      const auto& element = spec_.document.elements[i];
      if (!std::holds_alternative<RuleDef>(element) &&
          !std::holds_alternative<FunctionDef>(element)) {
        continue;
      }
      if (marks[i] == Mark::None) visit(i);
    }
  }

  void bind_rule_ref(NameRef& ref, const StateSpaceDef& ss) {
    const auto it = spec_.index.find(ref.name);
    if (it == spec_.index.end()) {
      error("undefined reference '" + ref.name + "' in state space '" + ss.name + "'", ref.loc);
      return;
    }
    const auto& target = spec_.document.elements[it->second];
    if (!std::holds_alternative<RuleDef>(target)) {
      error("state space '" + ss.name + "' requires a rule, but '" + ref.name + "' is a " +
                std::string(element_keyword(target)),
            ref.loc);
      return;
    }
    ref.index = it->second;
  }

  void check_state_space(StateSpaceDef& ss) {
    for (auto& ref : ss.space_rules) bind_rule_ref(ref, ss);
    if (ss.states.empty()) error("state space '" + ss.name + "' declares no states", ss.loc);

    std::set<std::string> ids;
    std::map<std::string, std::string> markers;
    for (auto& state : ss.states) {
      if (!ids.insert(state.id).second) {
        error("duplicate state id '" + state.id + "' in '" + ss.name + "'", state.loc);
      }
      for (auto& ref : state.rule_refs) bind_rule_ref(ref, ss);
      if (state.rule_refs.empty()) {
        warning("state '" + state.id + "' has no rules and is satisfied vacuously", state.loc);
      }
      if (state.initial || state.final) {
        warning("initial/final annotation on state '" + state.id +
                    "' is ignored by evaluation",
                state.loc);
      }
      if (state.marker) {
        const auto [it, inserted] = markers.emplace(*state.marker, state.id);
        if (!inserted) {
          error("marker \"" + *state.marker + "\" used by both '" + it->second + "' and '" +
                    state.id + "'",
                state.loc);
        }
      }
    }

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& t : ss.transitions) {
      bool ok = true;
      for (const auto* end : {&t.from, &t.to}) {
        if (!ss.find_state(*end)) {
          error("transition endpoint '" + *end + "' is not a state of '" + ss.name + "'",
                t.loc);
          ok = false;
        }
      }
      if (!ok) continue;
      if (t.from == t.to) {
        warning("loop transition on '" + t.from + "' is ignored by evaluation", t.loc);
      }
      const auto key = std::minmax(t.from, t.to);
      if (!seen.emplace(key.first, key.second).second) {
        warning("duplicate transition " + t.from + " -- " + t.to, t.loc);
      }
    }
  }

  ResolvedSpec spec_;
  std::vector<Diagnostic> diagnostics_;
  std::map<std::size_t, std::set<std::size_t>> dependencies_;
};

void collect_characteristics(const Expr& e, const ResolvedSpec& spec,
                             std::set<std::string>& out) {
  if (e.kind == ExprKind::Satisfies) {
    const auto& ch = std::get<CharacteristicDef>(spec.element(e.ref_index));
    out.insert(ch.x_sensor);
    out.insert(ch.y_sensor);
  }
  for (const auto& op : e.operands) collect_characteristics(op, spec, out);
}

}  // namespace

const ElementDef* ResolvedSpec::find(std::string_view name) const {
  const auto it = index.find(std::string(name));
  return it == index.end() ? nullptr : &document.elements[it->second];
}

std::vector<const StateSpaceDef*> ResolvedSpec::state_spaces() const {
  std::vector<const StateSpaceDef*> out;
  for (const auto& e : document.elements) {
    if (const auto* ss = std::get_if<StateSpaceDef>(&e)) out.push_back(ss);
  }
  return out;
}

ResolveResult resolve_spec(SpecDocument doc) { return Resolver(std::move(doc)).run(); }

ResolveResult load_spec(std::string_view text, std::string source_name) {
  ParseResult parsed = parse_spec(text, std::move(source_name));
  if (!parsed.document) return {std::nullopt, std::move(parsed.diagnostics)};
  ResolveResult resolved = resolve_spec(std::move(*parsed.document));
  parsed.diagnostics.insert(parsed.diagnostics.end(), resolved.diagnostics.begin(),
                            resolved.diagnostics.end());
  resolved.diagnostics = std::move(parsed.diagnostics);
  return resolved;
}

std::set<std::string> required_sensor_ids(const ResolvedSpec& spec) {
  std::set<std::string> ids;
  for (const auto& element : spec.document.elements) {
    const ExprElement* e = nullptr;
    if (const auto* r = std::get_if<RuleDef>(&element)) e = r;
    if (const auto* f = std::get_if<FunctionDef>(&element)) e = f;
    if (!e) continue;
    for (const auto& b : e->sensors) ids.insert(b.bms_id);
    collect_characteristics(e->body, spec, ids);
  }
  return ids;
}

}  // namespace statemon
