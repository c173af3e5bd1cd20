#include <algorithm>

#include "eval/ops.hpp"
#include "statemon/evaluator.hpp"

namespace statemon {

namespace detail {

bool yields_logical(const Expr& e) {
  switch (e.kind) {
    case ExprKind::BoolLiteral:
    case ExprKind::Not:
    case ExprKind::Satisfies:
      return true;
    case ExprKind::NumberLiteral:
    case ExprKind::Negate:
    case ExprKind::Abs:
      return false;
    case ExprKind::Binary:
      return is_logical_op(e.op) || is_comparison(e.op);
    case ExprKind::Ref:
      return e.ref_kind == RefKind::Rule || e.ref_kind == RefKind::TimeRoutine;
    case ExprKind::If:
      return yields_logical(e.operands[1]);
  }
  return false;
}

}  // namespace detail

namespace {

using detail::kNaN;

bool in_segment(int s, int from, int to) { return s >= from && s < to; }

TriState as_tri(const Value& v) { return std::get<TriState>(v); }
double as_num(const Value& v) { return std::get<double>(v); }

Value eval_at(const Expr& e, const EvalContext& ctx, std::size_t cell);

Value eval_ref(const Expr& e, const EvalContext& ctx, std::size_t cell) {
  const ResolvedSpec& spec = ctx.spec();
  switch (e.ref_kind) {
    case RefKind::Sensor: {
      const TimeSeries* s = ctx.sensor(e.ref_index);
      return s ? s->values[cell] : kNaN;
    }
    case RefKind::Constant:
      return std::get<ConstantDef>(spec.element(e.ref_index)).value;
    case RefKind::Rule:
      return eval_at(std::get<RuleDef>(spec.element(e.ref_index)).body, ctx, cell);
    case RefKind::Function:
      return eval_at(std::get<FunctionDef>(spec.element(e.ref_index)).body, ctx, cell);
    case RefKind::TimeRoutine:
      return tri_from_bool(eval_time_routine(
          std::get<TimeRoutineDef>(spec.element(e.ref_index)), ctx.grid().at(cell), ctx.zone()));
    default:
      throw std::logic_error("unbound reference '" + e.name + "'");
  }
}

Value eval_at(const Expr& e, const EvalContext& ctx, std::size_t cell) {
  switch (e.kind) {
    case ExprKind::BoolLiteral:
      return tri_from_bool(e.bool_value);
    case ExprKind::NumberLiteral:
      return e.number;
    case ExprKind::Ref:
      return eval_ref(e, ctx, cell);
    case ExprKind::Not:
      return tri_not(as_tri(eval_at(e.operands[0], ctx, cell)));
    case ExprKind::Negate:
      return -as_num(eval_at(e.operands[0], ctx, cell));
    case ExprKind::Abs:
      return std::abs(as_num(eval_at(e.operands[0], ctx, cell)));
    case ExprKind::Satisfies: {
      const auto& ch = std::get<CharacteristicDef>(ctx.spec().element(e.ref_index));
      const TimeSeries* x = ctx.sensor(ch.x_sensor);
      const TimeSeries* y = ctx.sensor(ch.y_sensor);
      if (!x || !y) return TriState::NoData;
      return eval_characteristic(ch, x->values[cell], y->values[cell], ctx.options().eq_eps);
    }
    case ExprKind::Binary: {
      const Value a = eval_at(e.operands[0], ctx, cell);
      const Value b = eval_at(e.operands[1], ctx, cell);
      if (detail::is_logical_op(e.op)) return detail::logical_op(e.op, as_tri(a), as_tri(b));
      if (detail::is_comparison(e.op)) {
        return detail::compare(e.op, as_num(a), as_num(b), ctx.options().eq_eps);
      }
      return detail::arithmetic(e.op, as_num(a), as_num(b));
    }
    case ExprKind::If: {
      const TriState c = as_tri(eval_at(e.operands[0], ctx, cell));
      if (c == TriState::Satisfied) return eval_at(e.operands[1], ctx, cell);
      if (c == TriState::Violated) return eval_at(e.operands[2], ctx, cell);
      return detail::yields_logical(e) ? Value(TriState::NoData) : Value(kNaN);
    }
  }
  throw std::logic_error("unknown expression kind");
}

}  // namespace

Value eval_expr(const Expr& expr, const EvalContext& ctx, std::size_t cell) {
  return eval_at(expr, ctx, cell);
}

bool time_routine_contains(const TimeRoutineDef& routine, int seconds_of_day, int weekday) {
  const bool day_ok_base = weekday >= 0 && weekday < 7;
  for (const auto& w : routine.windows) {
    const DayMask days = w.days.value_or(kEveryDay);
    if (!day_ok_base || !(days & (1u << weekday))) continue;
    const int from = w.start_minute * 60;
    const int to = w.end_minute * 60;
    if (from < to) {
      if (in_segment(seconds_of_day, from, to)) return true;
    } else if (from > to) {
      if (in_segment(seconds_of_day, from, 86400) || in_segment(seconds_of_day, 0, to)) return true;
    }
  }
  return false;
}

bool eval_time_routine(const TimeRoutineDef& routine, Timestamp at, const TimeZone& zone) {
  const LocalTime local = zone.to_local(at);
  return time_routine_contains(routine, local.seconds_of_day, local.weekday);
}

std::optional<double> characteristic_curve(const CharacteristicDef& ch, double x) {
  const auto& p = ch.points;
  if (p.size() < 2 || std::isnan(x) || x < p.front().x || x > p.back().x) return std::nullopt;
  auto hi = std::lower_bound(p.begin(), p.end(), x,
                             [](const CurvePoint& c, double v) { return c.x < v; });
  if (hi == p.begin()) return hi->y;
  if (hi->x == x) return hi->y;
  const auto lo = hi - 1;
  return lo->y + (hi->y - lo->y) * (x - lo->x) / (hi->x - lo->x);
}

TriState eval_characteristic(const CharacteristicDef& ch, double x, double y, double tolerance) {
  if (std::isnan(y)) return TriState::NoData;
  const auto fx = characteristic_curve(ch, x);
  if (!fx) return TriState::NoData;
  return tri_from_bool(std::abs(y - *fx) <= ch.margin + tolerance);
}

ElementSeries eval_element_series_reference(std::string_view name, const EvalContext& ctx) {
  const ElementDef* element = ctx.spec().find(name);
  if (!element) throw std::invalid_argument("unknown element '" + std::string(name) + "'");
  const Grid& grid = ctx.grid();
  const std::size_t n = grid.cell_count();
  const std::string id(name);

  if (const auto* r = std::get_if<RuleDef>(element)) {
    TriStateSeries out{id, grid, std::vector<TriState>(n)};
    for (std::size_t i = 0; i < n; ++i) out.cells[i] = as_tri(eval_at(r->body, ctx, i));
    return out;
  }
  if (const auto* f = std::get_if<FunctionDef>(element)) {
    NumericSeries out{id, grid, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) out.values[i] = as_num(eval_at(f->body, ctx, i));
    return out;
  }
  if (const auto* c = std::get_if<ConstantDef>(element)) {
    return NumericSeries{id, grid, std::vector<double>(n, c->value)};
  }
  if (const auto* tr = std::get_if<TimeRoutineDef>(element)) {
    TriStateSeries out{id, grid, std::vector<TriState>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      out.cells[i] = tri_from_bool(eval_time_routine(*tr, grid.at(i), ctx.zone()));
    }
    return out;
  }
  throw std::invalid_argument("'" + id + "' is a " + std::string(element_keyword(*element)) +
                              " and has no series of its own");
}

}  // namespace statemon
