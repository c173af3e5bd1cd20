#include <cstdint>

#include "eval/ops.hpp"
#include "statemon/evaluator.hpp"

namespace statemon {

namespace {

using detail::kNaN;

// Below this many cells the thread start-up costs more than the loop.
constexpr std::int64_t kParallelThreshold = 4096;

template <class F>
void for_cells(std::size_t n, F&& body) {
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
  for (std::int64_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace

const std::vector<TriState>& SeriesEvaluator::rule(std::size_t position) {
  if (const auto it = logical_cache_.find(position); it != logical_cache_.end()) return it->second;
  auto column = logical(std::get<RuleDef>(ctx_->spec().element(position)).body);
  return logical_cache_.emplace(position, std::move(column)).first->second;
}

const std::vector<double>& SeriesEvaluator::function(std::size_t position) {
  if (const auto it = numeric_cache_.find(position); it != numeric_cache_.end()) return it->second;
  auto column = numeric(std::get<FunctionDef>(ctx_->spec().element(position)).body);
  return numeric_cache_.emplace(position, std::move(column)).first->second;
}

const std::vector<TriState>& SeriesEvaluator::time_routine(std::size_t position) {
  if (const auto it = logical_cache_.find(position); it != logical_cache_.end()) return it->second;
  const auto& tr = std::get<TimeRoutineDef>(ctx_->spec().element(position));
  const CalendarIndex& cal = ctx_->calendar();
  std::vector<TriState> column(ctx_->grid().cell_count());
  for_cells(column.size(), [&](std::size_t i) {
    column[i] = tri_from_bool(time_routine_contains(tr, cal.seconds_of_day[i], cal.weekday[i]));
  });
  return logical_cache_.emplace(position, std::move(column)).first->second;
}

std::vector<TriState> SeriesEvaluator::logical(const Expr& e) {
  const std::size_t n = ctx_->grid().cell_count();
  switch (e.kind) {
    case ExprKind::BoolLiteral:
      return std::vector<TriState>(n, tri_from_bool(e.bool_value));
    case ExprKind::Ref:
      if (e.ref_kind == RefKind::Rule) return rule(e.ref_index);
      if (e.ref_kind == RefKind::TimeRoutine) return time_routine(e.ref_index);
      break;
    case ExprKind::Not: {
      auto column = logical(e.operands[0]);
      for_cells(n, [&](std::size_t i) { column[i] = tri_not(column[i]); });
      return column;
    }
    case ExprKind::Satisfies: {
      const auto& ch = std::get<CharacteristicDef>(ctx_->spec().element(e.ref_index));
      const TimeSeries* x = ctx_->sensor(ch.x_sensor);
      const TimeSeries* y = ctx_->sensor(ch.y_sensor);
      std::vector<TriState> column(n, TriState::NoData);
      if (!x || !y) return column;
      const double tol = ctx_->options().eq_eps;
      for_cells(n, [&](std::size_t i) {
        column[i] = eval_characteristic(ch, x->values[i], y->values[i], tol);
      });
      return column;
    }
    case ExprKind::Binary: {
      if (detail::is_logical_op(e.op)) {
        auto lhs = logical(e.operands[0]);
        const auto rhs = logical(e.operands[1]);
        const BinaryOp op = e.op;
        for_cells(n, [&](std::size_t i) { lhs[i] = detail::logical_op(op, lhs[i], rhs[i]); });
        return lhs;
      }
      if (detail::is_comparison(e.op)) {
        const auto lhs = numeric(e.operands[0]);
        const auto rhs = numeric(e.operands[1]);
        const BinaryOp op = e.op;
        const double eps = ctx_->options().eq_eps;
        std::vector<TriState> column(n);
        for_cells(n, [&](std::size_t i) { column[i] = detail::compare(op, lhs[i], rhs[i], eps); });
        return column;
      }
      break;
    }
    case ExprKind::If: {
      const auto cond = logical(e.operands[0]);
      const auto then_col = logical(e.operands[1]);
      const auto else_col = logical(e.operands[2]);
      std::vector<TriState> column(n);
      for_cells(n, [&](std::size_t i) {
        column[i] = cond[i] == TriState::Satisfied  ? then_col[i]
                    : cond[i] == TriState::Violated ? else_col[i]
                                                    : TriState::NoData;
      });
      return column;
    }
    default:
      break;
  }
  throw std::logic_error("expression is not logical");
}

std::vector<double> SeriesEvaluator::numeric(const Expr& e) {
  const std::size_t n = ctx_->grid().cell_count();
  switch (e.kind) {
    case ExprKind::NumberLiteral:
      return std::vector<double>(n, e.number);
    case ExprKind::Ref:
      switch (e.ref_kind) {
        case RefKind::Sensor: {
          const TimeSeries* s = ctx_->sensor(e.ref_index);
          return s ? s->values : std::vector<double>(n, kNaN);
        }
        case RefKind::Constant:
          return std::vector<double>(n, std::get<ConstantDef>(ctx_->spec().element(e.ref_index)).value);
        case RefKind::Function:
          return function(e.ref_index);
        default:
          break;
      }
      break;
    case ExprKind::Negate: {
      auto column = numeric(e.operands[0]);
      for_cells(n, [&](std::size_t i) { column[i] = -column[i]; });
      return column;
    }
    case ExprKind::Abs: {
      auto column = numeric(e.operands[0]);
      for_cells(n, [&](std::size_t i) { column[i] = std::abs(column[i]); });
      return column;
    }
    case ExprKind::Binary: {
      if (detail::is_logical_op(e.op) || detail::is_comparison(e.op)) break;
      auto lhs = numeric(e.operands[0]);
      const auto rhs = numeric(e.operands[1]);
      const BinaryOp op = e.op;
      for_cells(n, [&](std::size_t i) { lhs[i] = detail::arithmetic(op, lhs[i], rhs[i]); });
      return lhs;
    }
    case ExprKind::If: {
      const auto cond = logical(e.operands[0]);
      const auto then_col = numeric(e.operands[1]);
      const auto else_col = numeric(e.operands[2]);
      std::vector<double> column(n);
      for_cells(n, [&](std::size_t i) {
        column[i] = cond[i] == TriState::Satisfied  ? then_col[i]
                    : cond[i] == TriState::Violated ? else_col[i]
                                                    : kNaN;
      });
      return column;
    }
    default:
      break;
  }
  throw std::logic_error("expression is not numeric");
}

ElementSeries SeriesEvaluator::element(std::string_view name) {
  const ResolvedSpec& spec = ctx_->spec();
  const auto it = spec.index.find(std::string(name));
  if (it == spec.index.end()) {
    throw std::invalid_argument("unknown element '" + std::string(name) + "'");
  }
  const std::size_t pos = it->second;
  const ElementDef& element = spec.element(pos);
  const Grid& grid = ctx_->grid();
  const std::string id(name);
  if (std::holds_alternative<RuleDef>(element)) return TriStateSeries{id, grid, rule(pos)};
  if (std::holds_alternative<FunctionDef>(element)) return NumericSeries{id, grid, function(pos)};
  if (std::holds_alternative<TimeRoutineDef>(element)) {
    return TriStateSeries{id, grid, time_routine(pos)};
  }
  if (const auto* c = std::get_if<ConstantDef>(&element)) {
    return NumericSeries{id, grid, std::vector<double>(grid.cell_count(), c->value)};
  }
  throw std::invalid_argument("'" + id + "' is a " + std::string(element_keyword(element)) +
                              " and has no series of its own");
}

ElementSeries eval_element_series(std::string_view name, const EvalContext& ctx) {
  return SeriesEvaluator(ctx).element(name);
}

}  // namespace statemon
