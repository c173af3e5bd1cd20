#pragma once

// Scalar semantics shared by the reference walker and the column kernels.

#include <cmath>
#include <limits>

#include "statemon/ast.hpp"
#include "statemon/tristate.hpp"

namespace statemon::detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline bool is_logical_op(BinaryOp op) {
  return op == BinaryOp::And || op == BinaryOp::Or || op == BinaryOp::Implies;
}

inline bool is_comparison(BinaryOp op) {
  return op == BinaryOp::Eq || op == BinaryOp::Lt || op == BinaryOp::Gt || op == BinaryOp::Le ||
         op == BinaryOp::Ge;
}

inline TriState logical_op(BinaryOp op, TriState a, TriState b) {
  switch (op) {
    case BinaryOp::And: return tri_and(a, b);
    case BinaryOp::Or: return tri_or(a, b);
    default: return tri_implies(a, b);
  }
}

inline TriState compare(BinaryOp op, double a, double b, double eps) {
  if (std::isnan(a) || std::isnan(b)) return TriState::NoData;
  switch (op) {
    case BinaryOp::Eq: return tri_from_bool(std::abs(a - b) <= eps);
    case BinaryOp::Lt: return tri_from_bool(a < b);
    case BinaryOp::Gt: return tri_from_bool(a > b);
    case BinaryOp::Le: return tri_from_bool(a <= b + eps);
    default: return tri_from_bool(a >= b - eps);
  }
}

// NaN in, NaN out; division by zero and overflow are no-data as well.
inline double arithmetic(BinaryOp op, double a, double b) {
  double r;
  switch (op) {
    case BinaryOp::Add: r = a + b; break;
    case BinaryOp::Sub: r = a - b; break;
    case BinaryOp::Mul: r = a * b; break;
    default:
      if (b == 0.0) return kNaN;
      r = a / b;
  }
  return std::isfinite(r) ? r : kNaN;
}

/// Whether an expression of a resolved document yields a logical value.
bool yields_logical(const Expr& e);

}  // namespace statemon::detail
