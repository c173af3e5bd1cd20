#pragma once

// Syntax tree of the specification language.
//
// Elements live in one flat namespace. Expressions are value types; the
// resolver fills in the binding fields (ref_kind / ref_index) of a copy of
// the parsed document.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "statemon/diagnostic.hpp"

namespace statemon {

enum class ExprKind : std::uint8_t {
  BoolLiteral,
  NumberLiteral,
  Ref,
  Not,
  Negate,
  Abs,
  Satisfies,
  Binary,
  If,
};

enum class BinaryOp : std::uint8_t {
  And,
  Or,
  Implies,
  Eq,
  Lt,
  Gt,
  Le,
  Ge,
  Add,
  Sub,
  Mul,
  Div,
};

enum class RefKind : std::uint8_t {
  Unbound,
  Sensor,       // ref_index into ResolvedSpec::sensor_table
  Constant,     // ref_index = element position
  Rule,
  Function,
  TimeRoutine,
  Characteristic,  // only as the target of satisfies(...)
};

struct Expr {
  ExprKind kind = ExprKind::BoolLiteral;
  SourceLoc loc;
  bool bool_value = false;
  double number = 0.0;
  std::string name;  // Ref and Satisfies target
  BinaryOp op = BinaryOp::And;
  std::vector<Expr> operands;

  RefKind ref_kind = RefKind::Unbound;
  std::size_t ref_index = 0;

  static Expr boolean(bool value, SourceLoc loc = {});
  static Expr number_literal(double value, SourceLoc loc = {});
  static Expr ref(std::string name, SourceLoc loc = {});
  static Expr unary(ExprKind kind, Expr operand, SourceLoc loc = {});
  static Expr satisfies(std::string characteristic, SourceLoc loc = {});
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourceLoc loc = {});
  static Expr if_then_else(Expr cond, Expr then_branch, Expr else_branch, SourceLoc loc = {});
};

std::string_view to_string(BinaryOp op);

/// Equality of shape and payload; ignores source locations and bindings.
bool structurally_equal(const Expr& a, const Expr& b);

struct SensorBinding {
  std::string local_id;
  std::string bms_id;
  SourceLoc loc;
};

struct ExprElement {
  std::string name;
  std::vector<SensorBinding> sensors;
  Expr body;
  SourceLoc loc;
};

struct RuleDef : ExprElement {};
struct FunctionDef : ExprElement {};

struct ConstantDef {
  std::string name;
  double value = 0.0;
  SourceLoc loc;
};

/// Bit i set = weekday i, Monday = 0 .. Sunday = 6.
using DayMask = std::uint8_t;
inline constexpr DayMask kEveryDay = 0x7f;

struct DailyWindow {
  int start_minute = 0;  // 0..1439
  int end_minute = 0;    // 0..1440; start > end wraps midnight
  std::optional<DayMask> days;
  SourceLoc loc;
};

struct TimeRoutineDef {
  std::string name;
  std::vector<DailyWindow> windows;
  SourceLoc loc;
};

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

struct CharacteristicDef {
  std::string name;
  std::string x_sensor;
  std::string y_sensor;
  std::vector<CurvePoint> points;
  double margin = 0.0;
  SourceLoc loc;
};

enum class SpaceMode : std::uint8_t { Exclusive, Permissive };

std::string_view to_string(SpaceMode mode);
std::optional<SpaceMode> parse_space_mode(std::string_view text);

struct NameRef {
  std::string name;
  SourceLoc loc;
  std::size_t index = 0;  // element position once resolved
};

struct StateDef {
  std::string id;
  std::optional<std::string> marker;
  std::vector<NameRef> rule_refs;
  bool initial = false;
  bool final = false;
  SourceLoc loc;
};

struct TransitionDef {
  std::string from;
  std::string to;
  std::optional<std::string> note;
  SourceLoc loc;
};

struct StateSpaceDef {
  std::string name;
  SpaceMode mode = SpaceMode::Exclusive;
  std::vector<NameRef> space_rules;
  std::vector<StateDef> states;
  std::vector<TransitionDef> transitions;
  SourceLoc loc;

  const StateDef* find_state(std::string_view id) const;
};

using ElementDef = std::variant<RuleDef, FunctionDef, ConstantDef, TimeRoutineDef,
                                CharacteristicDef, StateSpaceDef>;

std::string_view element_name(const ElementDef& element);
SourceLoc element_loc(const ElementDef& element);
/// The DSL keyword introducing this element kind ("rule", "constant", ...).
std::string_view element_keyword(const ElementDef& element);

struct SpecDocument {
  std::vector<ElementDef> elements;
  std::string source_name;
};

bool structurally_equal(const SpecDocument& a, const SpecDocument& b);

}  // namespace statemon
