#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gswcast/table.hpp"

namespace gswcast {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge, In };

std::string_view to_string(CmpOp op);

/// Boolean expression over dimension predicates. Immutable; copies share
/// structure.
class Constraint {
 public:
  enum class Kind { True, False, Compare, And, Or, Not };

  Constraint();  // TRUE

  static Constraint always();
  static Constraint never();
  static Constraint compare(std::string dim, CmpOp op, DimValue literal);
  static Constraint in(std::string dim, std::vector<DimValue> literals);
  static Constraint conj(Constraint a, Constraint b);
  static Constraint disj(Constraint a, Constraint b);
  static Constraint negate(Constraint a);

  Kind kind() const noexcept;
  const std::string& dim() const;
  CmpOp op() const;
  const std::vector<DimValue>& literals() const;
  const Constraint& left() const;   // And/Or lhs, Not operand
  const Constraint& right() const;  // And/Or rhs

  /// Dimensions referenced anywhere in the tree.
  std::vector<std::string> referenced_dims() const;

  /// Canonical text; `parse_constraint(c.to_string()) == c`.
  std::string to_string() const;

  friend bool operator==(const Constraint& a, const Constraint& b);

 private:
  struct Node;
  explicit Constraint(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses the WHERE-clause language: comparisons `dim op literal`,
/// `dim IN (lit, ...)`, AND/OR/NOT, parentheses, TRUE/FALSE. String
/// literals are single-quoted; keywords are case-insensitive.
Constraint parse_constraint(std::string_view text);

/// A constraint resolved against a table schema, ready for per-row evaluation.
class BoundConstraint {
 public:
  /// Throws UnknownDimension or TypeMismatch.
  static BoundConstraint bind(const Constraint& c, const TimeSeriesTable& schema);

  bool eval(const TimeSeriesTable& table, std::size_t row) const;
  bool always_true() const noexcept;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

/// Binds and evaluates in one step.
bool eval_constraint(const TimeSeriesTable& table, std::size_t row, const Constraint& c);

}  // namespace gswcast
