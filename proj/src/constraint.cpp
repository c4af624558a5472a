#include "gswcast/constraint.hpp"

#include <algorithm>

#include "gswcast/error.hpp"
#include "lexer.hpp"

namespace gswcast {

struct Constraint::Node {
  Kind kind = Kind::True;
  std::string dim;
  CmpOp op = CmpOp::Eq;
  std::vector<DimValue> literals;
  Constraint lhs;
  Constraint rhs;
};

namespace {

int precedence(Constraint::Kind k) {
  switch (k) {
    case Constraint::Kind::Or: return 1;
    case Constraint::Kind::And: return 2;
    default: return 3;
  }
}

std::string literal_text(const DimValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  std::string out = "'";
  for (char c : std::get<std::string>(v)) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

}  // namespace

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::In: return "IN";
  }
  return "?";
}

Constraint::Constraint() : node_(nullptr) {}

Constraint Constraint::always() { return Constraint(); }

Constraint Constraint::never() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::False;
  return Constraint(std::move(n));
}

Constraint Constraint::compare(std::string dim, CmpOp op, DimValue literal) {
  if (op == CmpOp::In) return in(std::move(dim), {std::move(literal)});
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compare;
  n->dim = std::move(dim);
  n->op = op;
  n->literals.push_back(std::move(literal));
  return Constraint(std::move(n));
}

Constraint Constraint::in(std::string dim, std::vector<DimValue> literals) {
  if (literals.empty()) throw Error(ErrorCode::InvalidArgument, "IN list must not be empty");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compare;
  n->dim = std::move(dim);
  n->op = CmpOp::In;
  n->literals = std::move(literals);
  return Constraint(std::move(n));
}

Constraint Constraint::conj(Constraint a, Constraint b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return Constraint(std::move(n));
}

Constraint Constraint::disj(Constraint a, Constraint b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return Constraint(std::move(n));
}

Constraint Constraint::negate(Constraint a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->lhs = std::move(a);
  return Constraint(std::move(n));
}

Constraint::Kind Constraint::kind() const noexcept { return node_ ? node_->kind : Kind::True; }

const std::string& Constraint::dim() const {
  if (kind() != Kind::Compare) throw Error(ErrorCode::InvalidArgument, "not a comparison");
  return node_->dim;
}

CmpOp Constraint::op() const {
  if (kind() != Kind::Compare) throw Error(ErrorCode::InvalidArgument, "not a comparison");
  return node_->op;
}

const std::vector<DimValue>& Constraint::literals() const {
  if (kind() != Kind::Compare) throw Error(ErrorCode::InvalidArgument, "not a comparison");
  return node_->literals;
}

const Constraint& Constraint::left() const {
  auto k = kind();
  if (k != Kind::And && k != Kind::Or && k != Kind::Not) throw Error(ErrorCode::InvalidArgument, "no operand");
  return node_->lhs;
}

const Constraint& Constraint::right() const {
  auto k = kind();
  if (k != Kind::And && k != Kind::Or) throw Error(ErrorCode::InvalidArgument, "no right operand");
  return node_->rhs;
}

std::vector<std::string> Constraint::referenced_dims() const {
  std::vector<std::string> out;
  auto walk = [&](auto&& self, const Constraint& c) -> void {
    switch (c.kind()) {
      case Kind::Compare:
        if (std::find(out.begin(), out.end(), c.dim()) == out.end()) out.push_back(c.dim());
        break;
      case Kind::And:
      case Kind::Or:
        self(self, c.left());
        self(self, c.right());
        break;
      case Kind::Not:
        self(self, c.left());
        break;
      default:
        break;
    }
  };
  walk(walk, *this);
  return out;
}

std::string Constraint::to_string() const {
  switch (kind()) {
    case Kind::True: return "TRUE";
    case Kind::False: return "FALSE";
    case Kind::Compare: {
      if (node_->op == CmpOp::In) {
        std::string out = node_->dim + " IN (";
        for (std::size_t i = 0; i < node_->literals.size(); ++i) {
          if (i) out += ", ";
          out += literal_text(node_->literals[i]);
        }
        return out + ")";
      }
      return node_->dim + " " + std::string(gswcast::to_string(node_->op)) + " " + literal_text(node_->literals[0]);
    }
    case Kind::Not: {
      const auto& a = node_->lhs;
      return precedence(a.kind()) < 3 ? "NOT (" + a.to_string() + ")" : "NOT " + a.to_string();
    }
    case Kind::And:
    case Kind::Or: {
      const int p = precedence(kind());
      std::string l = node_->lhs.to_string();
      std::string r = node_->rhs.to_string();
      if (precedence(node_->lhs.kind()) < p) l = "(" + l + ")";
      if (precedence(node_->rhs.kind()) <= p) r = "(" + r + ")";
      return l + (kind() == Kind::And ? " AND " : " OR ") + r;
    }
  }
  return "TRUE";
}

bool operator==(const Constraint& a, const Constraint& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Constraint::Kind::True:
    case Constraint::Kind::False:
      return true;
    case Constraint::Kind::Compare:
      return a.dim() == b.dim() && a.op() == b.op() && a.literals() == b.literals();
    case Constraint::Kind::Not:
      return a.left() == b.left();
    case Constraint::Kind::And:
    case Constraint::Kind::Or:
      return a.left() == b.left() && a.right() == b.right();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {
namespace {

DimValue parse_literal(Lexer& lex) {
  if (lex.peek().kind == Tok::String) return lex.next().text;
  return lex.expect_int("integer or quoted string literal");
}

Constraint parse_or(Lexer& lex);

Constraint parse_primary(Lexer& lex) {
  if (lex.is_keyword("NOT")) {
    lex.next();
    return Constraint::negate(parse_primary(lex));
  }
  if (lex.is_keyword("TRUE")) {
    lex.next();
    return Constraint::always();
  }
  if (lex.is_keyword("FALSE")) {
    lex.next();
    return Constraint::never();
  }
  if (lex.is_symbol("(")) {
    lex.next();
    Constraint inner = parse_or(lex);
    lex.expect_symbol(")");
    return inner;
  }
  if (lex.peek().kind != Tok::Ident || lex.is_keyword("AND") || lex.is_keyword("OR")) {
    throw SyntaxError(lex.peek().pos, "dimension name, NOT, TRUE, FALSE or '('");
  }
  std::string dim = lex.next().text;
  if (lex.is_keyword("IN")) {
    lex.next();
    lex.expect_symbol("(");
    std::vector<DimValue> lits;
    lits.push_back(parse_literal(lex));
    while (lex.is_symbol(",")) {
      lex.next();
      lits.push_back(parse_literal(lex));
    }
    lex.expect_symbol(")");
    return Constraint::in(std::move(dim), std::move(lits));
  }
  const auto& t = lex.peek();
  CmpOp op;
  if (t.kind != Tok::Symbol) throw SyntaxError(t.pos, "comparison operator");
  if (t.text == "=") {
    op = CmpOp::Eq;
  } else if (t.text == "!=" || t.text == "<>") {
    op = CmpOp::Ne;
  } else if (t.text == "<") {
    op = CmpOp::Lt;
  } else if (t.text == "<=") {
    op = CmpOp::Le;
  } else if (t.text == ">") {
    op = CmpOp::Gt;
  } else if (t.text == ">=") {
    op = CmpOp::Ge;
  } else {
    throw SyntaxError(t.pos, "comparison operator");
  }
  lex.next();
  return Constraint::compare(std::move(dim), op, parse_literal(lex));
}

Constraint parse_and(Lexer& lex) {
  Constraint c = parse_primary(lex);
  while (lex.is_keyword("AND")) {
    lex.next();
    c = Constraint::conj(std::move(c), parse_primary(lex));
  }
  return c;
}

Constraint parse_or(Lexer& lex) {
  Constraint c = parse_and(lex);
  while (lex.is_keyword("OR")) {
    lex.next();
    c = Constraint::disj(std::move(c), parse_and(lex));
  }
  return c;
}

}  // namespace

Constraint parse_constraint_expr(Lexer& lex) { return parse_or(lex); }

}  // namespace detail

Constraint parse_constraint(std::string_view text) {
  detail::Lexer lex(text);
  Constraint c = detail::parse_constraint_expr(lex);
  if (lex.peek().kind != detail::Tok::End) throw SyntaxError(lex.peek().pos, "end of constraint");
  return c;
}

// ---------------------------------------------------------------------------
// Binding and evaluation

struct BoundConstraint::Node {
  Constraint::Kind kind = Constraint::Kind::True;
  std::size_t dim = 0;
  DimType type = DimType::Int;
  CmpOp op = CmpOp::Eq;
  std::vector<std::int64_t> ints;
  std::vector<std::string> strings;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

template <typename T>
bool compare_values(const T& v, CmpOp op, const std::vector<T>& lits) {
  switch (op) {
    case CmpOp::Eq: return v == lits[0];
    case CmpOp::Ne: return v != lits[0];
    case CmpOp::Lt: return v < lits[0];
    case CmpOp::Le: return v <= lits[0];
    case CmpOp::Gt: return v > lits[0];
    case CmpOp::Ge: return v >= lits[0];
    case CmpOp::In: return std::find(lits.begin(), lits.end(), v) != lits.end();
  }
  return false;
}

bool eval_node(const BoundConstraint::Node& n, const TimeSeriesTable& t, std::size_t row) {
  using K = Constraint::Kind;
  switch (n.kind) {
    case K::True: return true;
    case K::False: return false;
    case K::Compare: {
      const auto& col = t.dims()[n.dim];
      if (n.type == DimType::Int) return compare_values(col.ints[row], n.op, n.ints);
      return compare_values(col.strings[row], n.op, n.strings);
    }
    case K::And: return eval_node(*n.lhs, t, row) && eval_node(*n.rhs, t, row);
    case K::Or: return eval_node(*n.lhs, t, row) || eval_node(*n.rhs, t, row);
    case K::Not: return !eval_node(*n.lhs, t, row);
  }
  return false;
}

std::shared_ptr<const BoundConstraint::Node> bind_node(const Constraint& c, const TimeSeriesTable& schema) {
  using K = Constraint::Kind;
  auto n = std::make_shared<BoundConstraint::Node>();
  n->kind = c.kind();
  switch (c.kind()) {
    case K::True:
    case K::False:
      break;
    case K::Compare: {
      n->dim = schema.dim_index(c.dim());
      n->type = schema.dims()[n->dim].type;
      n->op = c.op();
      for (const auto& lit : c.literals()) {
        if (n->type == DimType::Int) {
          const auto* i = std::get_if<std::int64_t>(&lit);
          if (!i) throw Error(ErrorCode::TypeMismatch, c.dim() + " is an integer dimension, literal " + dim_value_text(lit));
          n->ints.push_back(*i);
        } else {
          const auto* s = std::get_if<std::string>(&lit);
          if (!s) throw Error(ErrorCode::TypeMismatch, c.dim() + " is a string dimension, literal " + dim_value_text(lit));
          n->strings.push_back(*s);
        }
      }
      break;
    }
    case K::And:
    case K::Or:
      n->lhs = bind_node(c.left(), schema);
      n->rhs = bind_node(c.right(), schema);
      break;
    case K::Not:
      n->lhs = bind_node(c.left(), schema);
      break;
  }
  return n;
}

}  // namespace

BoundConstraint BoundConstraint::bind(const Constraint& c, const TimeSeriesTable& schema) {
  BoundConstraint b;
  b.root_ = bind_node(c, schema);
  return b;
}

bool BoundConstraint::eval(const TimeSeriesTable& table, std::size_t row) const {
  return !root_ || eval_node(*root_, table, row);
}

bool BoundConstraint::always_true() const noexcept { return !root_ || root_->kind == Constraint::Kind::True; }

bool eval_constraint(const TimeSeriesTable& table, std::size_t row, const Constraint& c) {
  return BoundConstraint::bind(c, table).eval(table, row);
}

}  // namespace gswcast
