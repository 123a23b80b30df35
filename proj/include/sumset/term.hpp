#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "sumset/rational.hpp"

namespace sumset {

// Closed arithmetic expression over a single index variable n.
// Grammar: integer constants, n, +, -, *, /, ^. Exponents must evaluate to
// integers; everything evaluates exactly over the rationals.
class Term {
 public:
  enum class Op : std::uint8_t { Const, Var, Add, Sub, Mul, Div, Pow, Neg };

  Term() : Term(Op::Const) {}  // constant 0

  static Term constant(Rational v) {
    Term t(Op::Const);
    t.node_->value = std::move(v);
    return t;
  }
  static Term var() { return Term(Op::Var); }
  static Term add(Term a, Term b) { return binary(Op::Add, std::move(a), std::move(b)); }
  static Term sub(Term a, Term b) { return binary(Op::Sub, std::move(a), std::move(b)); }
  static Term mul(Term a, Term b) { return binary(Op::Mul, std::move(a), std::move(b)); }
  static Term div(Term a, Term b) { return binary(Op::Div, std::move(a), std::move(b)); }
  static Term pow(Term a, Term b) { return binary(Op::Pow, std::move(a), std::move(b)); }
  static Term neg(Term a) {
    Term t(Op::Neg);
    t.node_->lhs = std::make_shared<Term>(std::move(a));
    return t;
  }

  Op op() const { return node_->op; }

  Rational eval(std::int64_t n) const { return eval_node(*node_, n); }

  // Canonical text with minimal parentheses. pow is right-associative and binds
  // tightest, then * /, then + -. Matches what the DSL parser accepts.
  std::string render() const { return render_node(*node_, 0); }

  bool operator==(const Term& other) const { return render() == other.render(); }

 private:
  struct Node {
    Op op;
    Rational value;                // Const
    std::shared_ptr<Term> lhs, rhs;
    explicit Node(Op o) : op(o) {}
  };

  explicit Term(Op o) : node_(std::make_shared<Node>(o)) {}

  static Term binary(Op o, Term a, Term b) {
    Term t(o);
    t.node_->lhs = std::make_shared<Term>(std::move(a));
    t.node_->rhs = std::make_shared<Term>(std::move(b));
    return t;
  }

  static Rational eval_node(const Node& nd, std::int64_t n) {
    switch (nd.op) {
      case Op::Const: return nd.value;
      case Op::Var: return Rational(n);
      case Op::Neg: return -nd.lhs->eval(n);
      case Op::Add: return nd.lhs->eval(n) + nd.rhs->eval(n);
      case Op::Sub: return nd.lhs->eval(n) - nd.rhs->eval(n);
      case Op::Mul: return nd.lhs->eval(n) * nd.rhs->eval(n);
      case Op::Div: {
        Rational d = nd.rhs->eval(n);
        if (d == 0) throw Error("division by zero in index expression at n=" + std::to_string(n));
        return nd.lhs->eval(n) / d;
      }
      case Op::Pow: {
        Rational e = nd.rhs->eval(n);
        if (denominator(e) != 1) throw Error("non-integer exponent in index expression");
        BigInt ei = numerator(e);
        if (abs(ei) > 1048576) throw ResourceLimit("exponent magnitude cap (2^20) exceeded");
        return pow_rat(nd.lhs->eval(n), ei);
      }
    }
    throw Error("unreachable term op");
  }

  // Precedence: 1 = additive, 2 = multiplicative, 3 = power, 4 = atom.
  static int prec(Op o) {
    switch (o) {
      case Op::Add:
      case Op::Sub: return 1;
      case Op::Mul:
      case Op::Div: return 2;
      case Op::Pow: return 3;
      case Op::Neg: return 3;
      default: return 4;
    }
  }

  static std::string render_node(const Node& nd, int parent_prec) {
    std::string out;
    int p = prec(nd.op);
    switch (nd.op) {
      case Op::Const: {
        if (nd.value < 0) {
          out = "(" + to_string(nd.value) + ")";
          return out;
        }
        // Non-integer constants render as a division so they re-parse.
        return to_string(nd.value);
      }
      case Op::Var: return "n";
      case Op::Neg: out = "-" + render_node(*nd.lhs->node_, p); break;
      case Op::Add:
        out = render_node(*nd.lhs->node_, p) + "+" + render_node(*nd.rhs->node_, p + 1);
        break;
      case Op::Sub:
        out = render_node(*nd.lhs->node_, p) + "-" + render_node(*nd.rhs->node_, p + 1);
        break;
      case Op::Mul:
        out = render_node(*nd.lhs->node_, p) + "*" + render_node(*nd.rhs->node_, p + 1);
        break;
      case Op::Div:
        out = render_node(*nd.lhs->node_, p) + "/" + render_node(*nd.rhs->node_, p + 1);
        break;
      case Op::Pow:
        // Right-associative: left child needs parens at equal precedence.
        out = render_node(*nd.lhs->node_, p + 1) + "^" + render_node(*nd.rhs->node_, p);
        break;
    }
    if (p < parent_prec) out = "(" + out + ")";
    return out;
  }

  std::shared_ptr<Node> node_;
};

}  // namespace sumset
