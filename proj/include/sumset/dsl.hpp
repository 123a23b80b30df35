#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sumset/errors.hpp"
#include "sumset/set_expr.hpp"

namespace sumset {

// Textual form of SetExpr. parse(render(e)) reproduces e up to normalization
// (flattened unions, sorted finite sets, merged unit intervals, reduced
// rationals). Unions render right-nested so the output stays within the
// binary surface grammar.
//
//   cong(3, 0)
//   finite{4, 9, 11}
//   intervals(n>=1; 4^n, (2-1/n)*4^n)
//   logfrac(1/2; [0,3/8), [2/3,1))
//   union(A, B)   inter(A, B)   diff(A, B)   compl(A)   shift(A, -2)

namespace dsl_detail {

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' ||
                                src[pos] == '\r'))
      ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool try_consume(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!try_consume(c))
      throw ParseError(pos, std::string("expected '") + c + "' " + what);
  }

  bool try_keyword(std::string_view kw) {
    skip_ws();
    if (src.substr(pos, kw.size()) == kw) {
      // Keywords are followed by a non-identifier character.
      std::size_t after = pos + kw.size();
      if (after < src.size() && (std::isalnum(static_cast<unsigned char>(src[after])) ||
                                 src[after] == '_'))
        return false;
      pos = after;
      return true;
    }
    return false;
  }

  std::uint64_t read_uint(const char* what) {
    skip_ws();
    std::size_t start = pos;
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(src.data() + pos, src.data() + src.size(), v);
    if (ec != std::errc{} || p == src.data() + pos)
      throw ParseError(start, std::string("expected integer for ") + what);
    pos = static_cast<std::size_t>(p - src.data());
    return v;
  }

  std::int64_t read_int(const char* what) {
    skip_ws();
    bool neg = try_consume('-');
    std::uint64_t v = read_uint(what);
    if (v > static_cast<std::uint64_t>(INT64_MAX))
      throw ParseError(pos, std::string(what) + " out of range");
    return neg ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
  }
};

struct Parser {
  Lexer lex;

  // term := additive over {integers, n, + - * / ^}; if allow_var is false the
  // expression must be constant (used for rationals in logfrac).
  Term parse_term(bool allow_var) { return parse_additive(allow_var); }

  Term parse_additive(bool allow_var) {
    Term t = parse_multiplicative(allow_var);
    while (true) {
      if (lex.try_consume('+'))
        t = Term::add(std::move(t), parse_multiplicative(allow_var));
      else if (lex.try_consume('-'))
        t = Term::sub(std::move(t), parse_multiplicative(allow_var));
      else
        return t;
    }
  }

  Term parse_multiplicative(bool allow_var) {
    Term t = parse_unary(allow_var);
    while (true) {
      if (lex.try_consume('*'))
        t = Term::mul(std::move(t), parse_unary(allow_var));
      else if (lex.try_consume('/'))
        t = Term::div(std::move(t), parse_unary(allow_var));
      else
        return t;
    }
  }

  Term parse_unary(bool allow_var) {
    if (lex.try_consume('-')) return Term::neg(parse_unary(allow_var));
    return parse_power(allow_var);
  }

  Term parse_power(bool allow_var) {
    Term base = parse_atom(allow_var);
    if (lex.try_consume('^')) return Term::pow(std::move(base), parse_unary(allow_var));
    return base;
  }

  Term parse_atom(bool allow_var) {
    if (lex.try_consume('(')) {
      Term t = parse_additive(allow_var);
      lex.expect(')', "closing arithmetic group");
      return t;
    }
    char c = lex.peek();
    if (c == 'n') {
      if (!allow_var)
        throw ParseError(lex.pos, "index variable n not allowed in a constant");
      ++lex.pos;
      return Term::var();
    }
    if (std::isdigit(static_cast<unsigned char>(c)))
      return Term::constant(Rational(BigInt(lex.read_uint("number"))));
    throw ParseError(lex.pos, "expected number, n, or parenthesized expression");
  }

  Rational parse_rational(const char* what) {
    std::size_t at = lex.pos;
    Term t = parse_term(false);
    try {
      return t.eval(0);
    } catch (const Error& e) {
      throw ParseError(at, std::string("bad constant for ") + what + ": " + e.what());
    }
  }

  SetExpr parse_expr() {
    std::size_t at = lex.pos;
    if (lex.try_keyword("cong")) {
      lex.expect('(', "after cong");
      std::uint64_t m = lex.read_uint("modulus");
      lex.expect(',', "between modulus and residue");
      std::uint64_t r = lex.read_uint("residue");
      lex.expect(')', "after cong arguments");
      try {
        return SetExpr::congruence(m, r);
      } catch (const Error& e) {
        throw ParseError(at, e.what());
      }
    }
    if (lex.try_keyword("finite")) {
      lex.expect('{', "after finite");
      std::vector<std::uint64_t> elems;
      if (!lex.try_consume('}')) {
        elems.push_back(lex.read_uint("element"));
        while (lex.try_consume(',')) elems.push_back(lex.read_uint("element"));
        lex.expect('}', "after finite elements");
      }
      return SetExpr::finite(std::move(elems));
    }
    if (lex.try_keyword("intervals")) {
      lex.expect('(', "after intervals");
      if (!lex.try_keyword("n")) throw ParseError(lex.pos, "expected index variable n");
      lex.expect('>', "in n>=1");
      lex.expect('=', "in n>=1");
      if (lex.read_uint("index start") != 1)
        throw ParseError(at, "interval families are indexed from n>=1");
      lex.expect(';', "before interval bounds");
      Term lo = parse_term(true);
      lex.expect(',', "between interval bounds");
      Term hi = parse_term(true);
      std::uint64_t mono = 1;
      if (lex.try_consume(';')) {
        if (!lex.try_keyword("mono")) throw ParseError(lex.pos, "expected mono=K");
        lex.expect('=', "in mono=K");
        mono = lex.read_uint("monotonicity witness");
      }
      lex.expect(')', "after interval family");
      try {
        return SetExpr::interval_family(std::move(lo), std::move(hi), mono);
      } catch (const Error& e) {
        throw ParseError(at, e.what());
      }
    }
    if (lex.try_keyword("logfrac")) {
      lex.expect('(', "after logfrac");
      Rational theta = parse_rational("theta");
      lex.expect(';', "before unit intervals");
      std::vector<UnitInterval> u;
      do {
        lex.expect('[', "opening unit interval");
        Rational a = parse_rational("interval endpoint");
        lex.expect(',', "between interval endpoints");
        Rational b = parse_rational("interval endpoint");
        lex.expect(')', "closing unit interval");
        u.push_back({std::move(a), std::move(b)});
      } while (lex.try_consume(','));
      lex.expect(')', "after logfrac");
      try {
        return SetExpr::log_fractional(std::move(theta), std::move(u));
      } catch (const Error& e) {
        throw ParseError(at, e.what());
      }
    }
    if (lex.try_keyword("union")) {
      lex.expect('(', "after union");
      std::vector<SetExpr> kids;
      kids.push_back(parse_expr());
      while (lex.try_consume(',')) kids.push_back(parse_expr());
      lex.expect(')', "after union operands");
      if (kids.size() < 2) throw ParseError(at, "union needs at least two operands");
      return SetExpr::set_union(std::move(kids));
    }
    if (lex.try_keyword("inter")) {
      lex.expect('(', "after inter");
      SetExpr a = parse_expr();
      lex.expect(',', "between inter operands");
      SetExpr b = parse_expr();
      lex.expect(')', "after inter operands");
      return SetExpr::intersection(std::move(a), std::move(b));
    }
    if (lex.try_keyword("diff")) {
      lex.expect('(', "after diff");
      SetExpr a = parse_expr();
      lex.expect(',', "between diff operands");
      SetExpr b = parse_expr();
      lex.expect(')', "after diff operands");
      return SetExpr::difference(std::move(a), std::move(b));
    }
    if (lex.try_keyword("compl")) {
      lex.expect('(', "after compl");
      SetExpr a = parse_expr();
      lex.expect(')', "after compl operand");
      return SetExpr::complement(std::move(a));
    }
    if (lex.try_keyword("shift")) {
      lex.expect('(', "after shift");
      SetExpr a = parse_expr();
      lex.expect(',', "between shift operands");
      std::int64_t t = lex.read_int("shift amount");
      lex.expect(')', "after shift operands");
      return SetExpr::shift(std::move(a), t);
    }
    throw ParseError(at, "expected a set constructor (cong, finite, intervals, logfrac, "
                         "union, inter, diff, compl, shift)");
  }
};

}  // namespace dsl_detail

inline SetExpr parse(std::string_view text) {
  dsl_detail::Parser p{dsl_detail::Lexer{text}};
  SetExpr e = p.parse_expr();
  if (!p.lex.eof()) throw ParseError(p.lex.pos, "trailing input after expression");
  return e;
}

inline std::string render(const SetExpr& e) {
  using Kind = SetExpr::Kind;
  switch (e.kind()) {
    case Kind::Congruence:
      return "cong(" + std::to_string(e.cong_mod()) + "," + std::to_string(e.cong_res()) + ")";
    case Kind::FiniteSet: {
      std::string out = "finite{";
      const auto& v = e.finite_elems();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
      }
      return out + "}";
    }
    case Kind::IntervalFamily: {
      std::string out = "intervals(n>=1; " + e.family_lo().render() + ", " +
                        e.family_hi().render();
      if (e.family_mono_from() > 1) out += "; mono=" + std::to_string(e.family_mono_from());
      return out + ")";
    }
    case Kind::LogFractional: {
      std::string out = "logfrac(" + to_string(e.lf_theta()) + "; ";
      const auto& u = e.lf_intervals();
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (i) out += ",";
        out += "[" + to_string(u[i].a) + "," + to_string(u[i].b) + ")";
      }
      return out + ")";
    }
    case Kind::Union: {
      // Right-nested to stay within the binary grammar.
      const auto& kids = e.children();
      std::string out;
      for (std::size_t i = 0; i + 1 < kids.size(); ++i) out += "union(" + render(kids[i]) + ", ";
      out += render(kids.back());
      for (std::size_t i = 0; i + 1 < kids.size(); ++i) out += ")";
      return out;
    }
    case Kind::Intersection:
      return "inter(" + render(e.children()[0]) + ", " + render(e.children()[1]) + ")";
    case Kind::Difference:
      return "diff(" + render(e.children()[0]) + ", " + render(e.children()[1]) + ")";
    case Kind::Complement:
      return "compl(" + render(e.children()[0]) + ")";
    case Kind::Shift:
      return "shift(" + render(e.children()[0]) + ", " + std::to_string(e.shift_t()) + ")";
  }
  throw Error("unreachable render");
}

}  // namespace sumset
