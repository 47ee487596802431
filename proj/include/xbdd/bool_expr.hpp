/// @file  bool_expr.hpp
/// @brief Boolean expressions for update functions
///
/// Grammar, loosest binding first:
///
///     expr    := or ('->' expr)?             right associative
///     or      := and (('|' | '^') and)*
///     and     := unary ('&' unary)*
///     unary   := '!' unary | atom
///     atom    := identifier | '0' | '1' | '(' expr ')'

#pragma once

#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "apply.hpp"
#include "builder.hpp"

namespace xbdd {

class bool_expr {
public:
  enum class kind { var, constant, not_, and_, or_, xor_, implies };

  static bool_expr variable(std::string name) { return bool_expr(kind::var, std::move(name), false, {}); }
  static bool_expr constant(bool v) { return bool_expr(kind::constant, {}, v, {}); }
  static bool_expr negate(bool_expr e) { return bool_expr(kind::not_, {}, false, {std::move(e)}); }
  static bool_expr binary(kind k, bool_expr a, bool_expr b) {
    return bool_expr(k, {}, false, {std::move(a), std::move(b)});
  }

  kind what() const noexcept { return _n->k; }
  const std::string &name() const noexcept { return _n->name; }
  bool value() const noexcept { return _n->value; }
  const bool_expr &operand(std::size_t i) const { return _n->operands.at(i); }
  std::size_t arity() const noexcept { return _n->operands.size(); }

  bool eval(const std::function<bool(const std::string &)> &lookup) const {
    switch (what()) {
    case kind::var: return lookup(name());
    case kind::constant: return value();
    case kind::not_: return !operand(0).eval(lookup);
    case kind::and_: return operand(0).eval(lookup) && operand(1).eval(lookup);
    case kind::or_: return operand(0).eval(lookup) || operand(1).eval(lookup);
    case kind::xor_: return operand(0).eval(lookup) != operand(1).eval(lookup);
    case kind::implies: return !operand(0).eval(lookup) || operand(1).eval(lookup);
    }
    return false;
  }

  void collect_support(std::set<std::string> &out) const {
    if (what() == kind::var)
      out.insert(name());
    for (const bool_expr &o : _n->operands)
      o.collect_support(out);
  }
  std::set<std::string> support() const {
    std::set<std::string> s;
    collect_support(s);
    return s;
  }

  /// Text that parses back to the same tree
  std::string to_string() const { return print(0); }

  friend bool operator==(const bool_expr &a, const bool_expr &b) {
    if (a.what() != b.what() || a.name() != b.name() || a.value() != b.value() ||
        a.arity() != b.arity())
      return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (!(a.operand(i) == b.operand(i)))
        return false;
    return true;
  }

private:
  struct node_t {
    kind k;
    std::string name;
    bool value;
    std::vector<bool_expr> operands;
  };

  bool_expr(kind k, std::string name, bool value, std::vector<bool_expr> operands)
      : _n(std::make_shared<const node_t>(node_t{k, std::move(name), value, std::move(operands)})) {}

  static int precedence(kind k) {
    switch (k) {
    case kind::implies: return 1;
    case kind::or_:
    case kind::xor_: return 2;
    case kind::and_: return 3;
    case kind::not_: return 4;
    default: return 5;
    }
  }

  std::string print(int context) const {
    const int p = precedence(what());
    std::string s;
    switch (what()) {
    case kind::var: return name();
    case kind::constant: return value() ? "1" : "0";
    case kind::not_: s = "!" + operand(0).print(p); break;
    case kind::implies: s = operand(0).print(p + 1) + " -> " + operand(1).print(p); break;
    default: {
      const char *op = what() == kind::and_ ? " & " : what() == kind::or_ ? " | " : " ^ ";
      // left associative: a right operand of equal precedence needs parentheses
      s = operand(0).print(p) + op + operand(1).print(p + 1);
    }
    }
    return p < context ? "(" + s + ")" : s;
  }

  std::shared_ptr<const node_t> _n;
};

namespace detail {

class expr_parser {
public:
  explicit expr_parser(std::string_view text) : _s(text) {}

  bool_expr parse() {
    bool_expr e = implication();
    skip_space();
    if (_pos != _s.size())
      fail("unexpected '" + std::string(1, _s[_pos]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string &what) const {
    throw parse_error(what, _pos);
  }

  void skip_space() {
    while (_pos < _s.size() && std::isspace(static_cast<unsigned char>(_s[_pos])))
      ++_pos;
  }

  bool accept(std::string_view tok) {
    skip_space();
    if (_s.substr(_pos, tok.size()) == tok) {
      _pos += tok.size();
      return true;
    }
    return false;
  }

  bool_expr implication() {
    bool_expr lhs = disjunction();
    if (accept("->"))
      return bool_expr::binary(bool_expr::kind::implies, lhs, implication());
    return lhs;
  }

  bool_expr disjunction() {
    bool_expr lhs = conjunction();
    for (;;) {
      if (accept("|"))
        lhs = bool_expr::binary(bool_expr::kind::or_, lhs, conjunction());
      else if (accept("^"))
        lhs = bool_expr::binary(bool_expr::kind::xor_, lhs, conjunction());
      else
        return lhs;
    }
  }

  bool_expr conjunction() {
    bool_expr lhs = unary();
    while (accept("&"))
      lhs = bool_expr::binary(bool_expr::kind::and_, lhs, unary());
    return lhs;
  }

  bool_expr unary() {
    if (accept("!"))
      return bool_expr::negate(unary());
    return atom();
  }

  bool_expr atom() {
    skip_space();
    if (_pos == _s.size())
      fail("unexpected end of expression");
    const char c = _s[_pos];
    if (c == '(') {
      ++_pos;
      bool_expr e = implication();
      if (!accept(")"))
        fail("expected ')'");
      return e;
    }
    if (c == '0' || c == '1') {
      ++_pos;
      if (_pos < _s.size() && is_ident_char(_s[_pos]))
        fail("malformed constant");
      return bool_expr::constant(c == '1');
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = _pos;
      while (_pos < _s.size() && is_ident_char(_s[_pos]))
        ++_pos;
      return bool_expr::variable(std::string(_s.substr(start, _pos - start)));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string_view _s;
  std::size_t _pos = 0;
};

} // namespace detail

inline bool_expr parse_bool_expr(std::string_view text) { return detail::expr_parser(text).parse(); }

/// The diagram of `e` with each variable placed at the level `level_of` gives
inline diagram to_diagram(engine &eng, const bool_expr &e,
                          const std::function<level_t(const std::string &)> &level_of) {
  switch (e.what()) {
  case bool_expr::kind::var: return make_literal(eng, level_of(e.name()));
  case bool_expr::kind::constant: return diagram::terminal(e.value());
  case bool_expr::kind::not_: return bdd_not(eng, to_diagram(eng, e.operand(0), level_of));
  default: break;
  }
  const diagram a = to_diagram(eng, e.operand(0), level_of);
  const diagram b = to_diagram(eng, e.operand(1), level_of);
  switch (e.what()) {
  case bool_expr::kind::and_: return bdd_and(eng, a, b);
  case bool_expr::kind::or_: return bdd_or(eng, a, b);
  case bool_expr::kind::xor_: return apply_reduce(eng, a, b, ops::xor_);
  default: return apply_reduce(eng, a, b, ops::imp);
  }
}

} // namespace xbdd
