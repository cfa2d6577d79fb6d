#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hspeed/common.hpp"
#include "hspeed/structure.hpp"

namespace hspeed {

// Boolean combination of atoms R(x_i, ...) over a source language. Variables
// are 0-based positions of the target relation's argument list.
struct Formula {
  enum class Kind { True, False, Atom, Not, And, Or };
  Kind kind = Kind::True;
  std::string relation;
  std::vector<int> vars;
  int rel_id = -1;  // index into the source language once resolved
  std::vector<std::shared_ptr<const Formula>> children;

  static Formula atom(std::string rel, std::vector<int> v) {
    Formula f;
    f.kind = Kind::Atom;
    f.relation = std::move(rel);
    f.vars = std::move(v);
    return f;
  }
  static Formula negate(Formula a) {
    Formula f;
    f.kind = Kind::Not;
    f.children.push_back(std::make_shared<const Formula>(std::move(a)));
    return f;
  }
  static Formula conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }

  int max_var() const {
    int m = -1;
    for (int v : vars) m = std::max(m, v);
    for (const auto& c : children) m = std::max(m, c->max_var());
    return m;
  }

 private:
  static Formula binary(Kind k, Formula a, Formula b) {
    Formula f;
    f.kind = k;
    f.children.push_back(std::make_shared<const Formula>(std::move(a)));
    f.children.push_back(std::make_shared<const Formula>(std::move(b)));
    return f;
  }
};

// Text form: atoms "E(x1,x2)", "!" / "~" negation, "&", "|", parentheses,
// "true", "false". Variables are written x1, x2, ... (1-based).
inline Formula parse_formula(std::string_view text) {
  struct Parser {
    std::string_view s;
    std::size_t i = 0;
    [[noreturn]] void bad(const std::string& what) {
      fail(errc::kParseError, "formula '" + std::string(s) + "': " + what);
    }
    void skip() {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
      skip();
      if (i < s.size() && s[i] == c) {
        ++i;
        return true;
      }
      return false;
    }
    std::string ident() {
      skip();
      std::size_t b = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      if (b == i) bad("expected a name at offset " + std::to_string(b));
      return std::string(s.substr(b, i - b));
    }
    Formula primary() {
      if (eat('!') || eat('~')) return Formula::negate(primary());
      if (eat('(')) {
        Formula f = disjunction();
        if (!eat(')')) bad("missing ')'");
        return f;
      }
      std::string name = ident();
      if (name == "true") return Formula{};
      if (name == "false") {
        Formula f;
        f.kind = Formula::Kind::False;
        return f;
      }
      std::vector<int> vars;
      if (!eat('(')) bad("expected '(' after " + name);
      do {
        std::string v = ident();
        if (v.size() < 2 || v[0] != 'x') bad("variables are written x1, x2, ...");
        int idx = 0;
        for (std::size_t k = 1; k < v.size(); ++k) {
          if (!std::isdigit(static_cast<unsigned char>(v[k]))) bad("bad variable " + v);
          idx = idx * 10 + (v[k] - '0');
        }
        if (idx < 1) bad("variables start at x1");
        vars.push_back(idx - 1);
      } while (eat(','));
      if (!eat(')')) bad("missing ')' in atom");
      return Formula::atom(std::move(name), std::move(vars));
    }
    Formula conjunction() {
      Formula f = primary();
      while (eat('&')) f = Formula::conj(std::move(f), primary());
      return f;
    }
    Formula disjunction() {
      Formula f = conjunction();
      while (eat('|')) f = Formula::disj(std::move(f), conjunction());
      return f;
    }
  } p{text};
  Formula f = p.disjunction();
  p.skip();
  if (p.i != text.size()) p.bad("trailing input at offset " + std::to_string(p.i));
  return f;
}

// alpha: relation name of the target language -> formula over the source
// language N is written in.
using Interpretation = std::map<std::string, Formula>;

namespace detail {

// Resolves atom relation names once so evaluation does no string lookups.
inline Formula resolve(const Formula& f, const Language& source, int arity) {
  Formula out = f;
  out.children.clear();
  if (f.kind == Formula::Kind::Atom) {
    auto idx = source.relation_index(f.relation);
    if (!idx) fail(errc::kArityMismatch, "unknown relation '" + f.relation + "' in interpretation");
    if (static_cast<int>(f.vars.size()) != source.relations()[*idx].arity)
      fail(errc::kArityMismatch, "atom " + f.relation + " has " + std::to_string(f.vars.size()) +
                                     " arguments, relation arity is " +
                                     std::to_string(source.relations()[*idx].arity));
    if (f.vars.size() > 16) fail(errc::kArityMismatch, "atom arity above 16 is unsupported");
    for (int v : f.vars)
      if (v >= arity)
        fail(errc::kArityMismatch, "variable x" + std::to_string(v + 1) + " exceeds arity " +
                                       std::to_string(arity));
    out.vars = f.vars;
    out.rel_id = *idx;
    return out;
  }
  for (const auto& c : f.children) out.children.push_back(std::make_shared<const Formula>(resolve(*c, source, arity)));
  return out;
}

inline bool evaluate_resolved(const Formula& f, const Structure& n, std::span<const Element> args) {
  switch (f.kind) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::False:
      return false;
    case Formula::Kind::Not:
      return !evaluate_resolved(*f.children[0], n, args);
    case Formula::Kind::And:
      return evaluate_resolved(*f.children[0], n, args) && evaluate_resolved(*f.children[1], n, args);
    case Formula::Kind::Or:
      return evaluate_resolved(*f.children[0], n, args) || evaluate_resolved(*f.children[1], n, args);
    case Formula::Kind::Atom: {
      Element buf[16];
      for (std::size_t j = 0; j < f.vars.size(); ++j) buf[j] = args[f.vars[j]];
      return n.holds(f.rel_id, std::span<const Element>(buf, f.vars.size()));
    }
  }
  return false;
}

}  // namespace detail

// alpha-bar(N): same domain, R interpreted tuple-wise over all of [n]^arity.
// Constants of the target language are carried over by name.
inline Structure apply_interpretation(const Interpretation& alpha, const LanguagePtr& target,
                                      const Structure& n) {
  std::vector<TupleSet> rels;
  for (const auto& sym : target->relations()) {
    auto it = alpha.find(sym.name);
    if (it == alpha.end()) fail(errc::kArityMismatch, "interpretation misses relation '" + sym.name + "'");
    Formula f = detail::resolve(it->second, n.language(), sym.arity);
    std::vector<Element> flat;
    std::vector<Element> tuple(sym.arity, 0);
    const int size = n.size();
    if (size > 0) {
      while (true) {
        if (detail::evaluate_resolved(f, n, tuple)) flat.insert(flat.end(), tuple.begin(), tuple.end());
        int j = sym.arity - 1;
        while (j >= 0 && ++tuple[j] == size) tuple[j--] = 0;
        if (j < 0) break;
      }
    }
    rels.emplace_back(sym.arity, std::move(flat));
  }
  std::vector<Element> consts;
  for (const auto& c : target->constants()) {
    auto idx = n.language().constant_index(c);
    if (!idx) fail(errc::kArityMismatch, "constant '" + c + "' has no interpretation in the source");
    consts.push_back(n.constants()[*idx]);
  }
  return Structure(target, n.size(), std::move(rels), std::move(consts));
}

}  // namespace hspeed
