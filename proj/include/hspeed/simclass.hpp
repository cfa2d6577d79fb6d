#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hspeed/canon.hpp"
#include "hspeed/common.hpp"
#include "hspeed/structure.hpp"

namespace hspeed {

// A relation applied to distinct variables and constants. Slots >= 0 are
// variable indices in first-occurrence order (so R(x1,x1) is allowed);
// slot -(c+1) names constant c.
struct AtomicDiff {
  int relation = 0;
  std::vector<int> pattern;
  int variables = 0;

  bool has_constants() const {
    return std::any_of(pattern.begin(), pattern.end(), [](int s) { return s < 0; });
  }
  std::string key(const Language& lang) const {
    std::string out = lang.relations()[relation].name + "(";
    for (std::size_t j = 0; j < pattern.size(); ++j) {
      if (j) out += ",";
      out += pattern[j] >= 0 ? "x" + std::to_string(pattern[j] + 1) : lang.constants()[-pattern[j] - 1];
    }
    return out + ")";
  }
  friend bool operator==(const AtomicDiff&, const AtomicDiff&) = default;
  friend auto operator<=>(const AtomicDiff&, const AtomicDiff&) = default;
};

// Every atom of the language, relation by relation; within a relation,
// constant slots sort before variable slots.
inline std::vector<AtomicDiff> atomic_diffs(const Language& lang) {
  std::vector<AtomicDiff> out;
  const int nc = lang.constant_count();
  for (int r = 0; r < lang.relation_count(); ++r) {
    const int arity = lang.relations()[r].arity;
    std::vector<int> slots(arity);
    // Depth-first over slots: a constant, an old variable, or the next new one.
    auto rec = [&](auto&& self, int pos, int vars) -> void {
      if (pos == arity) {
        out.push_back({r, slots, vars});
        return;
      }
      for (int c = nc - 1; c >= 0; --c) {
        slots[pos] = -(c + 1);
        self(self, pos + 1, vars);
      }
      for (int v = 0; v <= vars; ++v) {
        slots[pos] = v;
        self(self, pos + 1, std::max(vars, v + 1));
      }
    };
    rec(rec, 0, 0);
  }
  return out;
}

inline std::optional<AtomicDiff> parse_atom_key(const Language& lang, std::string_view key) {
  auto open = key.find('(');
  if (open == std::string_view::npos || key.back() != ')') return std::nullopt;
  auto rel = lang.relation_index(key.substr(0, open));
  if (!rel) return std::nullopt;
  for (const auto& a : atomic_diffs(lang))
    if (a.relation == *rel && a.key(lang) == key) return a;
  return std::nullopt;
}

// Substitutes distinct elements for the variables of `atom`.
inline void instantiate(const AtomicDiff& atom, std::span<const Element> values,
                        const std::vector<Element>& constants, std::vector<Element>& out) {
  out.resize(atom.pattern.size());
  for (std::size_t j = 0; j < atom.pattern.size(); ++j) {
    int s = atom.pattern[j];
    out[j] = s >= 0 ? values[s] : constants[-s - 1];
  }
}

// tau^M: variable assignments with pairwise distinct entries satisfying the atom.
inline TupleSet realize(const Structure& m, const AtomicDiff& atom) {
  const TupleSet& ts = m.relation(atom.relation);
  std::vector<Element> flat;
  std::vector<Element> values(atom.variables);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    auto t = ts[i];
    std::fill(values.begin(), values.end(), -1);
    bool ok = true;
    for (std::size_t j = 0; j < atom.pattern.size() && ok; ++j) {
      int s = atom.pattern[j];
      if (s < 0) {
        ok = t[j] == m.constants()[-s - 1];
      } else if (values[s] < 0) {
        values[s] = t[j];
      } else {
        ok = values[s] == t[j];
      }
    }
    for (int a = 0; a < atom.variables && ok; ++a)
      for (int b = a + 1; b < atom.variables && ok; ++b) ok = values[a] != values[b];
    if (ok) flat.insert(flat.end(), values.begin(), values.end());
  }
  return TupleSet(atom.variables, std::move(flat));
}

namespace detail {

inline bool transposition_preserves(const Structure& m, Element a, Element b) {
  std::vector<Element> img;
  for (const auto& ts : m.relations()) {
    img.resize(ts.arity());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      auto t = ts[i];
      bool touched = false;
      for (int j = 0; j < ts.arity(); ++j) {
        img[j] = t[j] == a ? b : (t[j] == b ? a : t[j]);
        touched = touched || img[j] != t[j];
      }
      if (touched && !ts.contains(img)) return false;
    }
  }
  return true;
}

}  // namespace detail

// a ~ b: the transposition (a b) is an automorphism. Constant elements are
// related only to themselves.
inline bool sim_related(const Structure& m, Element a, Element b) {
  if (a < 0 || a >= m.size() || b < 0 || b >= m.size())
    fail(errc::kOutOfRange, "element outside the domain");
  if (a == b) return true;
  if (m.is_constant_element(a) || m.is_constant_element(b)) return false;
  return detail::transposition_preserves(m, a, b);
}

struct Decomposition {
  std::vector<std::vector<Element>> classes;  // sorted by (size, min element)
  std::vector<int> class_of;
  std::vector<AtomicDiff> atoms;
  std::vector<std::vector<std::vector<int>>> sigma;  // aligned with atoms; 0-based class indices

  int k() const { return static_cast<int>(classes.size()); }
};

inline std::vector<std::vector<Element>> sim_classes(const Structure& m) {
  const int n = m.size();
  detail::DisjointSets ds(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (ds.find(a) != ds.find(b) && sim_related(m, a, b)) ds.unite(a, b);
  std::map<int, std::vector<Element>> groups;
  for (int v = 0; v < n; ++v) groups[ds.find(v)].push_back(v);
  std::vector<std::vector<Element>> classes;
  for (auto& [root, members] : groups) classes.push_back(std::move(members));
  std::sort(classes.begin(), classes.end(), [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x.front() < y.front();
  });
  return classes;
}

// Sigma_tau for every atom, given any partition of the domain into classes.
inline std::vector<std::vector<std::vector<int>>> sigma_of(const Structure& m,
                                                           const std::vector<int>& class_of,
                                                           const std::vector<AtomicDiff>& atoms) {
  std::vector<std::vector<std::vector<int>>> sigma;
  for (const auto& atom : atoms) {
    TupleSet tau = realize(m, atom);
    std::vector<std::vector<int>> idx;
    for (std::size_t i = 0; i < tau.size(); ++i) {
      std::vector<int> row;
      for (Element e : tau[i]) row.push_back(class_of[e]);
      idx.push_back(std::move(row));
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    sigma.push_back(std::move(idx));
  }
  return sigma;
}

inline Decomposition decomposition(const Structure& m) {
  Decomposition d;
  d.classes = sim_classes(m);
  d.class_of.assign(m.size(), -1);
  for (std::size_t c = 0; c < d.classes.size(); ++c)
    for (Element v : d.classes[c]) d.class_of[v] = static_cast<int>(c);
  d.atoms = atomic_diffs(m.language());
  d.sigma = sigma_of(m, d.class_of, d.atoms);
  return d;
}

inline int class_count(const Structure& m) { return static_cast<int>(sim_classes(m).size()); }

// The structure on [n] whose atoms are exactly the unions of
// (B_{i_1} x ... x B_{i_s}) minus non-distinct tuples over Sigma_tau.
inline Structure build_from_classes(const LanguagePtr& lang, int n, const std::vector<int>& class_of,
                                    const std::vector<AtomicDiff>& atoms,
                                    const std::vector<std::vector<std::vector<int>>>& sigma,
                                    const std::vector<Element>& constants = {}) {
  int k = 0;
  for (int c : class_of) k = std::max(k, c + 1);
  std::vector<std::vector<Element>> blocks(k);
  for (int v = 0; v < n; ++v) blocks[class_of[v]].push_back(v);
  std::vector<std::vector<Element>> flats(lang->relation_count());
  std::vector<Element> values, tuple;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const auto& atom = atoms[a];
    values.assign(atom.variables, -1);
    for (const auto& row : sigma[a]) {
      // Distinct tuples in B_{row[0]} x ... x B_{row[s-1]}.
      auto rec = [&](auto&& self, int pos) -> void {
        if (pos == atom.variables) {
          instantiate(atom, values, constants, tuple);
          flats[atom.relation].insert(flats[atom.relation].end(), tuple.begin(), tuple.end());
          return;
        }
        for (Element e : blocks[row[pos]]) {
          if (std::find(values.begin(), values.begin() + pos, e) != values.begin() + pos) continue;
          values[pos] = e;
          self(self, pos + 1);
        }
        values[pos] = -1;
      };
      bool in_range = std::all_of(row.begin(), row.end(), [&](int c) { return c >= 0 && c < k; });
      if (in_range) rec(rec, 0);
    }
  }
  std::vector<TupleSet> rels;
  for (int r = 0; r < lang->relation_count(); ++r)
    rels.emplace_back(lang->relations()[r].arity, std::move(flats[r]));
  return Structure(lang, n, std::move(rels), constants);
}

}  // namespace hspeed
