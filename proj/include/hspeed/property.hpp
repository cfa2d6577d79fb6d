#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hspeed/canon.hpp"
#include "hspeed/common.hpp"
#include "hspeed/simclass.hpp"
#include "hspeed/structure.hpp"
#include "hspeed/template.hpp"

namespace hspeed {

// The family the generator extends within: simple graphs and r-uniform
// hypergraphs (one symmetric relation on distinct entries), or arbitrary
// structures of the language.
struct Ambient {
  enum class Kind { Uniform, Structures } kind = Kind::Uniform;
  int r = 2;

  friend bool operator==(const Ambient&, const Ambient&) = default;
};

struct PropertySpec {
  enum class Mode { ForbiddenInduced, AgeOfTemplates, Predicate };

  LanguagePtr language;
  Mode mode = Mode::Predicate;
  Ambient ambient;
  std::vector<Structure> forbidden;
  std::vector<Template> templates;
  std::string name;
  std::function<bool(const Structure&)> predicate;
};

// Every tuple has distinct entries and the relation is closed under
// reordering: the structure is an r-uniform hypergraph.
inline bool is_uniform_hypergraph(const Structure& m) {
  if (m.language().relation_count() != 1 || m.language().constant_count() != 0) return false;
  const TupleSet& ts = m.relation(0);
  std::vector<Element> t;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    t.assign(ts[i].begin(), ts[i].end());
    std::sort(t.begin(), t.end());
    if (std::adjacent_find(t.begin(), t.end()) != t.end()) return false;
    do {
      if (!ts.contains(t)) return false;
    } while (std::next_permutation(t.begin(), t.end()));
  }
  return true;
}

inline PropertySpec forbid_induced(std::vector<Structure> forbidden) {
  if (forbidden.empty()) fail(errc::kInvalidProperty, "forbidden list must be nonempty");
  PropertySpec spec;
  spec.language = forbidden.front().language_ptr();
  for (const auto& f : forbidden)
    if (!same_language(f.language_ptr(), spec.language))
      fail(errc::kLanguageMismatch, "forbidden structures use different languages");
  spec.mode = PropertySpec::Mode::ForbiddenInduced;
  bool uniform = std::all_of(forbidden.begin(), forbidden.end(), is_uniform_hypergraph);
  spec.ambient = uniform ? Ambient{Ambient::Kind::Uniform, spec.language->arity()}
                         : Ambient{Ambient::Kind::Structures, 0};
  spec.name = "forbid";
  spec.forbidden = std::move(forbidden);
  return spec;
}

inline PropertySpec age_of_templates(std::vector<Template> templates) {
  if (templates.empty()) fail(errc::kInvalidProperty, "template list must be nonempty");
  PropertySpec spec;
  spec.language = templates.front().language;
  for (const auto& t : templates)
    if (!same_language(t.language, spec.language))
      fail(errc::kLanguageMismatch, "templates use different languages");
  spec.mode = PropertySpec::Mode::AgeOfTemplates;
  spec.ambient = {Ambient::Kind::Structures, 0};
  spec.name = "age";
  spec.templates = std::move(templates);
  return spec;
}

namespace detail {

inline std::vector<std::vector<Element>> adjacency(const Structure& g) {
  std::vector<std::vector<Element>> adj(g.size());
  const TupleSet& e = g.relation(0);
  for (std::size_t i = 0; i < e.size(); ++i) adj[e[i][0]].push_back(e[i][1]);
  return adj;
}

inline bool two_colourable(const Structure& g) {
  auto adj = adjacency(g);
  std::vector<int> colour(g.size(), -1);
  for (int s = 0; s < g.size(); ++s) {
    if (colour[s] >= 0) continue;
    colour[s] = 0;
    std::vector<Element> stack{s};
    while (!stack.empty()) {
      Element v = stack.back();
      stack.pop_back();
      for (Element w : adj[v]) {
        if (colour[w] < 0) {
          colour[w] = 1 - colour[v];
          stack.push_back(w);
        } else if (colour[w] == colour[v]) {
          return false;
        }
      }
    }
  }
  return true;
}

// K_{a,b} with a, b >= 0: the non-edges form at most two cliques.
inline bool complete_bipartite(const Structure& g) {
  const int n = g.size();
  DisjointSets ds(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!g.holds(0, std::array<Element, 2>{a, b})) ds.unite(a, b);
  std::map<int, std::vector<Element>> parts;
  for (int v = 0; v < n; ++v) parts[ds.find(v)].push_back(v);
  if (parts.size() > 2) return false;
  for (const auto& [root, part] : parts)
    for (std::size_t i = 0; i < part.size(); ++i)
      for (std::size_t j = i + 1; j < part.size(); ++j)
        if (g.holds(0, std::array<Element, 2>{part[i], part[j]})) return false;
  return true;
}

inline bool triangle_free(const Structure& g) {
  auto adj = adjacency(g);
  for (int a = 0; a < g.size(); ++a)
    for (Element b : adj[a])
      for (Element c : adj[b])
        if (c != a && g.holds(0, std::array<Element, 2>{a, c})) return false;
  return true;
}

}  // namespace detail

inline std::vector<std::string> builtin_predicates() {
  return {"all-graphs", "edgeless", "matching", "complete-bipartite", "triangle-free", "bipartite", "all-3-uniform"};
}

inline PropertySpec builtin_predicate(const std::string& name) {
  PropertySpec spec;
  spec.mode = PropertySpec::Mode::Predicate;
  spec.name = name;
  spec.language = graph_language();
  spec.ambient = {Ambient::Kind::Uniform, 2};
  if (name == "all-graphs") {
    spec.predicate = [](const Structure&) { return true; };
  } else if (name == "edgeless") {
    spec.predicate = [](const Structure& g) { return g.relation(0).empty(); };
  } else if (name == "matching") {
    spec.predicate = [](const Structure& g) {
      for (const auto& nb : detail::adjacency(g))
        if (nb.size() > 1) return false;
      return true;
    };
  } else if (name == "complete-bipartite") {
    spec.predicate = detail::complete_bipartite;
  } else if (name == "triangle-free") {
    spec.predicate = detail::triangle_free;
  } else if (name == "bipartite") {
    spec.predicate = detail::two_colourable;
  } else if (name == "all-3-uniform") {
    spec.language = uniform_language(3);
    spec.ambient = {Ambient::Kind::Uniform, 3};
    spec.predicate = [](const Structure&) { return true; };
  } else {
    fail(errc::kInvalidProperty, "unknown built-in property '" + name + "'");
  }
  return spec;
}

inline PropertySpec predicate_property(std::string name, LanguagePtr language, Ambient ambient,
                                       std::function<bool(const Structure&)> test) {
  PropertySpec spec;
  spec.mode = PropertySpec::Mode::Predicate;
  spec.name = std::move(name);
  spec.language = std::move(language);
  spec.ambient = ambient;
  spec.predicate = std::move(test);
  return spec;
}

inline int default_budget(const PropertySpec& spec) {
  const int r = spec.language->arity();
  if (spec.mode != PropertySpec::Mode::AgeOfTemplates && spec.ambient.kind == Ambient::Kind::Structures) return 5;
  if (r <= 2) return 9;
  if (r == 3) return 7;
  return 6;
}

namespace detail {

inline bool has_induced_copy(const Structure& m,
                             const std::unordered_map<int, std::unordered_set<std::string>>& keys,
                             int must_contain) {
  const int n = m.size();
  for (const auto& [f, set] : keys) {
    if (f > n) continue;
    // Subsets of size f, containing `must_contain` when it is set.
    std::vector<Element> subset;
    auto rec = [&](auto&& self, int start) -> bool {
      if (static_cast<int>(subset.size()) == f) {
        if (must_contain >= 0 && std::find(subset.begin(), subset.end(), must_contain) == subset.end()) return false;
        return set.count(canonical_key(induced_substructure(m, subset).structure)) > 0;
      }
      for (int v = start; v < n; ++v) {
        if (n - v < f - static_cast<int>(subset.size())) break;
        subset.push_back(v);
        bool hit = self(self, v + 1);
        subset.pop_back();
        if (hit) return true;
      }
      return false;
    };
    if (rec(rec, 0)) return true;
  }
  return false;
}

inline std::unordered_map<int, std::unordered_set<std::string>> forbidden_keys(const PropertySpec& spec) {
  std::unordered_map<int, std::unordered_set<std::string>> keys;
  for (const auto& f : spec.forbidden) keys[f.size()].insert(canonical_key(f));
  return keys;
}

}  // namespace detail

// Membership of an arbitrary structure.
inline bool contains(const PropertySpec& spec, const Structure& m) {
  if (!same_language(m.language_ptr(), spec.language))
    fail(errc::kLanguageMismatch, "structure and property use different languages");
  switch (spec.mode) {
    case PropertySpec::Mode::ForbiddenInduced:
      if (spec.ambient.kind == Ambient::Kind::Uniform && !is_uniform_hypergraph(m)) return false;
      return !detail::has_induced_copy(m, detail::forbidden_keys(spec), -1);
    case PropertySpec::Mode::AgeOfTemplates:
      for (const auto& t : spec.templates)
        if (embeds_in_template(m, t)) return true;
      return false;
    case PropertySpec::Mode::Predicate:
      if (spec.ambient.kind == Ambient::Kind::Uniform && !is_uniform_hypergraph(m)) return false;
      return spec.predicate(m);
  }
  return false;
}

// Isomorphism-class representatives (canonical forms) of members of each size.
struct Level {
  int n = 0;
  std::vector<Structure> reps;
  std::vector<BigInt> aut_orders;
};

namespace detail {

// Tuples touching the new element n, grouped as the generator's choice units:
// one unit per candidate hyperedge in the uniform case, one per tuple otherwise.
inline std::vector<std::vector<std::pair<int, std::vector<Element>>>> extension_units(const PropertySpec& spec,
                                                                                      int n) {
  std::vector<std::vector<std::pair<int, std::vector<Element>>>> units;
  if (spec.ambient.kind == Ambient::Kind::Uniform) {
    const int r = spec.ambient.r;
    std::vector<Element> pick;
    auto rec = [&](auto&& self, int start) -> void {
      if (static_cast<int>(pick.size()) == r - 1) {
        std::vector<Element> edge = pick;
        edge.push_back(n);
        std::vector<std::pair<int, std::vector<Element>>> unit;
        do unit.push_back({0, edge});
        while (std::next_permutation(edge.begin(), edge.end()));
        units.push_back(std::move(unit));
        return;
      }
      for (int v = start; v < n; ++v) {
        pick.push_back(v);
        self(self, v + 1);
        pick.pop_back();
      }
    };
    rec(rec, 0);
    return units;
  }
  for (int rel = 0; rel < spec.language->relation_count(); ++rel) {
    const int a = spec.language->relations()[rel].arity;
    std::vector<Element> t(a, 0);
    long total = 1;
    for (int i = 0; i < a; ++i) total *= n + 1;
    for (long code = 0; code < total; ++code) {
      long c = code;
      bool touches = false;
      for (int i = a - 1; i >= 0; --i) {
        t[i] = static_cast<Element>(c % (n + 1));
        c /= n + 1;
        touches = touches || t[i] == n;
      }
      if (touches) units.push_back({{rel, t}});
    }
  }
  return units;
}

inline void check_predicate_heredity(const PropertySpec& spec, const Structure& m) {
  if (spec.mode != PropertySpec::Mode::Predicate) return;
  std::vector<Element> keep;
  for (int drop = 0; drop < m.size(); ++drop) {
    keep.clear();
    for (int v = 0; v < m.size(); ++v)
      if (v != drop) keep.push_back(v);
    if (!spec.predicate(induced_substructure(m, keep).structure))
      fail(errc::kNotHereditary, "predicate '" + spec.name + "' fails on a one-point deletion of a member");
  }
}

inline std::vector<Level> generate_age(const PropertySpec& spec, int n_max) {
  std::vector<Level> levels;
  for (int n = 0; n <= n_max; ++n) {
    std::map<std::string, std::pair<Structure, BigInt>> seen;
    for (const auto& t : spec.templates) {
      const int k = t.k();
      double work = std::pow(static_cast<double>(k), n);
      if (work > 1 << 24) fail(errc::kBudgetExceeded, "age enumeration too large at n = " + std::to_string(n));
      std::vector<int> class_of(n), load(k, 0);
      auto rec = [&](auto&& self, int v) -> void {
        if (v == n) {
          auto lab = canonical_labeling(realize_template(t, class_of));
          seen.try_emplace(lab.key, std::move(lab.form), lab.group_order);
          return;
        }
        for (int i = 0; i < k; ++i) {
          if (!t.is_infinite(i) && load[i] == t.sizes[i]) continue;
          class_of[v] = i;
          ++load[i];
          self(self, v + 1);
          --load[i];
        }
      };
      rec(rec, 0);
    }
    Level level{n, {}, {}};
    for (auto& [key, entry] : seen) {
      level.reps.push_back(std::move(entry.first));
      level.aut_orders.push_back(entry.second);
    }
    levels.push_back(std::move(level));
  }
  return levels;
}

}  // namespace detail

// Members up to n_max, one representative per isomorphism class, built one
// new element at a time from the previous level (heredity makes this
// complete) and deduplicated by canonical key. `visit` sees each finished
// level and may stop generation early by returning false.
inline std::vector<Level> generate_members(const PropertySpec& spec, int n_max, int budget = 0,
                                           const std::function<bool(const Level&)>& visit = {}) {
  if (budget <= 0) budget = default_budget(spec);
  if (n_max > budget)
    fail(errc::kBudgetExceeded, "n_max = " + std::to_string(n_max) + " exceeds the budget " + std::to_string(budget));
  if (n_max < 0) fail(errc::kOutOfRange, "n_max must be nonnegative");
  if (spec.mode == PropertySpec::Mode::AgeOfTemplates) {
    auto levels = detail::generate_age(spec, n_max);
    if (visit)
      for (std::size_t n = 0; n < levels.size(); ++n)
        if (!visit(levels[n])) {
          levels.resize(n + 1);
          break;
        }
    return levels;
  }

  const auto keys = detail::forbidden_keys(spec);
  auto member = [&](const Structure& m) {
    if (spec.mode == PropertySpec::Mode::ForbiddenInduced)
      return !detail::has_induced_copy(m, keys, m.size() - 1);
    return spec.predicate(m);
  };

  std::vector<Level> levels;
  Structure empty(spec.language, 0);
  if (spec.language->constant_count() > 0)
    fail(errc::kConstantsUnsupported, "generation supports relational languages only");
  levels.push_back({0, {}, {}});
  if (member(empty)) {
    levels[0].reps.push_back(empty);
    levels[0].aut_orders.push_back(1);
  }
  if (visit && !visit(levels[0])) return levels;
  for (int n = 0; n < n_max; ++n) {
    auto units = detail::extension_units(spec, n);
    if (units.size() > 24)
      fail(errc::kBudgetExceeded, "2^" + std::to_string(units.size()) + " extensions per member at n = " +
                                      std::to_string(n + 1));
    std::unordered_map<std::string, std::size_t> index;
    Level next{n + 1, {}, {}};
    for (const auto& parent : levels[n].reps) {
      std::vector<std::vector<Element>> base(spec.language->relation_count());
      for (int r = 0; r < spec.language->relation_count(); ++r) base[r] = parent.relation(r).flat();
      const std::uint64_t total = std::uint64_t{1} << units.size();
      for (std::uint64_t mask = 0; mask < total; ++mask) {
        auto flats = base;
        for (std::size_t u = 0; u < units.size(); ++u)
          if (mask >> u & 1U)
            for (const auto& [rel, t] : units[u]) flats[rel].insert(flats[rel].end(), t.begin(), t.end());
        std::vector<TupleSet> rels;
        for (int r = 0; r < spec.language->relation_count(); ++r)
          rels.emplace_back(spec.language->relations()[r].arity, std::move(flats[r]));
        Structure child(spec.language, n + 1, std::move(rels));
        if (!member(child)) continue;
        auto lab = canonical_labeling(child);
        if (index.count(lab.key)) continue;
        if (spec.mode == PropertySpec::Mode::Predicate) {
          detail::check_predicate_heredity(spec, child);
          if (!spec.predicate(lab.form))
            fail(errc::kInvalidProperty, "predicate '" + spec.name + "' is not isomorphism invariant");
        }
        index.emplace(lab.key, next.reps.size());
        next.reps.push_back(std::move(lab.form));
        next.aut_orders.push_back(lab.group_order);
      }
    }
    levels.push_back(std::move(next));
    if (visit && !visit(levels.back())) break;
  }
  return levels;
}

struct SpeedRow {
  int n = 0;
  BigInt labeled = 0;
  long unlabeled = 0;
  std::vector<BigInt> multiplicities;  // n!/|Aut| per class, descending
};

struct SpeedTable {
  std::vector<SpeedRow> rows;
};

inline SpeedTable speed_from_levels(const std::vector<Level>& levels) {
  SpeedTable table;
  for (const auto& level : levels) {
    if (level.n == 0) continue;
    SpeedRow row;
    row.n = level.n;
    row.unlabeled = static_cast<long>(level.reps.size());
    const BigInt nf = factorial(level.n);
    for (const auto& order : level.aut_orders) {
      row.multiplicities.push_back(nf / order);
      row.labeled += row.multiplicities.back();
    }
    std::sort(row.multiplicities.rbegin(), row.multiplicities.rend());
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline SpeedTable speed(const PropertySpec& spec, int n_max, int budget = 0) {
  return speed_from_levels(generate_members(spec, n_max, budget));
}

struct BasicVerdict {
  bool consistent = true;
  std::optional<Structure> witness;  // a member with more than k classes
  int classes = 0;
};

inline BasicVerdict is_basic_upto(const PropertySpec& spec, int k, int n_max, int budget = 0) {
  BasicVerdict verdict;
  generate_members(spec, n_max, budget, [&](const Level& level) {
    for (const auto& m : level.reps) {
      const int c = class_count(m);
      if (c > k) {
        verdict = {false, m, c};
        return false;
      }
    }
    return true;
  });
  return verdict;
}

struct BoundednessWitness {
  Structure member;
  std::string relation;
  std::vector<int> fixed;      // positions I (0-based)
  std::vector<int> free;       // positions J
  std::vector<Element> assignment;  // values at the positions in I
  long completions = 0;
};

struct BoundednessVerdict {
  bool consistent = true;
  std::optional<BoundednessWitness> witness;
};

// Looks for a relation R, a split of its positions into nonempty I and J,
// and values for I with at least k completions.
inline std::optional<BoundednessWitness> bounded_violation(const Structure& m, int k) {
  for (int rel = 0; rel < m.language().relation_count(); ++rel) {
    const TupleSet& ts = m.relation(rel);
    const int s = ts.arity();
    for (int mask = 1; mask + 1 < (1 << s); ++mask) {
      std::vector<int> fixed, free;
      for (int j = 0; j < s; ++j) (mask >> j & 1 ? fixed : free).push_back(j);
      std::map<std::vector<Element>, long> counts;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        std::vector<Element> key;
        for (int j : fixed) key.push_back(ts[i][j]);
        ++counts[key];
      }
      for (const auto& [key, count] : counts)
        if (count >= k) return BoundednessWitness{m, m.language().relations()[rel].name, fixed, free, key, count};
    }
  }
  return std::nullopt;
}

inline BoundednessVerdict is_totally_bounded_upto(const PropertySpec& spec, int k, int n_max, int budget = 0) {
  BoundednessVerdict verdict;
  generate_members(spec, n_max, budget, [&](const Level& level) {
    for (const auto& m : level.reps)
      if (auto w = bounded_violation(m, k)) {
        verdict = {false, std::move(w)};
        return false;
      }
    return true;
  });
  return verdict;
}

struct GrowthRow {
  int n = 0;
  double log2_count = 0;
  double log_ratio = 0;       // log|H_n| / (n log n)
  double over_factorial = 0;  // |H_n| / n!
  double log2_difference = 0; // log2|H_n| - log2|H_{n-1}|
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  double factorial_exponent = 0;  // a in log|H_n| ~ a n log n + b n + c
  std::string tag;
  int degree = 0;  // k for the factorial-degree-k tag
};

// Heuristic readout only: fits log|H_n| against n log n, n, 1 and reads the
// leading coefficient, after checking whether |H_n|/n! keeps growing.
inline GrowthReport growth_diagnostics(const SpeedTable& table) {
  if (table.rows.size() < 4) fail(errc::kTooFewRows, "growth diagnostics need at least 4 rows");
  GrowthReport report;
  double prev = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.labeled <= 0) fail(errc::kInvalidProperty, "speed table contains an empty level");
    GrowthRow g;
    g.n = row.n;
    const double ln = std::log(row.labeled.convert_to<double>());
    g.log2_count = ln / std::log(2.0);
    g.log_ratio = row.n >= 2 ? ln / (row.n * std::log(static_cast<double>(row.n))) : 0.0;
    g.over_factorial = (Rational(row.labeled) / Rational(factorial(row.n))).convert_to<double>();
    g.log2_difference = i == 0 ? 0.0 : g.log2_count - prev;
    prev = g.log2_count;
    report.rows.push_back(g);
  }
  // Least squares on rows with n >= 2 via the 3x3 normal equations.
  std::vector<std::array<double, 3>> xs;
  std::vector<double> ys;
  for (const auto& row : table.rows) {
    if (row.n < 2) continue;
    const double n = row.n;
    xs.push_back({n * std::log(n), n, 1.0});
    ys.push_back(std::log(row.labeled.convert_to<double>()));
  }
  double a[3][4] = {};
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += xs[i][r] * xs[i][c];
      a[r][3] += xs[i][r] * ys[i];
    }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[pivot], a[col]);
    if (std::abs(a[col][col]) < 1e-12) continue;
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  report.factorial_exponent = std::abs(a[0][0]) < 1e-12 ? 0.0 : a[0][3] / a[0][0];
  if (std::abs(report.factorial_exponent) < 1e-9) report.factorial_exponent = 0.0;

  const auto& last = report.rows.back();
  const auto& before = report.rows[report.rows.size() - 2];
  if (last.over_factorial > 1.0 && last.over_factorial > before.over_factorial) {
    report.tag = "penultimate-or-above";
  } else if (report.factorial_exponent < 0.25) {
    report.tag = "polynomial/exponential";
  } else {
    report.degree = std::max(2, static_cast<int>(std::lround(1.0 / std::max(1e-9, 1.0 - report.factorial_exponent))));
    report.tag = "factorial-degree-" + std::to_string(report.degree);
  }
  return report;
}

}  // namespace hspeed
