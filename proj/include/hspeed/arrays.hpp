#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hspeed/common.hpp"
#include "hspeed/property.hpp"
#include "hspeed/structure.hpp"

namespace hspeed {

// Positions of R taken by x (0-based, sorted); the rest belong to y.
struct Split {
  int relation = 0;
  std::vector<int> x_positions;
  std::vector<int> y_positions;
};

inline Split make_split(const Structure& m, int relation, std::vector<int> x_positions) {
  if (relation < 0 || relation >= m.language().relation_count())
    fail(errc::kBadSplit, "relation index outside the language");
  const int s = m.language().relations()[relation].arity;
  std::sort(x_positions.begin(), x_positions.end());
  if (std::adjacent_find(x_positions.begin(), x_positions.end()) != x_positions.end())
    fail(errc::kBadSplit, "repeated position in the split");
  for (int p : x_positions)
    if (p < 0 || p >= s) fail(errc::kBadSplit, "split position outside the relation's arity");
  if (x_positions.empty() || static_cast<int>(x_positions.size()) == s)
    fail(errc::kBadSplit, "both sides of the split must be nonempty");
  Split split{relation, std::move(x_positions), {}};
  for (int p = 0; p < s; ++p)
    if (!std::binary_search(split.x_positions.begin(), split.x_positions.end(), p)) split.y_positions.push_back(p);
  return split;
}

struct RSplitType {
  std::vector<std::uint8_t> decisions;  // aligned with TypeSpace::basis
  std::vector<std::vector<Element>> realizations;
};

struct TypeSpace {
  Split split;
  std::vector<Element> parameters;  // A, sorted
  std::vector<std::string> basis;   // formula per decision bit
  std::vector<RSplitType> types;    // sorted by decisions
};

namespace detail {

inline void check_parameters(const Structure& m, std::vector<Element>& a) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  for (Element e : a)
    if (e < 0 || e >= m.size()) fail(errc::kOutOfRange, "parameter outside the domain");
}

// Every tuple of A^len in lexicographic order.
inline std::vector<std::vector<Element>> parameter_tuples(const std::vector<Element>& a, int len) {
  std::vector<std::vector<Element>> out;
  std::vector<Element> t(len);
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == len) {
      out.push_back(t);
      return;
    }
    for (Element e : a) {
      t[pos] = e;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace detail

// Decision vector of x-tuple `x` over A: R(x; a) for every a in A^|y|, then
// x_i = x_j for i < j, then x_i = a for every i and a in A.
inline std::vector<std::uint8_t> type_signature(const Structure& m, const Split& split,
                                                const std::vector<Element>& a, std::span<const Element> x) {
  const int s = m.language().relations()[split.relation].arity;
  std::vector<std::uint8_t> bits;
  std::vector<Element> full(s);
  for (const auto& ys : detail::parameter_tuples(a, static_cast<int>(split.y_positions.size()))) {
    for (std::size_t i = 0; i < split.x_positions.size(); ++i) full[split.x_positions[i]] = x[i];
    for (std::size_t i = 0; i < split.y_positions.size(); ++i) full[split.y_positions[i]] = ys[i];
    bits.push_back(m.holds(split.relation, full) ? 1 : 0);
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) bits.push_back(x[i] == x[j] ? 1 : 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (Element e : a) bits.push_back(x[i] == e ? 1 : 0);
  return bits;
}

// The realised R(x;y)-types over A, each with all of its realisations.
inline TypeSpace type_space(const Structure& m, const Split& split, std::vector<Element> a) {
  detail::check_parameters(m, a);
  TypeSpace space;
  space.split = split;
  space.parameters = a;
  const auto& sym = m.language().relations()[split.relation];
  const int nx = static_cast<int>(split.x_positions.size());
  for (const auto& ys : detail::parameter_tuples(a, static_cast<int>(split.y_positions.size()))) {
    std::vector<std::string> slot(sym.arity);
    for (int i = 0; i < nx; ++i) slot[split.x_positions[i]] = "x" + std::to_string(i + 1);
    for (std::size_t i = 0; i < split.y_positions.size(); ++i) slot[split.y_positions[i]] = std::to_string(ys[i] + 1);
    std::string f = sym.name + "(";
    for (int p = 0; p < sym.arity; ++p) f += (p ? "," : "") + slot[p];
    space.basis.push_back(f + ")");
  }
  for (int i = 0; i < nx; ++i)
    for (int j = i + 1; j < nx; ++j) space.basis.push_back("x" + std::to_string(i + 1) + "=x" + std::to_string(j + 1));
  for (int i = 0; i < nx; ++i)
    for (Element e : a) space.basis.push_back("x" + std::to_string(i + 1) + "=" + std::to_string(e + 1));

  std::map<std::vector<std::uint8_t>, std::vector<std::vector<Element>>> groups;
  for (const auto& x : detail::parameter_tuples([&] {
         std::vector<Element> all(m.size());
         std::iota(all.begin(), all.end(), 0);
         return all;
       }(), nx))
    groups[type_signature(m, split, a, x)].push_back(x);
  for (auto& [bits, real] : groups) space.types.push_back({bits, std::move(real)});
  return space;
}

// m pairwise disjoint realisations, by greedy seeding then exact
// branch-and-bound over tuples in order.
inline std::optional<std::vector<std::vector<Element>>> find_m_array(const RSplitType& type, int m) {
  if (m < 1) fail(errc::kOutOfRange, "m must be at least 1");
  std::vector<std::vector<Element>> tuples;
  for (auto t : type.realizations) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    tuples.push_back(std::move(t));
  }
  auto disjoint = [](const std::vector<Element>& p, const std::vector<Element>& q) {
    std::size_t i = 0, j = 0;
    while (i < p.size() && j < q.size()) {
      if (p[i] == q[j]) return false;
      p[i] < q[j] ? ++i : ++j;
    }
    return true;
  };
  std::vector<std::size_t> chosen;
  auto emit = [&]() {
    std::vector<std::vector<Element>> out;
    for (std::size_t i : chosen) out.push_back(type.realizations[i]);
    return out;
  };
  for (std::size_t i = 0; i < tuples.size() && static_cast<int>(chosen.size()) < m; ++i)
    if (std::all_of(chosen.begin(), chosen.end(), [&](std::size_t c) { return disjoint(tuples[c], tuples[i]); }))
      chosen.push_back(i);
  if (static_cast<int>(chosen.size()) == m) return emit();
  chosen.clear();
  auto rec = [&](auto&& self, std::size_t start) -> bool {
    if (static_cast<int>(chosen.size()) == m) return true;
    if (static_cast<int>(tuples.size() - start) < m - static_cast<int>(chosen.size())) return false;
    for (std::size_t i = start; i < tuples.size(); ++i) {
      if (!std::all_of(chosen.begin(), chosen.end(), [&](std::size_t c) { return disjoint(tuples[c], tuples[i]); }))
        continue;
      chosen.push_back(i);
      if (self(self, i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (rec(rec, 0)) return emit();
  return std::nullopt;
}

inline bool supports_m_array(const RSplitType& type, int m) { return find_m_array(type, m).has_value(); }

// N^M_{R,x,m}(A): how many realised types over A support an m-array.
inline int n_array_count(const Structure& m, const Split& split, int arrays, std::vector<Element> a) {
  int count = 0;
  for (const auto& t : type_space(m, split, std::move(a)).types) count += supports_m_array(t, arrays);
  return count;
}

struct ProbeRow {
  int n = 0;
  int max_count = 0;
  long witness = -1;  // index of the member within its size level
  std::vector<Element> parameters;
};

struct ProbeTable {
  std::vector<ProbeRow> rows;
  std::uint64_t seed = 0;

  bool growing() const { return rows.size() >= 2 && rows.back().max_count > rows.front().max_count; }
  bool constant() const {
    return std::all_of(rows.begin(), rows.end(), [&](const ProbeRow& r) { return r.max_count == rows.front().max_count; });
  }
};

struct ProbeOptions {
  int a_max = 6;
  int exhaustive_max = 3;
  int climb_steps = 48;
  std::uint64_t seed = 1;
  int budget = 0;
};

// Per size n from m |x| up to n_max: the largest N^M over generated members
// and parameter sets. Parameter sets of size <= exhaustive_max are tried
// exhaustively; larger ones by seeded hill-climbing from the best small set.
inline ProbeTable bounded_array_probe(const PropertySpec& spec, int relation, const std::vector<int>& x_positions,
                                      int arrays, int n_max, ProbeOptions options = {}) {
  if (arrays < 1) fail(errc::kOutOfRange, "m must be at least 1");
  ProbeTable table;
  table.seed = options.seed;
  std::mt19937_64 rng(options.seed);
  auto levels = generate_members(spec, n_max, options.budget);
  const int start = std::max<int>(1, arrays * static_cast<int>(x_positions.size()));
  for (int n = start; n <= n_max; ++n) {
    ProbeRow row;
    row.n = n;
    const auto& reps = levels[n].reps;
    for (std::size_t w = 0; w < reps.size(); ++w) {
      const Structure& m = reps[w];
      Split split = make_split(m, relation, x_positions);
      int best = -1;
      std::vector<Element> best_a;
      std::vector<Element> a;
      auto rec = [&](auto&& self, int next) -> void {
        int value = n_array_count(m, split, arrays, a);
        if (value > best) {
          best = value;
          best_a = a;
        }
        if (static_cast<int>(a.size()) == std::min(options.exhaustive_max, options.a_max)) return;
        for (int v = next; v < m.size(); ++v) {
          a.push_back(v);
          self(self, v + 1);
          a.pop_back();
        }
      };
      rec(rec, 0);
      if (options.a_max > options.exhaustive_max && m.size() > options.exhaustive_max) {
        std::vector<Element> current = best_a;
        int current_value = best;
        for (int step = 0; step < options.climb_steps; ++step) {
          std::vector<Element> proposal = current;
          const Element v = static_cast<Element>(rng() % m.size());
          if (std::find(proposal.begin(), proposal.end(), v) != proposal.end()) continue;
          if (static_cast<int>(proposal.size()) < options.a_max && (proposal.empty() || rng() % 2 == 0)) {
            proposal.push_back(v);
          } else if (!proposal.empty()) {
            proposal[rng() % proposal.size()] = v;
          }
          std::sort(proposal.begin(), proposal.end());
          const int value = n_array_count(m, split, arrays, proposal);
          if (value >= current_value) {
            current = proposal;
            current_value = value;
            if (value > best) {
              best = value;
              best_a = proposal;
            }
          }
        }
      }
      if (best > row.max_count || row.witness < 0) {
        row.max_count = std::max(best, 0);
        row.witness = static_cast<long>(w);
        row.parameters = best_a;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct AlgebraicityVerdict {
  bool holds = true;
  std::vector<int> fixed, free;
  std::vector<Element> assignment;
  long completions = 0;
};

// For every split I|J of R's positions and every value of x_I: fewer than k completions.
inline AlgebraicityVerdict is_k_mutually_algebraic(const Structure& m, int relation, int k) {
  if (k < 1) fail(errc::kOutOfRange, "k must be at least 1");
  if (relation < 0 || relation >= m.language().relation_count()) fail(errc::kOutOfRange, "relation index outside the language");
  const TupleSet& ts = m.relation(relation);
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
      if (count >= k) return {false, fixed, free, key, count};
  }
  return {};
}

}  // namespace hspeed
