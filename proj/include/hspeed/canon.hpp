#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hspeed/common.hpp"
#include "hspeed/structure.hpp"

namespace hspeed {

struct CanonicalLabeling {
  Structure form;                       // apply_bijection(M, labeling)
  Permutation labeling;                 // labeling[v] = canonical position of v
  std::vector<Permutation> generators;  // generate Aut(M) (with the initial colouring)
  BigInt group_order = 1;
  std::string key;                      // equal keys <=> isomorphic (same language)
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }
  int size_of(int x) { return size_[find(x)]; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

struct Partition {
  std::vector<std::vector<Element>> cells;
  std::vector<int> cell_of;

  bool discrete() const { return cells.size() == cell_of.size(); }
  void reindex() {
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (Element v : cells[c]) cell_of[v] = static_cast<int>(c);
  }
};

class Canonizer {
 public:
  Canonizer(const Structure& m, std::span<const int> colors) : m_(m), n_(m.size()) {
    incident_.resize(n_);
    for (int r = 0; r < m.language().relation_count(); ++r) {
      const TupleSet& ts = m.relation(r);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        auto t = ts[i];
        for (int j = 0; j < ts.arity(); ++j) {
          bool seen = false;
          for (int q = 0; q < j; ++q) seen = seen || t[q] == t[j];
          if (!seen) incident_[t[j]].push_back({r, static_cast<int>(i)});
        }
      }
    }
    // Initial colour: (user colour, constant index or -1).
    std::vector<std::pair<int, int>> colour(n_, {0, -1});
    if (!colors.empty()) {
      if (static_cast<int>(colors.size()) != n_)
        fail(errc::kInvalidStructure, "colouring length differs from the domain size");
      for (int v = 0; v < n_; ++v) colour[v].first = colors[v];
    }
    for (int c = static_cast<int>(m.constants().size()) - 1; c >= 0; --c)
      colour[m.constants()[c]].second = c;
    colour_ = colour;
    std::vector<Element> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Element a, Element b) { return colour[a] < colour[b]; });
    root_.cell_of.assign(n_, 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i == 0 || colour[order[i]] != colour[order[i - 1]]) root_.cells.emplace_back();
      root_.cells.back().push_back(order[i]);
    }
    root_.reindex();
  }

  CanonicalLabeling run() {
    std::vector<Element> prefix;
    search(root_, prefix, true);
    CanonicalLabeling out;
    out.labeling = best_lab_;
    out.form = apply_bijection(m_, best_lab_);
    out.generators = generators_;
    out.group_order = 1;
    for (long s : orbit_sizes_) out.group_order *= s;
    out.key = make_key();
    return out;
  }

 private:
  static constexpr int kNoJump = -1;

  void refine(Partition& p) const {
    std::vector<std::vector<std::uint64_t>> sig(n_);
    const std::uint64_t base = static_cast<std::uint64_t>(n_) + 2;
    while (true) {
      bool split = false;
      // Only non-singleton cells can split; signatures of their members.
      for (const auto& cell : p.cells) {
        if (cell.size() < 2) continue;
        for (Element v : cell) {
          auto& s = sig[v];
          s.clear();
          for (auto [r, idx] : incident_[v]) {
            auto t = m_.relation(r)[idx];
            std::uint64_t h = static_cast<std::uint64_t>(r) + 1;
            for (Element x : t) h = h * base + (x == v ? 0 : static_cast<std::uint64_t>(p.cell_of[x]) + 1);
            s.push_back(h);
          }
          std::sort(s.begin(), s.end());
        }
      }
      std::vector<std::vector<Element>> next;
      next.reserve(p.cells.size());
      for (auto& cell : p.cells) {
        if (cell.size() < 2) {
          next.push_back(std::move(cell));
          continue;
        }
        std::stable_sort(cell.begin(), cell.end(),
                         [&](Element a, Element b) { return sig[a] < sig[b]; });
        std::size_t start = next.size();
        for (std::size_t i = 0; i < cell.size(); ++i) {
          if (i == 0 || sig[cell[i]] != sig[cell[i - 1]]) next.emplace_back();
          next.back().push_back(cell[i]);
        }
        if (next.size() - start > 1) split = true;
      }
      p.cells = std::move(next);
      p.reindex();
      if (!split) break;
    }
    for (auto& cell : p.cells) std::sort(cell.begin(), cell.end());
  }

  std::vector<int> encode(const std::vector<int>& lab) const {
    std::vector<int> code;
    for (const auto& ts : m_.relations()) {
      std::vector<Element> flat;
      flat.reserve(ts.flat().size());
      for (Element e : ts.flat()) flat.push_back(lab[e]);
      TupleSet sorted(ts.arity(), std::move(flat));
      code.push_back(static_cast<int>(sorted.size()));
      code.insert(code.end(), sorted.flat().begin(), sorted.flat().end());
    }
    for (Element c : m_.constants()) code.push_back(lab[c]);
    return code;
  }

  void prefix_orbits(const std::vector<Element>& prefix, DisjointSets& ds) const {
    for (const auto& g : generators_) {
      bool fixes = std::all_of(prefix.begin(), prefix.end(), [&](Element v) { return g[v] == v; });
      if (!fixes) continue;
      for (int v = 0; v < n_; ++v) ds.unite(v, g[v]);
    }
  }

  void add_generator(const std::vector<int>& target_lab, const std::vector<int>& lab) {
    // g = target^{-1} o lab maps M onto itself.
    std::vector<int> inv(n_);
    for (int v = 0; v < n_; ++v) inv[target_lab[v]] = v;
    Permutation g(n_);
    bool identity = true;
    for (int v = 0; v < n_; ++v) {
      g[v] = inv[lab[v]];
      identity = identity && g[v] == v;
    }
    if (!identity) generators_.push_back(std::move(g));
  }

  int search(Partition p, std::vector<Element>& prefix, bool on_first) {
    refine(p);
    const int depth = static_cast<int>(prefix.size());
    if (p.discrete()) {
      std::vector<int> lab(p.cell_of);
      std::vector<int> code = encode(lab);
      if (!have_first_) {
        have_first_ = true;
        first_lab_ = best_lab_ = lab;
        first_code_ = best_code_ = code;
        first_path_ = prefix;
        return kNoJump;
      }
      if (code == first_code_) {
        add_generator(first_lab_, lab);
        int d = 0;
        while (d < depth && d < static_cast<int>(first_path_.size()) && prefix[d] == first_path_[d]) ++d;
        return d;
      }
      if (code < best_code_) {
        best_code_ = std::move(code);
        best_lab_ = lab;
      } else if (code == best_code_) {
        add_generator(best_lab_, lab);
      }
      return kNoJump;
    }
    std::size_t target = 0;
    while (p.cells[target].size() < 2) ++target;
    const std::vector<Element> cell = p.cells[target];
    std::vector<Element> explored;
    for (std::size_t i = 0; i < cell.size(); ++i) {
      const Element w = cell[i];
      if (!explored.empty()) {
        DisjointSets ds(n_);
        prefix_orbits(prefix, ds);
        bool covered = std::any_of(explored.begin(), explored.end(),
                                   [&](Element u) { return ds.find(u) == ds.find(w); });
        if (covered) continue;
      }
      Partition child = p;
      child.cells[target].erase(std::find(child.cells[target].begin(), child.cells[target].end(), w));
      child.cells.insert(child.cells.begin() + static_cast<std::ptrdiff_t>(target), std::vector<Element>{w});
      child.reindex();
      prefix.push_back(w);
      int jump = search(std::move(child), prefix, on_first && i == 0);
      prefix.pop_back();
      explored.push_back(w);
      if (jump != kNoJump && jump < depth) return jump;
    }
    if (on_first) {
      DisjointSets ds(n_);
      prefix_orbits(prefix, ds);
      if (static_cast<int>(orbit_sizes_.size()) <= depth) orbit_sizes_.resize(depth + 1, 1);
      orbit_sizes_[depth] = ds.size_of(cell[0]);
    }
    return kNoJump;
  }

  std::string make_key() const {
    std::string key;
    auto put = [&](int x) {
      for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((static_cast<unsigned>(x) >> (8 * b)) & 0xFFU));
    };
    put(n_);
    for (int x : best_code_) put(x);
    // Colours by canonical position so coloured inputs compare correctly.
    std::vector<std::pair<int, int>> by_pos(n_);
    for (int v = 0; v < n_; ++v) by_pos[best_lab_[v]] = colour_[v];
    for (auto [a, b] : by_pos) {
      put(a);
      put(b);
    }
    return key;
  }

  const Structure& m_;
  int n_;
  std::vector<std::vector<std::pair<int, int>>> incident_;
  std::vector<std::pair<int, int>> colour_;
  Partition root_;
  bool have_first_ = false;
  std::vector<int> first_lab_, best_lab_, first_code_, best_code_;
  std::vector<Element> first_path_;
  std::vector<Permutation> generators_;
  std::vector<long> orbit_sizes_;
};

}  // namespace detail

// `colors` optionally pins elements to colour classes; automorphisms and
// isomorphisms then respect colours.
inline CanonicalLabeling canonical_labeling(const Structure& m, std::span<const int> colors = {}) {
  return detail::Canonizer(m, colors).run();
}

inline Structure canonical_form(const Structure& m) { return canonical_labeling(m).form; }

inline std::string canonical_key(const Structure& m) { return canonical_labeling(m).key; }

struct AutomorphismGroup {
  std::vector<Permutation> generators;
  BigInt order = 1;
};

inline AutomorphismGroup automorphisms(const Structure& m, std::span<const int> colors = {}) {
  auto c = canonical_labeling(m, colors);
  return {std::move(c.generators), c.group_order};
}

// Witness f with f(M) = N when the structures are isomorphic.
inline std::optional<Permutation> find_isomorphism(const Structure& m, const Structure& n) {
  require_same_language(m, n);
  if (m.size() != n.size()) return std::nullopt;
  auto cm = canonical_labeling(m);
  auto cn = canonical_labeling(n);
  if (cm.key != cn.key) return std::nullopt;
  Permutation inv_n = inverse(cn.labeling);
  Permutation f(m.size());
  for (int v = 0; v < m.size(); ++v) f[v] = inv_n[cm.labeling[v]];
  return f;
}

inline bool is_isomorphic(const Structure& m, const Structure& n) {
  return find_isomorphism(m, n).has_value();
}

// All elements of the group generated by `gens` (small groups only).
inline std::vector<Permutation> close_group(int n, const std::vector<Permutation>& gens) {
  Permutation id(n);
  std::iota(id.begin(), id.end(), 0);
  std::vector<Permutation> group{id};
  std::vector<Permutation> frontier{id};
  std::vector<Permutation> seen{id};
  while (!frontier.empty()) {
    std::vector<Permutation> next;
    for (const auto& p : frontier)
      for (const auto& g : gens) {
        Permutation q(n);
        for (int v = 0; v < n; ++v) q[v] = g[p[v]];
        auto it = std::lower_bound(seen.begin(), seen.end(), q);
        if (it != seen.end() && *it == q) continue;
        seen.insert(it, q);
        next.push_back(q);
        group.push_back(q);
      }
    frontier = std::move(next);
  }
  std::sort(group.begin(), group.end());
  return group;
}

}  // namespace hspeed
