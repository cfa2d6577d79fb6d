#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hspeed/canon.hpp"
#include "hspeed/common.hpp"
#include "hspeed/property.hpp"
#include "hspeed/structure.hpp"
#include "hspeed/template.hpp"

namespace hspeed {

using Float = boost::multiprecision::cpp_bin_float_50;

struct ComponentReport {
  std::vector<std::vector<Element>> components;  // sorted by least element
  std::map<int, int> histogram;                  // size -> number of components
};

// Components of the hypergraph whose edges are the supports of all tuples.
inline ComponentReport components_of(const Structure& m) {
  const int n = m.size();
  detail::DisjointSets ds(n);
  for (const auto& ts : m.relations())
    for (std::size_t i = 0; i < ts.size(); ++i) {
      auto t = ts[i];
      for (int j = 1; j < ts.arity(); ++j) ds.unite(t[0], t[j]);
    }
  std::map<int, std::vector<Element>> groups;
  for (int v = 0; v < n; ++v) groups[ds.find(v)].push_back(v);
  ComponentReport report;
  for (auto& [root, members] : groups) report.components.push_back(std::move(members));
  std::sort(report.components.begin(), report.components.end());
  for (const auto& c : report.components) ++report.histogram[static_cast<int>(c.size())];
  return report;
}

// Every element sharing a tuple with a (including a itself when a occurs).
inline std::vector<Element> neighborhood(const Structure& m, Element a) {
  if (a < 0 || a >= m.size()) fail(errc::kOutOfRange, "element outside the domain");
  std::set<Element> out;
  for (const auto& ts : m.relations())
    for (std::size_t i = 0; i < ts.size(); ++i) {
      auto t = ts[i];
      if (std::find(t.begin(), t.end(), a) != t.end()) out.insert(t.begin(), t.end());
    }
  return {out.begin(), out.end()};
}

struct Census {
  int n_max = 0;
  std::map<int, int> max_multiplicity;  // component size -> most disjoint components of that size in one member
  int largest_component = 0;

  bool larger_exists(int m) const { return largest_component > m; }
};

inline Census component_census(const PropertySpec& spec, int n_max, int budget = 0) {
  Census census;
  census.n_max = n_max;
  for (const auto& level : generate_members(spec, n_max, budget))
    for (const auto& m : level.reps)
      for (const auto& [size, count] : components_of(m).histogram) {
        int& best = census.max_multiplicity[size];
        best = std::max(best, count);
        census.largest_component = std::max(census.largest_component, size);
      }
  return census;
}

struct BlockPartitions {
  BigInt count;        // m! / ((k!)^l l!)
  int m = 0;           // k * floor(n/k)
  int parts = 0;       // floor(n/k)
  Float intermediate;  // Stirling-type lower bound for count
  Float reference;     // n^{n(1-1/k)}
};

// Ways to split [k floor(n/k)] into floor(n/k) blocks of size k.
inline BlockPartitions partitions_into_blocks(int n, int k) {
  if (k < 1 || n < k) fail(errc::kOutOfRange, "need n >= k >= 1");
  BlockPartitions out;
  out.parts = n / k;
  out.m = k * out.parts;
  out.count = factorial(out.m) / (ipow(factorial(k), out.parts) * factorial(out.parts));
  using boost::multiprecision::exp;
  using boost::multiprecision::pow;
  using boost::multiprecision::sqrt;
  const Float m = out.m;
  const Float x = Float(n) / k;
  const Float pi = boost::math::constants::pi<Float>();
  out.intermediate = sqrt(2 * pi) * pow(m, m + Float(0.5)) * exp(-m) /
                     (pow(Float(factorial(k)), out.parts) * pow(x, x + Float(0.5)) * exp(1 - x));
  out.reference = pow(Float(n), Float(n) * (1 - Float(1) / k));
  return out;
}

// The exact comparison count >= ceil(intermediate).
inline bool block_bound_holds(const BlockPartitions& b) {
  return Float(b.count) >= boost::multiprecision::ceil(b.intermediate);
}

struct LowerboundMembers {
  BigInt distinct = 0;
  int parts = 0;     // l
  int residual = 0;  // |B|
  std::vector<Structure> members;  // kept when requested
};

// From a structure with more than floor((n-|D|)/k) disjoint size-k
// components avoiding the constants D: take l of them, part of one more, and
// D, then relabel onto [n] with the extra part and D fixed at the top and the
// l components laid over every split of the rest into blocks of size k.
inline LowerboundMembers component_lowerbound_members(const Structure& family, int k, int n, bool keep = false,
                                                      const PropertySpec* spec = nullptr,
                                                      long budget = 2'000'000) {
  if (k < 1 || n < 0) fail(errc::kOutOfRange, "need k >= 1 and n >= 0");
  std::vector<Element> d = family.constants();
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  if (n < static_cast<int>(d.size())) fail(errc::kInsufficientComponents, "n is smaller than the constant set");
  const int ell = (n - static_cast<int>(d.size())) / k;
  const int residual = n - static_cast<int>(d.size()) - k * ell;
  std::vector<std::vector<Element>> pool;
  for (const auto& c : components_of(family).components) {
    if (static_cast<int>(c.size()) != k) continue;
    bool touches = std::any_of(c.begin(), c.end(), [&](Element v) { return std::binary_search(d.begin(), d.end(), v); });
    if (!touches) pool.push_back(c);
  }
  if (static_cast<int>(pool.size()) < ell + 1)
    fail(errc::kInsufficientComponents, "need " + std::to_string(ell + 1) + " disjoint components of size " +
                                            std::to_string(k) + ", found " + std::to_string(pool.size()));
  const BigInt expected = factorial(k * ell) / (ipow(factorial(k), ell) * factorial(ell));
  if (expected > budget) fail(errc::kBudgetExceeded, "would construct " + expected.str() + " members");

  // A = A_1 .. A_l, then B, then D; restrict once.
  std::vector<Element> a;
  for (int i = 0; i < ell; ++i) a.insert(a.end(), pool[i].begin(), pool[i].end());
  a.insert(a.end(), pool[ell].begin(), pool[ell].begin() + residual);
  a.insert(a.end(), d.begin(), d.end());
  std::vector<Element> sorted_a = a;
  std::sort(sorted_a.begin(), sorted_a.end());
  auto restricted = induced_substructure(family, sorted_a);
  std::vector<int> pos_in_restricted(family.size(), -1);
  for (std::size_t i = 0; i < restricted.original.size(); ++i) pos_in_restricted[restricted.original[i]] = static_cast<int>(i);

  const int n0 = k * ell;
  LowerboundMembers out;
  out.parts = ell;
  out.residual = residual;
  std::set<std::vector<TupleSet>> seen;
  std::vector<Element> f(n, -1);  // restricted index -> target
  for (int i = n0; i < n; ++i) f[pos_in_restricted[a[i]]] = i;
  std::vector<bool> used(n0, false);
  // Blocks are filled in order; each block starts at the least unused point.
  auto rec = [&](auto&& self, int block, int slot) -> void {
    if (block == ell) {
      Structure s = apply_bijection(restricted.structure, f);
      if (spec && !contains(*spec, s)) fail(errc::kInvalidProperty, "constructed structure is not a member");
      if (seen.insert(s.relations()).second && keep) out.members.push_back(std::move(s));
      return;
    }
    const Element source = pool[block][slot];
    int lo = 0;
    int hi = n0;
    if (slot == 0) {
      lo = static_cast<int>(std::find(used.begin(), used.end(), false) - used.begin());
      hi = lo + 1;
    } else {
      lo = f[pos_in_restricted[pool[block][slot - 1]]] + 1;
    }
    for (int t = lo; t < hi; ++t) {
      if (used[t]) continue;
      used[t] = true;
      f[pos_in_restricted[source]] = t;
      if (slot + 1 == k) {
        self(self, block + 1, 0);
      } else {
        self(self, block, slot + 1);
      }
      used[t] = false;
    }
  };
  if (ell > 0) {
    rec(rec, 0, 0);
  } else {
    Structure s = apply_bijection(restricted.structure, f);
    if (spec && !contains(*spec, s)) fail(errc::kInvalidProperty, "constructed structure is not a member");
    seen.insert(s.relations());
    if (keep) out.members.push_back(std::move(s));
  }
  out.distinct = seen.size();
  return out;
}

// Template-backed family: a realisation with every infinite class large
// enough to supply the components.
inline LowerboundMembers component_lowerbound_members(const Template& t, int k, int n, bool keep = false) {
  std::vector<int> block_sizes;
  for (int s : t.sizes) block_sizes.push_back(s == kInfinite ? std::max(t.K + 1, n + k) * k : s);
  std::vector<int> class_of;
  for (std::size_t i = 0; i < block_sizes.size(); ++i) class_of.insert(class_of.end(), block_sizes[i], static_cast<int>(i));
  return component_lowerbound_members(realize_template(t, class_of), k, n, keep);
}

}  // namespace hspeed
