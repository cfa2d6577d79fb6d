#include <gtest/gtest.h>

#include <queue>
#include <random>

#include "hspeed/components.hpp"
#include "oracles.hpp"

using namespace hspeed;

namespace {

Structure matching(int pairs) {
  std::vector<std::pair<Element, Element>> e;
  for (int i = 0; i < pairs; ++i) e.push_back({2 * i, 2 * i + 1});
  return make_graph(2 * pairs, e);
}

Structure triangles(int count) {
  std::vector<std::pair<Element, Element>> e;
  for (int i = 0; i < count; ++i) {
    int b = 3 * i;
    e.insert(e.end(), {{b, b + 1}, {b + 1, b + 2}, {b, b + 2}});
  }
  return make_graph(3 * count, e);
}

// Set partitions of [m] (restricted growth strings) whose blocks all have size k.
long oracle_block_partitions(int m, int k) {
  std::vector<int> sizes;
  long count = 0;
  auto rec = [&](auto&& self, int i) -> void {
    if (i == m) {
      count += std::all_of(sizes.begin(), sizes.end(), [&](int s) { return s == k; });
      return;
    }
    for (std::size_t b = 0; b <= sizes.size(); ++b) {
      if (b == sizes.size()) sizes.push_back(0);
      if (sizes[b] < k) {
        ++sizes[b];
        self(self, i + 1);
        --sizes[b];
      }
      if (sizes[b] == 0) sizes.pop_back();
    }
  };
  rec(rec, 0);
  return count;
}

// Components by breadth-first search over shared tuple supports.
std::vector<std::vector<Element>> oracle_components(const Structure& m) {
  std::vector<int> seen(m.size(), -1);
  std::vector<std::vector<Element>> out;
  for (int s = 0; s < m.size(); ++s) {
    if (seen[s] >= 0) continue;
    std::vector<Element> comp;
    std::queue<Element> q;
    q.push(s);
    seen[s] = s;
    while (!q.empty()) {
      Element v = q.front();
      q.pop();
      comp.push_back(v);
      for (const auto& ts : m.relations())
        for (std::size_t i = 0; i < ts.size(); ++i) {
          auto t = ts[i];
          if (std::find(t.begin(), t.end(), v) == t.end()) continue;
          for (Element w : t)
            if (seen[w] < 0) {
              seen[w] = s;
              q.push(w);
            }
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(comp);
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class F>
std::string error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST(Components, Examples) {
  auto two = components_of(triangles(2));
  EXPECT_EQ(two.components.size(), 2U);
  EXPECT_EQ(two.histogram, (std::map<int, int>{{3, 2}}));
  auto edge3 = components_of(make_uniform(3, 4, {{0, 1, 2}}));
  EXPECT_EQ(edge3.components, (std::vector<std::vector<Element>>{{0, 1, 2}, {3}}));
  auto path = components_of(make_graph(3, {{0, 1}, {1, 2}}));
  EXPECT_EQ(path.components, (std::vector<std::vector<Element>>{{0, 1, 2}}));
  // A loop makes its element a tuple support on its own.
  auto lang = make_language({{"R", 2}});
  Structure loop(lang, 2, {TupleSet(2, std::vector<Element>{0, 0})});
  EXPECT_EQ(components_of(loop).components.size(), 2U);
  EXPECT_EQ(neighborhood(loop, 0), (std::vector<Element>{0}));
}

TEST(Components, Neighborhoods) {
  EXPECT_EQ(neighborhood(triangles(1), 0), (std::vector<Element>{0, 1, 2}));
  EXPECT_TRUE(neighborhood(make_graph(3, {{0, 1}}), 2).empty());
  EXPECT_EQ(neighborhood(matching(2), 2), (std::vector<Element>{2, 3}));
  EXPECT_EQ(error_code([] { neighborhood(matching(2), 4); }), "OutOfRange");
}

TEST(Components, PartitionInvariantsRandom) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 9);
    auto m = oracle::random_mixed(rng, n, 0.03 + 0.02 * (rep % 5));
    auto report = components_of(m);
    ASSERT_EQ(report.components, oracle_components(m));
    std::vector<int> owner(n, -1);
    for (std::size_t c = 0; c < report.components.size(); ++c)
      for (Element v : report.components[c]) {
        ASSERT_EQ(owner[v], -1);
        owner[v] = static_cast<int>(c);
      }
    for (int v = 0; v < n; ++v) ASSERT_GE(owner[v], 0);
    for (const auto& ts : m.relations())
      for (std::size_t i = 0; i < ts.size(); ++i)
        for (Element w : ts[i]) ASSERT_EQ(owner[w], owner[ts[i][0]]);
  }
}

TEST(Components, NeighborhoodBoundOnTotallyBoundedMembers) {
  // Matchings are totally 2-bounded: |N(a)| <= r k |L| = 4.
  auto spec = builtin_predicate("matching");
  for (const auto& level : generate_members(spec, 8))
    for (const auto& m : level.reps) {
      ASSERT_FALSE(bounded_violation(m, 2).has_value());
      for (int a = 0; a < m.size(); ++a) ASSERT_LE(neighborhood(m, a).size(), 4U);
    }
}

TEST(Components, CensusExamples) {
  auto matchings = component_census(builtin_predicate("matching"), 8);
  EXPECT_EQ(matchings.max_multiplicity, (std::map<int, int>{{1, 8}, {2, 4}}));
  EXPECT_FALSE(matchings.larger_exists(2));
  auto edgeless = component_census(forbid_induced({make_graph(2, {{0, 1}})}), 8);
  EXPECT_EQ(edgeless.max_multiplicity, (std::map<int, int>{{1, 8}}));
  auto all = component_census(builtin_predicate("all-graphs"), 7);
  for (int size = 1; size <= 7; ++size) EXPECT_GE(all.max_multiplicity[size], 1) << size;
  EXPECT_EQ(all.max_multiplicity[1], 7);
  EXPECT_EQ(all.max_multiplicity[3], 2);
}

TEST(Components, PartitionsIntoBlocks) {
  EXPECT_EQ(partitions_into_blocks(6, 2).count, 15);
  EXPECT_EQ(partitions_into_blocks(6, 3).count, 10);
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(partitions_into_blocks(k, k).count, 1);
  EXPECT_EQ(partitions_into_blocks(7, 2).count, 15);  // uses [6]
  EXPECT_EQ(error_code([] { partitions_into_blocks(2, 3); }), "OutOfRange");
  for (int n = 1; n <= 10; ++n)
    for (int k = 1; k <= n; ++k)
      ASSERT_EQ(partitions_into_blocks(n, k).count, oracle_block_partitions(k * (n / k), k)) << n << "," << k;
  // Product form: pick the partner set of the least remaining point each time.
  for (int n = 1; n <= 40; ++n)
    for (int k = 1; k <= std::min(n, 6); ++k) {
      const int m = k * (n / k);
      BigInt product = 1;
      for (int rest = m; rest > 0; rest -= k) product *= binomial(rest - 1, k - 1);
      ASSERT_EQ(partitions_into_blocks(n, k).count, product);
    }
}

TEST(Components, StirlingIntermediateBound) {
  for (int n = 10; n <= 40; ++n)
    for (int k = 2; k <= 4; ++k) {
      auto b = partitions_into_blocks(n, k);
      ASSERT_TRUE(block_bound_holds(b)) << n << "," << k;
      ASSERT_GT(b.intermediate, 0);
    }
  auto b = partitions_into_blocks(16, 2);
  EXPECT_EQ(b.reference.convert_to<double>(), 4294967296.0);  // 16^8
}

TEST(Components, LowerboundMembers) {
  auto spec = builtin_predicate("matching");
  auto m = component_lowerbound_members(matching(4), 2, 6, true, &spec);
  EXPECT_EQ(m.distinct, 15);
  EXPECT_EQ(m.members.size(), 15U);
  std::set<std::vector<TupleSet>> distinct;
  for (const auto& s : m.members) {
    EXPECT_TRUE(contains(spec, s));
    EXPECT_EQ(s.size(), 6);
    distinct.insert(s.relations());
  }
  EXPECT_EQ(distinct.size(), 15U);
  EXPECT_EQ(component_lowerbound_members(matching(4), 2, 7).distinct, 15);
  EXPECT_EQ(component_lowerbound_members(triangles(3), 3, 6).distinct, 10);
  EXPECT_EQ(component_lowerbound_members(make_graph(7, {}), 1, 6).distinct, 1);
  EXPECT_EQ(error_code([] { component_lowerbound_members(matching(3), 2, 6); }), "InsufficientComponents");
  for (int n = 2; n <= 9; ++n)
    EXPECT_GE(component_lowerbound_members(matching(6), 2, n).distinct, partitions_into_blocks(n, 2).count);
  auto empty = make_template(graph_language(), {kInfinite}, {});
  EXPECT_EQ(component_lowerbound_members(empty, 1, 5).distinct, 1);
}
