#include <gtest/gtest.h>

#include <random>
#include <set>

#include "hspeed/template.hpp"
#include "oracles.hpp"

using namespace hspeed;

namespace {

using Rows = std::vector<std::vector<int>>;

Template clique_inf() { return make_template(graph_language(), {kInfinite}, {{"E(x1,x2)", {{0, 0}}}}); }
Template empty_inf() { return make_template(graph_language(), {kInfinite}, {}); }
Template bipartite() {
  return make_template(graph_language(), {kInfinite, kInfinite}, {{"E(x1,x2)", {{0, 1}, {1, 0}}}});
}
Template clique_plus_isolated() {
  return make_template(graph_language(), {1, kInfinite}, {{"E(x1,x2)", {{1, 1}}}});
}
Template clique_empty_joined() {
  return make_template(graph_language(), {kInfinite, kInfinite}, {{"E(x1,x2)", {{0, 1}, {1, 0}, {0, 0}}}});
}

// Labeled graphs compatible with a graph template, by direct enumeration of
// class functions and the edge rule; no library construction involved.
std::set<std::uint64_t> oracle_compatible_masks(const Template& t, int n) {
  const Rows& rows = t.sigma_for("E(x1,x2)");
  auto pairs = oracle::all_pairs(n);
  std::set<std::uint64_t> out;
  const int k = t.k();
  std::vector<int> f(n, 0);
  long total = 1;
  for (int i = 0; i < n; ++i) total *= k;
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<int> load(k, 0);
    for (int v = 0; v < n; ++v) {
      f[v] = static_cast<int>(c % k);
      c /= k;
      ++load[f[v]];
    }
    bool sizes_ok = true;
    for (int i = 0; i < k; ++i)
      sizes_ok = sizes_ok && (t.is_infinite(i) ? load[i] > t.K : load[i] == t.sizes[i]);
    if (!sizes_ok) continue;
    std::uint64_t mask = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      std::vector<int> row{f[pairs[p].first], f[pairs[p].second]};
      if (std::find(rows.begin(), rows.end(), row) != rows.end()) mask |= std::uint64_t{1} << p;
    }
    out.insert(mask);
  }
  return out;
}

// Ordered partitions of [n] meeting the size constraints, by brute force.
long oracle_omega(const Template& t, int n) {
  const int k = t.k();
  long total = 1, count = 0;
  for (int i = 0; i < n; ++i) total *= k;
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<int> load(k, 0);
    for (int v = 0; v < n; ++v) {
      ++load[c % k];
      c /= k;
    }
    bool ok = true;
    for (int i = 0; i < k; ++i) ok = ok && (t.is_infinite(i) ? load[i] > t.K : load[i] == t.sizes[i]);
    count += ok;
  }
  return count;
}

std::string code_of(const Error& e) { return e.code(); }

template <class F>
std::string error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return code_of(e);
  }
  return "";
}

}  // namespace

TEST(Template, ConstructionAndValidation) {
  auto b = bipartite();
  EXPECT_EQ(b.k(), 2);
  EXPECT_EQ(b.K, 2);
  EXPECT_EQ(b.infinite_count(), 2);
  EXPECT_EQ(clique_plus_isolated().K, 2);
  // Two infinite classes that behave identically collapse into one.
  EXPECT_EQ(error_code([] { make_template(graph_language(), {kInfinite, kInfinite}, {}); }), "InvalidTemplate");
  EXPECT_EQ(error_code([] { make_template(graph_language(), {3}, {}); }), "InvalidTemplate");
  EXPECT_EQ(error_code([] { make_template(graph_language(), {kInfinite, 1}, {}); }), "InvalidTemplate");
  EXPECT_EQ(error_code([] { make_template(graph_language(), {kInfinite}, {{"E(x1,x3)", {}}}); }), "InvalidTemplate");
  EXPECT_EQ(error_code([] { make_template(graph_language(), {kInfinite}, {}, 1); }), "InvalidTemplate");
  auto lc = make_language({{"E", 2}}, {"c"});
  EXPECT_EQ(error_code([&] { make_template(lc, {kInfinite}, {}); }), "ConstantsUnsupported");
}

TEST(Template, TemplateOf) {
  std::vector<std::pair<Element, Element>> e;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) e.push_back({a, b});
  auto k5_iso = make_graph(6, e);
  auto d = decomposition(k5_iso);
  ASSERT_EQ(d.k(), 2);
  auto t = template_of(k5_iso, {1});
  EXPECT_EQ(t.sizes, (std::vector<int>{1, kInfinite}));
  EXPECT_EQ(t.sigma_for("E(x1,x2)"), (Rows{{1, 1}}));
  EXPECT_EQ(t, clique_plus_isolated());

  auto lc = make_language({{"E", 2}}, {"c"});
  Structure with_c(lc, 4, {TupleSet(2)}, {0});
  EXPECT_EQ(error_code([&] { template_of(with_c, {0}); }), "ConstantInInfiniteClass");
  EXPECT_EQ(error_code([&] { template_of(with_c, {1}); }), "ConstantsUnsupported");
}

TEST(Template, OmegaAndAutStarExamples) {
  EXPECT_EQ(omega_count(bipartite(), 8), 182);
  EXPECT_EQ(omega_count(clique_plus_isolated(), 5), 5);
  EXPECT_EQ(aut_star(bipartite()).size(), 2U);
  auto clique_and_empty = make_template(graph_language(), {kInfinite, kInfinite}, {{"E(x1,x2)", {{0, 0}}}});
  EXPECT_EQ(aut_star(clique_and_empty).size(), 1U);
  EXPECT_EQ(count_compatible(bipartite(), 8), 91);
  EXPECT_EQ(count_compatible(clique_plus_isolated(), 5), 5);
  for (const auto& t : {bipartite(), clique_plus_isolated(), clique_empty_joined(), clique_and_empty})
    for (int n = 0; n <= 9; ++n) EXPECT_EQ(omega_count(t, n), oracle_omega(t, n)) << n;
}

TEST(Template, CountMatchesEnumerationAndOracle) {
  for (const auto& t : {clique_inf(), empty_inf(), bipartite(), clique_plus_isolated(), clique_empty_joined()}) {
    for (int n = 1; n <= 9; ++n) {
      auto listed = enumerate_compatible(t, n);
      auto masks = oracle_compatible_masks(t, n);
      ASSERT_EQ(listed.size(), masks.size()) << n;
      ASSERT_EQ(BigInt(listed.size()), count_compatible(t, n)) << n;
      std::set<std::vector<TupleSet>> distinct;
      for (const auto& s : listed) distinct.insert(s.relations());
      ASSERT_EQ(distinct.size(), listed.size());
    }
  }
  EXPECT_EQ(enumerate_compatible(clique_empty_joined(), 7).size(), 70U);
  EXPECT_EQ(error_code([] { enumerate_compatible(bipartite(), 11); }), "BudgetExceeded");
}

TEST(Template, EnumeratedMembersHaveWitnessClasses) {
  auto t = clique_empty_joined();
  for (const auto& s : enumerate_compatible(t, 8)) {
    auto c = is_compatible(s, t);
    ASSERT_TRUE(c.compatible);
    ASSERT_EQ(realize_template(t, c.witness), s);
    auto d = decomposition(s);
    ASSERT_EQ(d.k(), t.k());
    for (int v = 0; v < s.size(); ++v)
      for (int w = 0; w < s.size(); ++w) ASSERT_EQ(d.class_of[v] == d.class_of[w], c.witness[v] == c.witness[w]);
  }
}

TEST(Template, IsCompatible) {
  std::vector<std::pair<Element, Element>> e34, e25;
  for (int a = 0; a < 3; ++a)
    for (int b = 3; b < 7; ++b) e34.push_back({a, b});
  for (int a = 0; a < 2; ++a)
    for (int b = 2; b < 7; ++b) e25.push_back({a, b});
  auto k34 = make_graph(7, e34);
  auto c = is_compatible(k34, bipartite());
  ASSERT_TRUE(c.compatible);
  EXPECT_EQ(realize_template(bipartite(), c.witness), k34);
  EXPECT_FALSE(is_compatible(make_graph(7, e25), bipartite()).compatible);
  EXPECT_TRUE(embeds_in_template(make_graph(7, e25), bipartite()));
  EXPECT_FALSE(is_compatible(k34, clique_inf()).compatible);
  auto lang3 = uniform_language(3);
  EXPECT_EQ(error_code([&] { is_compatible(Structure(lang3, 3), bipartite()); }), "LanguageMismatch");

  // Compatibility is invariant under relabelling.
  std::mt19937_64 rng(5);
  auto perms = oracle::permutations(7);
  for (int rep = 0; rep < 20; ++rep) {
    auto img = apply_bijection(k34, perms[rng() % perms.size()]);
    ASSERT_TRUE(is_compatible(img, bipartite()).compatible);
  }
  // Exhaustive agreement with the oracle on all graphs of size 6.
  auto masks = oracle_compatible_masks(bipartite(), 6);
  auto all = oracle::all_graphs(6);
  for (std::size_t m = 0; m < all.size(); ++m)
    ASSERT_EQ(is_compatible(all[m], bipartite()).compatible, masks.count(m) == 1) << m;
}

TEST(Template, SpeedFormExamples) {
  auto f = speed_form(clique_plus_isolated());
  ASSERT_EQ(f.ell(), 1);
  EXPECT_EQ(f.polys[0], (std::vector<Rational>{0, 1}));
  auto g = speed_form(empty_inf());
  EXPECT_EQ(g.polys[0], (std::vector<Rational>{1}));
  auto b = speed_form(bipartite());
  ASSERT_EQ(b.ell(), 2);
  EXPECT_EQ(b.polys[1], (std::vector<Rational>{Rational(1, 2)}));
  EXPECT_EQ(b.polys[0], (std::vector<Rational>{-1, Rational(-1, 2), Rational(-1, 2)}));
  for (int n = 5; n <= 30; ++n) {
    Rational closed = Rational(ipow(BigInt(2), n - 1)) - Rational(n * n + n + 2, 2);
    ASSERT_EQ(b(n), closed);
    ASSERT_EQ(b(n), Rational(count_compatible(bipartite(), n)));
  }
  EXPECT_EQ(b.to_string_form(), "[(1/2)]*2^n + [(-1/2)*n^2 + (-1/2)*n + (-1)]*1^n");
  EXPECT_EQ(error_code([] { speed_form(bipartite(), {6, 7}); }), "FitFailed");
}

TEST(Template, SpeedFormHoldsForAllFixtures) {
  for (const auto& t : {clique_inf(), empty_inf(), bipartite(), clique_plus_isolated(), clique_empty_joined()}) {
    auto f = speed_form(t);
    for (int n = f.threshold; n <= 25; ++n) ASSERT_EQ(f(n), Rational(count_compatible(t, n)));
  }
}

TEST(Template, ThreeUniformTemplate) {
  // Triples meeting both classes.
  Rows rows;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        if (!(a == b && b == c)) rows.push_back({a, b, c});
  auto t = make_template(uniform_language(3), {kInfinite, kInfinite}, {{"E(x1,x2,x3)", rows}});
  EXPECT_EQ(t.K, 3);
  EXPECT_EQ(aut_star(t).size(), 2U);
  for (int n = 1; n <= 9; ++n) ASSERT_EQ(BigInt(enumerate_compatible(t, n).size()), count_compatible(t, n)) << n;
  auto f = speed_form(t);
  for (int n = 13; n <= 20; ++n) ASSERT_EQ(f(n), Rational(count_compatible(t, n)));
}

TEST(Template, EquivalenceAndUnion) {
  auto swapped = make_template(graph_language(), {kInfinite, kInfinite}, {{"E(x1,x2)", {{0, 1}, {1, 0}, {1, 1}}}});
  auto rel = templates_equivalent_or_disjoint(clique_empty_joined(), swapped);
  ASSERT_TRUE(rel.equivalent);
  EXPECT_EQ(rel.sigma, (Permutation{1, 0}));
  EXPECT_TRUE(templates_equivalent_or_disjoint(bipartite(), bipartite()).equivalent);
  EXPECT_FALSE(templates_equivalent_or_disjoint(bipartite(), clique_empty_joined()).equivalent);
  EXPECT_FALSE(templates_equivalent_or_disjoint(clique_inf(), empty_inf()).equivalent);
  auto big_finite = make_template(graph_language(), {3, kInfinite}, {{"E(x1,x2)", {{0, 0}}}});
  EXPECT_EQ(error_code([&] { templates_equivalent_or_disjoint(big_finite, bipartite()); }), "MixedTemplates");
  auto lang3 = uniform_language(3);
  auto t3 = make_template(lang3, {kInfinite}, {});
  EXPECT_EQ(error_code([&] { templates_equivalent_or_disjoint(t3, bipartite()); }), "LanguageMismatch");

  EXPECT_EQ(union_speed({clique_inf(), empty_inf()}, 6), 2);
  EXPECT_EQ(union_speed({bipartite(), empty_inf()}, 8), 92);
  EXPECT_EQ(union_speed({bipartite(), bipartite()}, 8), 91);
  EXPECT_EQ(union_speed({clique_empty_joined(), swapped}, 7), 70);
}
