#include <gtest/gtest.h>

#include <random>
#include <set>

#include "hspeed/oscillate.hpp"
#include "oracles.hpp"

using namespace hspeed;

namespace {

Hypergraph graph(int v, std::vector<std::vector<Element>> edges) { return make_hypergraph(2, v, std::move(edges)); }

Hypergraph complete(int r, int v) {
  std::vector<std::vector<Element>> edges;
  if (v < r) return make_hypergraph(r, v, edges);
  std::vector<bool> pick(v, false);
  std::fill(pick.begin(), pick.begin() + r, true);
  do {
    std::vector<Element> e;
    for (int i = 0; i < v; ++i)
      if (pick[i]) e.push_back(i);
    edges.push_back(e);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return make_hypergraph(r, v, edges);
}

Hypergraph cycle(int v) {
  std::vector<std::vector<Element>> edges;
  for (int i = 0; i < v; ++i) edges.push_back({i, (i + 1) % v});
  return graph(v, edges);
}

Hypergraph random_hypergraph(std::mt19937_64& rng, int r, int v, double p) {
  std::vector<std::vector<Element>> edges;
  for (const auto& e : complete(r, v).edges)
    if (oracle::unit(rng) < p) edges.push_back(e);
  return make_hypergraph(r, v, edges);
}

long edges_inside(const Hypergraph& g, std::uint32_t mask) {
  long count = 0;
  for (const auto& e : g.edges) {
    bool in = true;
    for (Element x : e) in = in && ((mask >> x) & 1U);
    count += in;
  }
  return count;
}

Rational oracle_max_density(const Hypergraph& g) {
  Rational best = 0;
  for (std::uint32_t mask = 1; mask < (1U << g.v); ++mask)
    best = std::max(best, Rational(edges_inside(g, mask), std::popcount(mask)));
  return best;
}

bool oracle_strictly_balanced(const Hypergraph& g) {
  const std::uint32_t full = (1U << g.v) - 1;
  for (std::uint32_t mask = 1; mask < full; ++mask)
    if (Rational(edges_inside(g, mask), std::popcount(mask)) >= density(g)) return false;
  return true;
}

bool oracle_in_P(const Hypergraph& g, const std::vector<int>& nu, const Rational& c) {
  for (std::uint32_t mask = 1; mask < (1U << g.v); ++mask) {
    const int size = std::popcount(mask);
    if (std::find(nu.begin(), nu.end(), size) != nu.end() && Rational(edges_inside(g, mask)) > c * size) return false;
  }
  return true;
}

bool connected(const Hypergraph& g) {
  std::vector<int> seen(g.v, 0);
  std::vector<Element> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    Element x = stack.back();
    stack.pop_back();
    for (const auto& e : g.edges)
      if (std::find(e.begin(), e.end(), x) != e.end())
        for (Element y : e)
          if (!seen[y]) {
            seen[y] = 1;
            stack.push_back(y);
          }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s; });
}

std::vector<Hypergraph> structured_corpus() {
  std::vector<Hypergraph> out{complete(2, 4), complete(2, 6), complete(3, 5), complete(3, 7), cycle(3), cycle(5),
                              cycle(8), graph(6, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {4, 5}}),
                              make_hypergraph(3, 4, {{0, 1, 2}}), make_hypergraph(3, 5, {{0, 1, 2}, {0, 3, 4}}),
                              graph(5, {}), graph(1, {})};
  std::vector<std::vector<Element>> tight;
  for (int i = 0; i < 7; ++i) tight.push_back({i, (i + 1) % 7, (i + 2) % 7});
  out.push_back(make_hypergraph(3, 7, tight));
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

TEST(Oscillate, Densities) {
  EXPECT_EQ(density(complete(2, 4)), Rational(3, 2));
  EXPECT_EQ(density(make_hypergraph(3, 3, {{0, 1, 2}})), Rational(1, 3));
  EXPECT_EQ(density(graph(5, {})), 0);
  EXPECT_EQ(error_code([] { density(graph(0, {})); }), "EmptyVertexSet");
  EXPECT_EQ(error_code([] { max_subgraph_density(graph(0, {})); }), "EmptyVertexSet");
  EXPECT_EQ(error_code([] { make_hypergraph(3, 4, {{0, 1}}); }), "InvalidHypergraph");
  EXPECT_EQ(error_code([] { graph(3, {{0, 1}, {1, 0}}); }), "InvalidHypergraph");
  EXPECT_EQ(error_code([] { graph(3, {{0, 3}}); }), "InvalidHypergraph");
}

TEST(Oscillate, MaxDensityExamples) {
  auto k4_minus = graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
  auto d = max_subgraph_density(k4_minus);
  EXPECT_EQ(d.density, Rational(5, 4));
  EXPECT_EQ(d.witness, (std::vector<Element>{0, 1, 2, 3}));
  auto k4_edge = graph(6, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {4, 5}});
  d = max_subgraph_density(k4_edge);
  EXPECT_EQ(d.density, Rational(3, 2));
  EXPECT_EQ(d.witness, (std::vector<Element>{0, 1, 2, 3}));
  d = max_subgraph_density(make_hypergraph(3, 4, {{1, 2, 3}}));
  EXPECT_EQ(d.density, Rational(1, 3));
  EXPECT_EQ(d.witness, (std::vector<Element>{1, 2, 3}));
}

TEST(Oscillate, FlowMatchesSubsetBruteForce) {
  std::mt19937_64 rng(2024);
  auto corpus = structured_corpus();
  for (int i = 0; i < 200; ++i) {
    const int r = 2 + i % 2;
    const int v = 1 + static_cast<int>(rng() % 12);
    corpus.push_back(random_hypergraph(rng, r, v, r == 2 ? 0.1 + 0.5 * oracle::unit(rng) : 0.05 + 0.3 * oracle::unit(rng)));
  }
  for (const auto& g : corpus) {
    auto d = max_subgraph_density(g);
    ASSERT_EQ(d.density, oracle_max_density(g));
    ASSERT_FALSE(d.witness.empty());
    ASSERT_EQ(density(induced_hypergraph(g, d.witness)), d.density);
  }
}

TEST(Oscillate, StrictBalance) {
  EXPECT_TRUE(is_strictly_balanced(cycle(5)));
  EXPECT_TRUE(is_strictly_balanced(complete(2, 4)));
  EXPECT_FALSE(is_strictly_balanced(graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}})));
  std::mt19937_64 rng(5);
  auto corpus = structured_corpus();
  for (int i = 0; i < 300; ++i) corpus.push_back(random_hypergraph(rng, 2 + i % 2, 2 + static_cast<int>(rng() % 6), 0.6));
  int balanced = 0;
  for (const auto& g : corpus) {
    const bool b = is_strictly_balanced(g);
    ASSERT_EQ(b, oracle_strictly_balanced(g));
    if (b && g.v > 1) {
      ASSERT_TRUE(connected(g));
      ++balanced;
    }
  }
  EXPECT_GT(balanced, 20);
  // Above 14 vertices the vertex-deletion route is used.
  EXPECT_TRUE(is_strictly_balanced(cycle(16)));
  auto two = cycle(16);
  two.edges.erase(std::find(two.edges.begin(), two.edges.end(), std::vector<Element>{7, 8}));
  two.edges.push_back({0, 8});
  two = make_hypergraph(2, 16, two.edges);
  EXPECT_FALSE(is_strictly_balanced(two));
}

TEST(Oscillate, FindStrictlyBalanced) {
  const std::vector<std::pair<int, Rational>> feasible{{2, 1}, {2, Rational(3, 2)}, {3, Rational(1, 3)},
                                                       {3, Rational(2, 5)}, {3, Rational(1, 2)}, {3, 1},
                                                       {2, Rational(4, 3)}, {4, Rational(1, 3)}};
  for (const auto& [r, c] : feasible) {
    auto found = find_strictly_balanced(r, c);
    EXPECT_EQ(found.graph.r, r);
    EXPECT_EQ(density(found.graph), c);
    EXPECT_TRUE(oracle_strictly_balanced(found.graph)) << r << " " << c;
  }
  auto one = find_strictly_balanced(3, Rational(1, 3)).graph;
  EXPECT_EQ(one.v, 3);
  EXPECT_EQ(one.e(), 1);
  auto two = find_strictly_balanced(3, Rational(2, 5)).graph;
  EXPECT_EQ(two.v, 5);
  EXPECT_EQ(two.e(), 2);
  EXPECT_EQ(find_strictly_balanced(2, 1).graph, cycle(3));
  EXPECT_EQ(error_code([] { find_strictly_balanced(3, Rational(1, 4)); }), "InfeasibleDensity");
  EXPECT_EQ(error_code([] { find_strictly_balanced(2, Rational(2, 5)); }), "InfeasibleDensity");
  EXPECT_EQ(error_code([] { find_strictly_balanced(2, 0); }), "InfeasibleDensity");
  BalancedOptions tiny;
  tiny.v_max = 5;
  EXPECT_EQ(error_code([&] { find_strictly_balanced(2, Rational(9, 4), tiny); }), "SearchBudgetExceeded");
  EXPECT_TRUE(density_feasible(3, Rational(3, 7)));
  EXPECT_FALSE(density_feasible(3, Rational(2, 7)));
}

TEST(Oscillate, Memberships) {
  EXPECT_TRUE(in_Q(cycle(5), 1));
  EXPECT_TRUE(in_S(cycle(5), 1));
  EXPECT_FALSE(in_S(complete(2, 4), 1));
  EXPECT_FALSE(in_P(complete(2, 4), {3}, Rational(2, 3)));
  EXPECT_TRUE(in_P(cycle(4), {3}, Rational(2, 3)));
  EXPECT_EQ(error_code([] { in_P(complete(2, 30), {15}, 1, 1000); }), "BudgetExceeded");

  std::mt19937_64 rng(99);
  const std::vector<std::vector<int>> nus{{3}, {4}, {3, 5}, {2, 4, 6}};
  for (int i = 0; i < 150; ++i) {
    auto g = random_hypergraph(rng, 2 + i % 2, 2 + static_cast<int>(rng() % 8), 0.4);
    const Rational c(1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 3));
    const bool q = in_Q(g, c);
    if (q) {
      ASSERT_TRUE(in_S(g, c));
    }
    for (const auto& nu : nus) {
      const bool p = in_P(g, nu, c);
      ASSERT_EQ(p, oracle_in_P(g, nu, c));
      if (q) {
        ASSERT_TRUE(p);
      }
    }
  }
  // At n in nu every P-member is an S-member: all graphs on 5 vertices.
  for (const auto& c : {Rational(2, 3), Rational(1), Rational(7, 5)})
    for (std::uint32_t mask = 0; mask < (1U << 10); ++mask) {
      std::vector<std::vector<Element>> edges;
      int bit = 0;
      for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b, ++bit)
          if ((mask >> bit) & 1U) edges.push_back({a, b});
      auto g = graph(5, edges);
      if (in_P(g, {3, 5}, c)) {
        ASSERT_TRUE(in_S(g, c));
      }
    }
}

TEST(Oscillate, BlowupMembers) {
  auto edge3 = make_hypergraph(3, 3, {{0, 1, 2}});
  auto b = blowup_members(edge3, 9, false);
  EXPECT_EQ(b.count, 36);
  EXPECT_EQ(b.members.size(), 36U);
  auto e2 = blowup_members(graph(2, {{0, 1}}), 8, false);
  EXPECT_EQ(e2.count, 24);
  EXPECT_EQ(e2.members.size(), 24U);
  EXPECT_EQ(blowup_members(graph(2, {{0, 1}}), 8, true).members.size(), 0U);

  for (const auto& [h, n] : std::vector<std::pair<Hypergraph, int>>{{edge3, 9},
                                                                   {graph(2, {{0, 1}}), 8},
                                                                   {edge3, 10},
                                                                   {cycle(3), 7},
                                                                   {make_hypergraph(3, 5, {{0, 1, 2}, {0, 3, 4}}), 15},
                                                                   {complete(2, 4), 9}}) {
    auto out = blowup_members(h, n, false);
    std::set<std::vector<std::vector<Element>>> distinct;
    for (const auto& g : out.members) {
      ASSERT_TRUE(in_Q(g, density(h)));
      ASSERT_TRUE(in_S(g, density(h)));
      distinct.insert(g.edges);
    }
    EXPECT_EQ(BigInt(distinct.size()), out.count);
    EXPECT_GE(out.count, out.floor_bound);
    EXPECT_EQ(out.floor_bound, ipow(factorial(n / h.v), static_cast<unsigned>((h.r - 1) * h.e())));
  }
  EXPECT_EQ(error_code([&] { blowup_members(edge3, 8, true); }), "TooSmall");
  EXPECT_EQ(error_code([] { blowup_members(graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}), 20, true); }),
            "NotStrictlyBalanced");
  EXPECT_EQ(error_code([&] { blowup_members(complete(2, 4), 40, false, 100); }), "BudgetExceeded");
}

TEST(Oscillate, UpperBoundSum) {
  // All graphs on 4 vertices with at most 4 edges: C(6,0)+..+C(6,4).
  EXPECT_EQ(s_upper_bound(2, 1, 4), 1 + 6 + 15 + 20 + 15);
  EXPECT_EQ(s_upper_bound(3, Rational(1, 3), 3), 2);
}

TEST(Oscillate, DenseSampler) {
  const Rational c(2, 3);
  auto s = sample_dense_member(2, 3, c, 30, Rational(8, 5), 42);
  EXPECT_GE(static_cast<double>(s.graph.e()), s.edge_floor);
  EXPECT_NEAR(s.edge_floor, 0.5 * std::pow(30.0, -1.6) * 435, 1e-12);
  // Triangle-free, checked on every 3-set.
  for (int a = 0; a < 30; ++a)
    for (int b = a + 1; b < 30; ++b)
      for (int d = b + 1; d < 30; ++d) {
        int inside = 0;
        for (const auto& e : s.graph.edges)
          inside += (e == std::vector<Element>{a, b}) + (e == std::vector<Element>{a, d}) + (e == std::vector<Element>{b, d});
        ASSERT_LE(inside, 2);
      }
  auto again = sample_dense_member(2, 3, c, 30, Rational(8, 5), 42);
  EXPECT_EQ(again.graph, s.graph);
  EXPECT_EQ(again.attempts, s.attempts);
  // Edge deletion keeps membership.
  for (std::size_t i = 0; i < s.graph.edges.size(); ++i) {
    auto smaller = s.graph;
    smaller.edges.erase(smaller.edges.begin() + static_cast<long>(i));
    EXPECT_TRUE(in_P(smaller, {3}, c));
  }
  EXPECT_EQ(error_code([&] { sample_dense_member(2, 3, c, 30, Rational(3, 2), 1); }), "PreconditionFailed");
  EXPECT_EQ(error_code([&] { sample_dense_member(2, 3, c, 5, Rational(8, 5), 1); }), "PreconditionFailed");
  EXPECT_EQ(error_code([&] { sample_dense_member(2, 3, c, 30, Rational(8, 5), 1, 0); }), "SampleBudgetExceeded");

  auto h3 = sample_dense_member(3, 4, Rational(1, 2), 12, Rational(5, 2), 3);
  EXPECT_TRUE(in_P(h3.graph, {4}, Rational(1, 2)));
}

TEST(Oscillate, SequenceBuilder) {
  const Rational c = 1;
  const Rational eps(3, 2);
  auto seq = build_sequence(2, c, eps, 2, sampling_estimator(2, c, eps, 7));
  ASSERT_EQ(seq.nu.size(), 3U);
  ASSERT_EQ(seq.mu.size(), 2U);
  EXPECT_EQ(seq.nu[0], 3);
  for (std::size_t i = 0; i < seq.mu.size(); ++i) {
    EXPECT_LT(seq.nu[i], seq.mu[i]);
    EXPECT_EQ(seq.mu[i], seq.nu[i + 1] - 1);
    const auto& cert = seq.certificates[i];
    EXPECT_EQ(cert.n, seq.mu[i]);
    EXPECT_GE(static_cast<double>(cert.log2_lower), std::pow(cert.n, 0.5));
  }
  auto again = build_sequence(2, c, eps, 2, sampling_estimator(2, c, eps, 7));
  EXPECT_EQ(again.nu, seq.nu);
  EXPECT_EQ(again.mu, seq.mu);

  // A stub estimator makes the greedy choice explicit.
  Estimator stub = [](const std::vector<int>& nu, int n) -> std::optional<SequenceCertificate> {
    if (n < nu.back() + 3) return std::nullopt;
    return SequenceCertificate{n, 1000, 0, "stub", 0};
  };
  auto fixed = build_sequence(3, 1, Rational(3, 2), 3, stub);
  EXPECT_EQ(fixed.nu, (std::vector<int>{4, 8, 12, 16}));
  EXPECT_EQ(fixed.mu, (std::vector<int>{7, 11, 15}));

  Estimator never = [](const std::vector<int>&, int) -> std::optional<SequenceCertificate> { return std::nullopt; };
  EXPECT_EQ(error_code([&] { build_sequence(2, 1, eps, 1, never); }), "EstimatorFailed");
  EXPECT_EQ(error_code([&] { build_sequence(2, 1, 1, 1, never); }), "PreconditionFailed");
  EXPECT_EQ(error_code([&] { build_sequence(3, Rational(1, 3), 4, 1, never); }), "PreconditionFailed");
}
