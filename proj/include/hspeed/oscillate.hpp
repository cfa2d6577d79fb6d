#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hspeed/common.hpp"

namespace hspeed {

struct Hypergraph {
  int r = 2;
  int v = 0;
  std::vector<std::vector<Element>> edges;  // each sorted; list sorted

  long e() const { return static_cast<long>(edges.size()); }
  bool operator==(const Hypergraph&) const = default;
};

inline Hypergraph make_hypergraph(int r, int v, std::vector<std::vector<Element>> edges) {
  if (r < 2) fail(errc::kInvalidHypergraph, "uniformity must be at least 2");
  if (v < 0) fail(errc::kInvalidHypergraph, "negative vertex count");
  for (auto& edge : edges) {
    if (static_cast<int>(edge.size()) != r)
      fail(errc::kInvalidHypergraph, "edge of size " + std::to_string(edge.size()) + " in an r=" + std::to_string(r) +
                                         " hypergraph");
    std::sort(edge.begin(), edge.end());
    if (std::adjacent_find(edge.begin(), edge.end()) != edge.end())
      fail(errc::kInvalidHypergraph, "edge with a repeated vertex");
    if (edge.front() < 0 || edge.back() >= v) fail(errc::kInvalidHypergraph, "edge vertex outside [v]");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    fail(errc::kInvalidHypergraph, "duplicate edge");
  return {r, v, std::move(edges)};
}

namespace detail {

inline void for_each_subset(int n, int k, const std::function<bool(const std::vector<Element>&)>& visit) {
  if (k > n || k < 0) return;
  std::vector<Element> s(k);
  for (int i = 0; i < k; ++i) s[i] = i;
  while (true) {
    if (!visit(s)) return;
    int i = k - 1;
    while (i >= 0 && s[i] == n - k + i) --i;
    if (i < 0) return;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

inline std::vector<std::uint64_t> edge_masks(const Hypergraph& g) {
  if (g.v > 64) fail(errc::kOutOfRange, "bitmask scans need at most 64 vertices");
  std::vector<std::uint64_t> out;
  out.reserve(g.edges.size());
  for (const auto& edge : g.edges) {
    std::uint64_t m = 0;
    for (Element x : edge) m |= std::uint64_t{1} << x;
    out.push_back(m);
  }
  return out;
}

inline long edges_within(const std::vector<std::uint64_t>& masks, std::uint64_t set) {
  long count = 0;
  for (auto m : masks) count += (m & set) == m;
  return count;
}

// Dinic on integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : adj_(n), level_(n), it_(n) {}

  void add(int from, int to, long long cap) {
    adj_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({to, cap});
    adj_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({from, 0});
  }

  long long run(int s, int t) {
    long long flow = 0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (long long pushed = dfs(s, t, std::numeric_limits<long long>::max())) flow += pushed;
    }
    return flow;
  }

  // Nodes reachable from s in the residual graph after run().
  std::vector<bool> source_side(int s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::queue<int> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int id : adj_[u])
        if (arcs_[id].cap > 0 && !seen[arcs_[id].to]) {
          seen[arcs_[id].to] = true;
          q.push(arcs_[id].to);
        }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    long long cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    q.push(s);
    level_[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int id : adj_[u])
        if (arcs_[id].cap > 0 && level_[arcs_[id].to] < 0) {
          level_[arcs_[id].to] = level_[u] + 1;
          q.push(arcs_[id].to);
        }
    }
    return level_[t] >= 0;
  }

  long long dfs(int u, int t, long long limit) {
    if (u == t) return limit;
    for (int& i = it_[u]; i < static_cast<int>(adj_[u].size()); ++i) {
      Arc& a = arcs_[adj_[u][i]];
      if (a.cap <= 0 || level_[a.to] != level_[u] + 1) continue;
      long long got = dfs(a.to, t, std::min(limit, a.cap));
      if (got > 0) {
        a.cap -= got;
        arcs_[adj_[u][i] ^ 1].cap += got;
        return got;
      }
    }
    return 0;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<int> it_;
};

// Min cut of the density network at lambda = p/q; the cut is below e*q
// exactly when some vertex set has density above lambda.
inline std::pair<bool, std::vector<Element>> denser_than(const Hypergraph& g, const Rational& lambda) {
  const long long p = static_cast<long long>(boost::multiprecision::numerator(lambda));
  const long long q = static_cast<long long>(boost::multiprecision::denominator(lambda));
  const int e = static_cast<int>(g.e());
  const int source = 0;
  const int sink = e + g.v + 1;
  MaxFlow flow(e + g.v + 2);
  const long long inf = static_cast<long long>(e) * q + 1;
  for (int i = 0; i < e; ++i) {
    flow.add(source, 1 + i, q);
    for (Element x : g.edges[i]) flow.add(1 + i, 1 + e + x, inf);
  }
  for (int x = 0; x < g.v; ++x) flow.add(1 + e + x, sink, p);
  const long long cut = flow.run(source, sink);
  if (cut >= static_cast<long long>(e) * q) return {false, {}};
  auto side = flow.source_side(source);
  std::vector<Element> u;
  for (int x = 0; x < g.v; ++x)
    if (side[1 + e + x]) u.push_back(x);
  return {true, u};
}

}  // namespace detail

inline Rational density(const Hypergraph& g) {
  if (g.v < 1) fail(errc::kEmptyVertexSet, "density needs at least one vertex");
  return Rational(g.e(), g.v);
}

inline Hypergraph induced_hypergraph(const Hypergraph& g, const std::vector<Element>& vertices) {
  std::vector<int> pos(g.v, -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) pos[vertices[i]] = static_cast<int>(i);
  std::vector<std::vector<Element>> edges;
  for (const auto& edge : g.edges) {
    std::vector<Element> mapped;
    for (Element x : edge)
      if (pos[x] >= 0) mapped.push_back(pos[x]);
    if (mapped.size() == edge.size()) edges.push_back(mapped);
  }
  return make_hypergraph(g.r, static_cast<int>(vertices.size()), std::move(edges));
}

struct DensestSubgraph {
  Rational density;
  std::vector<Element> witness;
};

// Parametric max-flow: the optimum is one of the fractions e'/v' with
// v' <= v and e' <= e, so binary search over those candidates.
inline DensestSubgraph max_subgraph_density(const Hypergraph& g) {
  if (g.v < 1) fail(errc::kEmptyVertexSet, "density needs at least one vertex");
  std::set<Rational> pool;
  for (int vv = 1; vv <= g.v; ++vv) {
    const BigInt cap = binomial(vv, g.r);
    for (long ee = 0; ee <= g.e() && ee <= cap; ++ee) pool.insert(Rational(ee, vv));
  }
  std::vector<Rational> cand(pool.begin(), pool.end());
  std::size_t lo = 0;
  std::size_t hi = cand.size() - 1;  // the true maximum is never above cand.back()
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (detail::denser_than(g, cand[mid]).first) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  DensestSubgraph out;
  out.density = cand[lo];
  if (lo == 0) {
    out.witness.resize(g.v);
    for (int x = 0; x < g.v; ++x) out.witness[x] = x;
  } else {
    out.witness = detail::denser_than(g, cand[lo - 1]).second;
  }
  return out;
}

inline bool is_strictly_balanced(const Hypergraph& g) {
  if (g.v <= 1) return true;
  const Rational rho = density(g);
  if (g.v <= 14) {
    auto masks = detail::edge_masks(g);
    const std::uint64_t full = (std::uint64_t{1} << g.v) - 1;
    for (std::uint64_t s = 1; s < full; ++s) {
      const long inside = detail::edges_within(masks, s);
      if (inside * g.v >= g.e() * std::popcount(s)) return false;
    }
    return true;
  }
  for (int drop = 0; drop < g.v; ++drop) {
    std::vector<Element> keep;
    for (int x = 0; x < g.v; ++x)
      if (x != drop) keep.push_back(x);
    if (max_subgraph_density(induced_hypergraph(g, keep)).density >= rho) return false;
  }
  return true;
}

inline bool in_Q(const Hypergraph& g, const Rational& c) { return g.v == 0 || max_subgraph_density(g).density <= c; }

inline bool in_S(const Hypergraph& g, const Rational& c) { return Rational(g.e()) <= c * g.v; }

// Densities are only enforced on vertex sets whose size is listed in nu.
inline bool in_P(const Hypergraph& g, const std::vector<int>& nu, const Rational& c, long budget = 5'000'000) {
  BigInt work = 0;
  for (int size : nu)
    if (size >= 1 && size <= g.v && Rational(g.e()) > c * size) work += binomial(g.v, size);
  if (work > budget) fail(errc::kBudgetExceeded, "in_P would scan " + work.str() + " vertex sets");
  auto masks = detail::edge_masks(g);
  for (int size : nu) {
    if (size < 1 || size > g.v || Rational(g.e()) <= c * size) continue;
    const Rational limit = c * size;
    bool ok = true;
    detail::for_each_subset(g.v, size, [&](const std::vector<Element>& s) {
      std::uint64_t set = 0;
      for (Element x : s) set |= std::uint64_t{1} << x;
      ok = Rational(detail::edges_within(masks, set)) <= limit;
      return ok;
    });
    if (!ok) return false;
  }
  return true;
}

// Strictly balanced r-uniform hypergraphs of density c exist exactly when
// c >= 1/(r-1) or c = k/(1+k(r-1)) for an integer k >= 1.
inline std::optional<int> sunflower_petals(int r, const Rational& c) {
  const Rational slack = 1 - c * (r - 1);
  if (c <= 0 || slack <= 0) return std::nullopt;
  const Rational k = c / slack;
  if (!is_integer(k)) return std::nullopt;
  return static_cast<int>(boost::multiprecision::numerator(k));
}

inline bool density_feasible(int r, const Rational& c) {
  return c >= Rational(1, r - 1) || sunflower_petals(r, c).has_value();
}

struct BalancedSearch {
  Hypergraph graph;
  std::string source;  // sunflower | tight-cycle | complete | exhaustive | random
  long checked = 0;
};

struct BalancedOptions {
  int v_max = 12;
  long exhaustive_limit = 20'000;  // edge sets per v tried exhaustively
  long random_tries = 2'000;       // per v when exhaustive is too large
  long budget = 400'000;           // total candidates checked
  std::uint64_t seed = 1;
};

inline BalancedSearch find_strictly_balanced(int r, const Rational& c, BalancedOptions options = {}) {
  if (r < 2) fail(errc::kInvalidHypergraph, "uniformity must be at least 2");
  if (c < 0) fail(errc::kPrecondition, "density must be nonnegative");
  if (!density_feasible(r, c))
    fail(errc::kInfeasibleDensity, "no strictly balanced " + std::to_string(r) + "-uniform hypergraph has density " +
                                       to_string(c));
  BalancedSearch out;
  auto certified = [&](const Hypergraph& h) {
    ++out.checked;
    return h.v >= 1 && density(h) == c && is_strictly_balanced(h);
  };

  if (auto k = sunflower_petals(r, c)) {
    std::vector<std::vector<Element>> edges;
    for (int i = 0; i < *k; ++i) {
      std::vector<Element> edge{0};
      for (int j = 0; j < r - 1; ++j) edge.push_back(1 + i * (r - 1) + j);
      edges.push_back(edge);
    }
    auto h = make_hypergraph(r, 1 + *k * (r - 1), edges);
    if (certified(h)) return {h, "sunflower", out.checked};
  }
  if (c == 1) {
    const int v = r + 1;
    std::vector<std::vector<Element>> edges;
    for (int i = 0; i < v; ++i) {
      std::vector<Element> edge;
      for (int j = 0; j < r; ++j) edge.push_back((i + j) % v);
      edges.push_back(edge);
    }
    auto h = make_hypergraph(r, v, edges);
    if (certified(h)) return {h, "tight-cycle", out.checked};
  }
  for (int v = r; v <= options.v_max; ++v)
    if (Rational(binomial(v, r), v) == c) {
      std::vector<std::vector<Element>> edges;
      detail::for_each_subset(v, r, [&](const std::vector<Element>& s) {
        edges.push_back(s);
        return true;
      });
      auto h = make_hypergraph(r, v, edges);
      if (certified(h)) return {h, "complete", out.checked};
    }

  std::mt19937_64 rng(options.seed);
  for (int v = r; v <= options.v_max; ++v) {
    const Rational e_exact = c * v;
    if (!is_integer(e_exact)) continue;
    const long e = static_cast<long>(boost::multiprecision::numerator(e_exact));
    std::vector<std::vector<Element>> all;
    detail::for_each_subset(v, r, [&](const std::vector<Element>& s) {
      all.push_back(s);
      return true;
    });
    if (e < 1 || e > static_cast<long>(all.size())) continue;
    const int slots = static_cast<int>(all.size());
    if (binomial(slots, static_cast<int>(e)) <= options.exhaustive_limit) {
      std::optional<Hypergraph> found;
      detail::for_each_subset(slots, static_cast<int>(e), [&](const std::vector<Element>& pick) {
        if (out.checked >= options.budget) return false;
        std::vector<std::vector<Element>> edges;
        for (Element i : pick) edges.push_back(all[i]);
        auto h = make_hypergraph(r, v, edges);
        if (certified(h)) found = h;
        return !found;
      });
      if (found) return {*found, "exhaustive", out.checked};
    } else {
      std::vector<int> order(slots);
      for (long attempt = 0; attempt < options.random_tries && out.checked < options.budget; ++attempt) {
        for (int i = 0; i < slots; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::vector<Element>> edges;
        for (long i = 0; i < e; ++i) edges.push_back(all[order[i]]);
        auto h = make_hypergraph(r, v, edges);
        if (certified(h)) return {h, "random", out.checked};
      }
    }
    if (out.checked >= options.budget) break;
  }
  fail(errc::kSearchBudgetExceeded, "no certified hypergraph found after " + std::to_string(out.checked) +
                                        " candidates (v <= " + std::to_string(options.v_max) + ")");
}

struct Blowup {
  BigInt count;        // distinct members constructed
  BigInt floor_bound;  // (floor(n/t)!)^{(r-1) e(H)}
  std::vector<int> part_sizes;
  std::vector<Hypergraph> members;  // filled unless count_only
};

// Equipartition [n] into W_1..W_t (contiguous, larger parts first); for each
// edge of H pick a maximal matching across its parts. Edges of different
// H-edges sit over different part sets, so distinct choices give distinct G.
inline Blowup blowup_members(const Hypergraph& h, int n, bool count_only, long budget = 200'000) {
  const int t = h.v;
  if (t < 1) fail(errc::kEmptyVertexSet, "H has no vertices");
  if (n < t * h.r) fail(errc::kTooSmall, "need n >= t r = " + std::to_string(t * h.r));
  if (!is_strictly_balanced(h)) fail(errc::kNotStrictlyBalanced, "H is not strictly balanced");
  Blowup out;
  std::vector<int> start(t + 1, 0);
  for (int x = 0; x < t; ++x) {
    out.part_sizes.push_back(n / t + (x < n % t ? 1 : 0));
    start[x + 1] = start[x] + out.part_sizes[x];
  }
  out.floor_bound = ipow(factorial(n / t), static_cast<unsigned>((h.r - 1) * h.e()));
  out.count = 1;
  for (const auto& edge : h.edges) {
    int m = n;
    for (Element x : edge) m = std::min(m, out.part_sizes[x]);
    // Sort the edge's parts so the first is a smallest one, fully covered.
    BigInt ways = 1;
    bool skipped_smallest = false;
    for (Element x : edge) {
      if (!skipped_smallest && out.part_sizes[x] == m) {
        skipped_smallest = true;
        continue;
      }
      ways *= factorial(out.part_sizes[x]) / factorial(out.part_sizes[x] - m);
    }
    out.count *= ways;
  }
  if (count_only) return out;
  if (out.count > budget) fail(errc::kBudgetExceeded, "would list " + out.count.str() + " members");

  // Per H-edge, the list of maximal matchings.
  std::vector<std::vector<std::vector<std::vector<Element>>>> choices;
  for (const auto& edge : h.edges) {
    std::vector<Element> parts(edge.begin(), edge.end());
    std::stable_sort(parts.begin(), parts.end(),
                     [&](Element a, Element b) { return out.part_sizes[a] < out.part_sizes[b]; });
    const int m = out.part_sizes[parts[0]];
    std::vector<std::vector<std::vector<Element>>> matchings;
    std::vector<std::vector<Element>> rows(m, std::vector<Element>{});
    for (int i = 0; i < m; ++i) rows[i].push_back(start[parts[0]] + i);
    std::vector<std::vector<bool>> used(parts.size());
    for (std::size_t j = 1; j < parts.size(); ++j) used[j].assign(out.part_sizes[parts[j]], false);
    auto rec = [&](auto&& self, std::size_t j, int i) -> void {
      if (j == parts.size()) {
        std::vector<std::vector<Element>> es;
        for (auto row : rows) {
          std::sort(row.begin(), row.end());
          es.push_back(row);
        }
        matchings.push_back(es);
        return;
      }
      if (i == m) {
        self(self, j + 1, 0);
        return;
      }
      for (int w = 0; w < out.part_sizes[parts[j]]; ++w) {
        if (used[j][w]) continue;
        used[j][w] = true;
        rows[i].push_back(start[parts[j]] + w);
        self(self, j, i + 1);
        rows[i].pop_back();
        used[j][w] = false;
      }
    };
    rec(rec, 1, 0);
    choices.push_back(std::move(matchings));
  }
  std::vector<std::size_t> pick(choices.size(), 0);
  while (true) {
    std::vector<std::vector<Element>> edges;
    for (std::size_t i = 0; i < choices.size(); ++i)
      edges.insert(edges.end(), choices[i][pick[i]].begin(), choices[i][pick[i]].end());
    out.members.push_back(make_hypergraph(h.r, n, edges));
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return out;
}

// Upper bound on |S^c_n|: sum over j <= c n of C(C(n,r), j).
inline BigInt s_upper_bound(int r, const Rational& c, int n) {
  const BigInt slots = binomial(n, r);
  const Rational cap = c * n;
  const BigInt j_max = boost::multiprecision::numerator(cap) / boost::multiprecision::denominator(cap);
  BigInt total = 0;
  const int top = static_cast<int>(std::min<BigInt>(j_max, slots));
  for (int j = 0; j <= top; ++j) total += binomial(static_cast<int>(slots), j);
  return total;
}

struct DenseSample {
  Hypergraph graph;
  double p = 0;
  double edge_floor = 0;   // p C(n,r) / 2
  long attempts = 0;
  std::string verification;  // how P-membership was certified
  long closure_checks = 0;   // edge-deleted copies re-verified
  std::uint64_t seed = 0;
};

namespace detail {

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// P-membership certificate: Q-membership by flow settles it outright;
// otherwise each constrained size is scanned exhaustively when small
// enough and by random vertex sets beyond that.
inline std::optional<std::string> certify_P(const Hypergraph& g, const std::vector<int>& nu, const Rational& c,
                                            std::mt19937_64& rng, long exhaustive_limit, long samples) {
  if (in_Q(g, c)) return "density";
  auto masks = edge_masks(g);
  bool sampled = false;
  for (int size : nu) {
    if (size < 1 || size > g.v || Rational(g.e()) <= c * size) continue;
    const Rational limit = c * size;
    if (binomial(g.v, size) <= exhaustive_limit) {
      bool ok = true;
      for_each_subset(g.v, size, [&](const std::vector<Element>& s) {
        std::uint64_t set = 0;
        for (Element x : s) set |= std::uint64_t{1} << x;
        ok = Rational(edges_within(masks, set)) <= limit;
        return ok;
      });
      if (!ok) return std::nullopt;
    } else {
      sampled = true;
      std::vector<Element> verts(g.v);
      for (long i = 0; i < samples; ++i) {
        for (int x = 0; x < g.v; ++x) verts[x] = x;
        std::uint64_t set = 0;
        for (int j = 0; j < size; ++j) {
          std::swap(verts[j], verts[j + rng() % (g.v - j)]);
          set |= std::uint64_t{1} << verts[j];
        }
        if (Rational(edges_within(masks, set)) > limit) return std::nullopt;
      }
    }
  }
  return sampled ? "sampled" : "exhaustive";
}

inline DenseSample sample_dense(int r, const std::vector<int>& nu, const Rational& c, int n, double delta,
                                std::uint64_t seed, long max_attempts, long exhaustive_limit = 1'000'000) {
  if (n > 64) fail(errc::kOutOfRange, "the sampler handles at most 64 vertices");
  std::vector<std::vector<Element>> slots;
  for_each_subset(n, r, [&](const std::vector<Element>& s) {
    slots.push_back(s);
    return true;
  });
  using Float = boost::multiprecision::cpp_bin_float_50;
  const Float p_exact = boost::multiprecision::pow(Float(n), Float(-delta));
  const Float floor_exact = p_exact * Float(slots.size()) / 2;
  DenseSample out;
  out.seed = seed;
  out.p = p_exact.convert_to<double>();
  out.edge_floor = floor_exact.convert_to<double>();
  std::mt19937_64 rng(seed);
  for (out.attempts = 1; out.attempts <= max_attempts; ++out.attempts) {
    std::vector<std::vector<Element>> edges;
    for (const auto& s : slots)
      if (unit(rng) < out.p) edges.push_back(s);
    if (Float(edges.size()) < floor_exact) continue;
    auto g = make_hypergraph(r, n, std::move(edges));
    auto mode = certify_P(g, nu, c, rng, exhaustive_limit, 20'000);
    if (!mode) continue;
    out.graph = std::move(g);
    out.verification = *mode;
    // Constraints only bound edge counts, so deleting edges keeps membership.
    for (long i = 0; i < std::min<long>(4, out.graph.e()); ++i) {
      Hypergraph smaller = out.graph;
      smaller.edges.erase(smaller.edges.begin() + static_cast<long>(rng() % smaller.edges.size()));
      if (!certify_P(smaller, nu, c, rng, exhaustive_limit, 2'000))
        fail(errc::kPrecondition, "edge deletion left P; constraints are not monotone");
      ++out.closure_checks;
    }
    return out;
  }
  fail(errc::kSampleBudgetExceeded, "no member after " + std::to_string(max_attempts) + " samples (n=" +
                                        std::to_string(n) + ", p=" + std::to_string(out.p) + ", edge floor " +
                                        std::to_string(out.edge_floor) + ")");
}

}  // namespace detail

// Rejection-samples G(n, n^-delta) until a member of P^{(k),c}_n with at
// least half the expected edge count turns up. Every edge subset of the
// result is again a member, so 2^{e(G)} bounds |P^{(k),c}_n| from below.
inline DenseSample sample_dense_member(int r, int k, const Rational& c, int n, const Rational& delta,
                                       std::uint64_t seed, long max_attempts = 10'000) {
  if (r < 2) fail(errc::kInvalidHypergraph, "uniformity must be at least 2");
  if (c <= 0 || delta * c <= 1) fail(errc::kPrecondition, "need c > 0 and delta > 1/c");
  if (static_cast<long>(k) * r > n) fail(errc::kPrecondition, "need k r <= n");
  return detail::sample_dense(r, {k}, c, n, to_double(delta), seed, max_attempts);
}

struct SequenceCertificate {
  int n = 0;
  long log2_lower = 0;  // e(G) of a certified member
  double target = 0;    // n^{r - eps}
  std::string verification;
  std::uint64_t seed = 0;
};

// Certified lower bound on log2 |P^{nu,c}_n|, or nothing.
using Estimator = std::function<std::optional<SequenceCertificate>(const std::vector<int>& nu, int n)>;

struct OscSequence {
  int r = 2;
  Rational c;
  Rational eps;
  std::vector<int> nu;  // nu_0 = r + 1, strictly increasing
  std::vector<int> mu;  // mu_i = nu_{i+1} - 1; upper bounds on the minimal choice
  std::vector<SequenceCertificate> certificates;  // one per mu
};

// Best of several samples at edge probability n^-delta, delta midway
// between 1/c and eps.
inline Estimator sampling_estimator(int r, const Rational& c, const Rational& eps, std::uint64_t seed,
                                    int tries = 8) {
  const double delta = (to_double(1 / c) + to_double(eps)) / 2;
  const double exponent = r - to_double(eps);
  return [=](const std::vector<int>& nu, int n) -> std::optional<SequenceCertificate> {
    std::optional<SequenceCertificate> best;
    for (int i = 0; i < tries; ++i) {
      const std::uint64_t s = seed * 1'000'003ULL + static_cast<std::uint64_t>(n) * 1'009ULL + i;
      try {
        auto sample = detail::sample_dense(r, nu, c, n, delta, s, 200);
        if (!best || sample.graph.e() > best->log2_lower)
          best = SequenceCertificate{n, sample.graph.e(), std::pow(n, exponent), sample.verification, s};
      } catch (const Error& e) {
        if (e.code() != errc::kSampleBudgetExceeded) throw;
      }
    }
    return best;
  };
}

// Greedy construction: mu_k is the least n > nu_k whose certified bound
// reaches 2^{n^{r-eps}}, and nu_{k+1} = mu_k + 1.
inline OscSequence build_sequence(int r, const Rational& c, const Rational& eps, int steps,
                                  const Estimator& estimator, int search_span = 60) {
  if (r < 2) fail(errc::kInvalidHypergraph, "uniformity must be at least 2");
  if (c < Rational(1, r - 1)) fail(errc::kPrecondition, "need c >= 1/(r-1)");
  if (eps * c <= 1) fail(errc::kPrecondition, "need eps > 1/c");
  if (steps < 0) fail(errc::kOutOfRange, "steps must be nonnegative");
  OscSequence out;
  out.r = r;
  out.c = c;
  out.eps = eps;
  out.nu.push_back(r + 1);
  const double exponent = r - to_double(eps);
  for (int k = 0; k < steps; ++k) {
    const int from = out.nu.back() + 1;
    std::optional<SequenceCertificate> hit;
    for (int n = from; n < from + search_span && !hit; ++n) {
      auto cert = estimator(out.nu, n);
      if (cert && static_cast<double>(cert->log2_lower) >= std::pow(n, exponent)) hit = cert;
    }
    if (!hit)
      fail(errc::kEstimatorFailed, "no certified n in [" + std::to_string(from) + ", " +
                                       std::to_string(from + search_span - 1) + "] after nu_" + std::to_string(k));
    out.mu.push_back(hit->n);
    out.certificates.push_back(*hit);
    out.nu.push_back(hit->n + 1);
  }
  return out;
}

}  // namespace hspeed
