#pragma once

// Built-in structure, template and hypergraph families.

#include <map>
#include <string>
#include <vector>

#include "hspeed/io.hpp"

namespace hspeed {

inline Structure matching_graph(int pairs) {
  std::vector<std::pair<Element, Element>> e;
  for (int i = 0; i < pairs; ++i) e.push_back({2 * i, 2 * i + 1});
  return make_graph(2 * pairs, e);
}

// a_1..a_m, then m copies of each b_j; a_i ~ b_j exactly when i <= j.
inline Structure halfgraph_blowup(int m) {
  std::vector<std::pair<Element, Element>> e;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      for (int c = 0; c < m; ++c) e.push_back({i, m + j * m + c});
  return make_graph(m + m * m, e);
}

inline Structure clique_graph(int n) {
  std::vector<std::pair<Element, Element>> e;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) e.push_back({a, b});
  return make_graph(n, e);
}

inline Structure cycle_graph(int n) {
  std::vector<std::pair<Element, Element>> e;
  if (n >= 3)
    for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return make_graph(n, e);
}

inline Structure path_graph(int n) {
  std::vector<std::pair<Element, Element>> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return make_graph(n, e);
}

inline Structure complete_bipartite_graph(int a, int b) {
  std::vector<std::pair<Element, Element>> e;
  for (int x = 0; x < a; ++x)
    for (int y = 0; y < b; ++y) e.push_back({x, a + y});
  return make_graph(a + b, e);
}

inline Hypergraph tight_cycle(int r, int v) {
  if (v < r + 1) fail(errc::kOutOfRange, "a tight cycle needs v > r");
  std::vector<std::vector<Element>> edges;
  for (int i = 0; i < v; ++i) {
    std::vector<Element> e;
    for (int j = 0; j < r; ++j) e.push_back((i + j) % v);
    edges.push_back(e);
  }
  return make_hypergraph(r, v, edges);
}

inline Hypergraph sunflower(int r, int petals) {
  std::vector<std::vector<Element>> edges;
  for (int i = 0; i < petals; ++i) {
    std::vector<Element> e{0};
    for (int j = 0; j < r - 1; ++j) e.push_back(1 + i * (r - 1) + j);
    edges.push_back(e);
  }
  return make_hypergraph(r, 1 + petals * (r - 1), edges);
}

// The five graph templates used as fixtures throughout.
inline std::map<std::string, Template> builtin_templates() {
  auto g = graph_language();
  return {
      {"clique", make_template(g, {kInfinite}, {{"E(x1,x2)", {{0, 0}}}})},
      {"empty", make_template(g, {kInfinite}, {})},
      {"bipartite", make_template(g, {kInfinite, kInfinite}, {{"E(x1,x2)", {{0, 1}, {1, 0}}}})},
      {"clique-isolated", make_template(g, {1, kInfinite}, {{"E(x1,x2)", {{1, 1}}}})},
      {"clique-empty", make_template(g, {kInfinite, kInfinite}, {{"E(x1,x2)", {{0, 1}, {1, 0}, {0, 0}}}})},
  };
}

inline std::vector<std::string> corpus_kinds() {
  return {"matching", "halfgraph-blowup", "clique",   "empty",      "cycle",    "path",
          "complete-bipartite", "star",     "tight-cycle", "sunflower", "template"};
}

// Family member as a JSON document. Missing parameters default to 4
// (3 for r) and "name" selects a built-in template.
inline Json corpus_generate(const std::string& kind, const std::map<std::string, int>& params,
                            const std::string& name = "") {
  auto get = [&](const std::string& key, int fallback) {
    auto it = params.find(key);
    int v = it == params.end() ? fallback : it->second;
    if (v < 0) fail(errc::kOutOfRange, "parameter " + key + " must be nonnegative");
    return v;
  };
  if (kind == "matching") return structure_to_json(matching_graph(get("m", 4)));
  if (kind == "halfgraph-blowup") return structure_to_json(halfgraph_blowup(get("m", 4)));
  if (kind == "clique") return structure_to_json(clique_graph(get("n", 4)));
  if (kind == "empty") return structure_to_json(make_graph(get("n", 4), {}));
  if (kind == "cycle") return structure_to_json(cycle_graph(get("n", 4)));
  if (kind == "path") return structure_to_json(path_graph(get("n", 4)));
  if (kind == "complete-bipartite") return structure_to_json(complete_bipartite_graph(get("a", 2), get("b", 2)));
  if (kind == "star") return structure_to_json(complete_bipartite_graph(1, get("n", 4)));
  if (kind == "tight-cycle") return hypergraph_to_json(tight_cycle(get("r", 3), get("v", 5)));
  if (kind == "sunflower") return hypergraph_to_json(sunflower(get("r", 3), get("k", 2)));
  if (kind == "template") {
    auto all = builtin_templates();
    auto it = all.find(name);
    if (it == all.end()) fail(errc::kUnknownKind, "no built-in template '" + name + "'");
    return template_to_json(it->second);
  }
  fail(errc::kUnknownKind, "unknown corpus kind '" + kind + "'");
}

}  // namespace hspeed
