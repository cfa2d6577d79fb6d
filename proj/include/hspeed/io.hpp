#pragma once

// JSON and CSV boundary. Elements and class indices are 1-based here and
// 0-based everywhere else; rationals travel as "p/q" strings and big
// integers as decimal strings.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hspeed/common.hpp"
#include "hspeed/oscillate.hpp"
#include "hspeed/property.hpp"
#include "hspeed/simclass.hpp"
#include "hspeed/structure.hpp"
#include "hspeed/template.hpp"

namespace hspeed {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) fail(errc::kParseError, what + " is missing '" + key + "'");
  return j.at(key);
}

inline int as_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(errc::kParseError, what + " must be an integer");
  return j.get<int>();
}

inline std::vector<Element> shift_down(const Json& row, int bound, const std::string& what) {
  if (!row.is_array()) fail(errc::kParseError, what + " must be an array");
  std::vector<Element> out;
  for (const auto& x : row) {
    int v = as_int(x, what);
    if (v < 1 || v > bound) fail(errc::kOutOfRange, what + " entry " + std::to_string(v) + " outside 1.." + std::to_string(bound));
    out.push_back(v - 1);
  }
  return out;
}

inline Json shift_up(const std::vector<Element>& row) {
  Json out = Json::array();
  for (Element x : row) out.push_back(x + 1);
  return out;
}

}  // namespace detail

inline Json language_to_json(const Language& lang) {
  Json rels = Json::array();
  for (const auto& r : lang.relations()) rels.push_back({{"name", r.name}, {"arity", r.arity}});
  return {{"relations", rels}, {"constants", lang.constants()}};
}

inline LanguagePtr language_from_json(const Json& j) {
  std::vector<RelationSymbol> rels;
  for (const auto& r : detail::field(j, "relations", "language"))
    rels.push_back({detail::field(r, "name", "relation").get<std::string>(),
                    detail::as_int(detail::field(r, "arity", "relation"), "arity")});
  std::vector<std::string> consts;
  if (j.contains("constants"))
    for (const auto& c : j.at("constants")) consts.push_back(c.get<std::string>());
  if (rels.size() == 1 && rels[0].name == "E" && rels[0].arity == 2 && consts.empty()) return graph_language();
  return make_language(std::move(rels), std::move(consts));
}

inline Json structure_to_json(const Structure& m) {
  const auto& lang = m.language();
  Json tuples = Json::object();
  for (int r = 0; r < lang.relation_count(); ++r) {
    Json rows = Json::array();
    for (const auto& t : m.relation(r).to_vectors()) rows.push_back(detail::shift_up(t));
    tuples[lang.relations()[r].name] = rows;
  }
  Json consts = Json::object();
  for (int c = 0; c < lang.constant_count(); ++c) consts[lang.constants()[c]] = m.constants()[c] + 1;
  return {{"language", language_to_json(lang)}, {"n", m.size()}, {"tuples", tuples}, {"constants", consts}};
}

inline Structure structure_from_json(const Json& j) {
  auto lang = language_from_json(detail::field(j, "language", "structure"));
  const int n = detail::as_int(detail::field(j, "n", "structure"), "n");
  if (n < 0) fail(errc::kInvalidStructure, "negative domain size");
  std::vector<TupleSet> rels;
  const Json empty = Json::object();
  const Json& tuples = j.contains("tuples") ? j.at("tuples") : empty;
  for (auto it = tuples.begin(); it != tuples.end(); ++it)
    if (!lang->relation_index(it.key())) fail(errc::kLanguageMismatch, "tuples for undeclared relation '" + it.key() + "'");
  for (const auto& sym : lang->relations()) {
    std::vector<std::vector<Element>> rows;
    if (tuples.contains(sym.name))
      for (const auto& row : tuples.at(sym.name)) {
        rows.push_back(detail::shift_down(row, n, "tuple of " + sym.name));
        if (static_cast<int>(rows.back().size()) != sym.arity)
          fail(errc::kArityMismatch, "tuple of length " + std::to_string(rows.back().size()) + " for " + sym.name);
      }
    rels.emplace_back(sym.arity, rows);
  }
  std::vector<Element> consts;
  for (const auto& name : lang->constants()) {
    if (!j.contains("constants") || !j.at("constants").contains(name))
      fail(errc::kMissingConstant, "no interpretation for constant '" + name + "'");
    int v = detail::as_int(j.at("constants").at(name), "constant");
    if (v < 1 || v > n) fail(errc::kInvalidStructure, "constant '" + name + "' outside the domain");
    consts.push_back(v - 1);
  }
  return Structure(lang, n, std::move(rels), std::move(consts));
}

inline Json sigma_to_json(const Language& lang, const std::vector<AtomicDiff>& atoms,
                          const std::vector<std::vector<std::vector<int>>>& sigma) {
  Json out = Json::object();
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    Json rows = Json::array();
    for (const auto& row : sigma[a]) rows.push_back(detail::shift_up(row));
    out[atoms[a].key(lang)] = rows;
  }
  return out;
}

inline Json decomposition_to_json(const Structure& m) {
  auto d = decomposition(m);
  Json classes = Json::array();
  for (const auto& c : d.classes) classes.push_back(detail::shift_up(c));
  return {{"classes", classes}, {"sigma", sigma_to_json(m.language(), d.atoms, d.sigma)}};
}

inline Json template_to_json(const Template& t) {
  Json sizes = Json::array();
  for (int s : t.sizes) {
    if (s == kInfinite) {
      sizes.push_back("inf");
    } else {
      sizes.push_back(s);
    }
  }
  return {{"language", language_to_json(*t.language)},
          {"k", t.k()},
          {"sizes", sizes},
          {"K", t.K},
          {"sigma", sigma_to_json(*t.language, t.atoms, t.sigma)}};
}

inline Template template_from_json(const Json& j) {
  auto lang = language_from_json(detail::field(j, "language", "template"));
  std::vector<int> sizes;
  for (const auto& s : detail::field(j, "sizes", "template")) {
    if (s.is_string() && (s == "inf" || s == "∞")) {
      sizes.push_back(kInfinite);
    } else {
      sizes.push_back(detail::as_int(s, "class size"));
    }
  }
  const int k = static_cast<int>(sizes.size());
  if (j.contains("k") && detail::as_int(j.at("k"), "k") != k) fail(errc::kInvalidTemplate, "k disagrees with sizes");
  std::map<std::string, std::vector<std::vector<int>>> sigma;
  if (j.contains("sigma"))
    for (auto it = j.at("sigma").begin(); it != j.at("sigma").end(); ++it) {
      auto& rows = sigma[it.key()];
      for (const auto& row : it.value()) rows.push_back(detail::shift_down(row, k, "Sigma row"));
    }
  const int K = j.contains("K") ? detail::as_int(j.at("K"), "K") : 0;
  return make_template(lang, sizes, sigma, K);
}

inline Json hypergraph_to_json(const Hypergraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back(detail::shift_up(e));
  return {{"r", g.r}, {"v", g.v}, {"edges", edges}};
}

inline Hypergraph hypergraph_from_json(const Json& j) {
  const int r = detail::as_int(detail::field(j, "r", "hypergraph"), "r");
  const int v = detail::as_int(detail::field(j, "v", "hypergraph"), "v");
  std::vector<std::vector<Element>> edges;
  for (const auto& e : detail::field(j, "edges", "hypergraph")) {
    try {
      edges.push_back(detail::shift_down(e, v, "edge"));
    } catch (const Error& err) {
      fail(errc::kInvalidHypergraph, err.what());
    }
  }
  return make_hypergraph(r, v, std::move(edges));
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::kParseError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One JSON document, or newline-delimited documents.
inline std::vector<Json> parse_documents(const std::string& text, const std::string& origin) {
  try {
    return {Json::parse(text)};
  } catch (const Json::parse_error&) {
  }
  std::vector<Json> out;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      fail(errc::kParseError, origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.empty()) fail(errc::kParseError, origin + ": no JSON documents");
  return out;
}

inline std::vector<Structure> read_structures(const std::string& path) {
  std::vector<Structure> out;
  for (const auto& doc : parse_documents(read_text(path), path)) {
    if (doc.is_array()) {
      for (const auto& s : doc) out.push_back(structure_from_json(s));
    } else {
      out.push_back(structure_from_json(doc));
    }
  }
  return out;
}

inline Template read_template(const std::string& path) {
  return template_from_json(parse_documents(read_text(path), path).front());
}

inline Hypergraph read_hypergraph(const std::string& path) {
  return hypergraph_from_json(parse_documents(read_text(path), path).front());
}

inline std::string speed_csv(const SpeedTable& table, std::uint64_t seed) {
  std::ostringstream out;
  out << "# seed=" << seed << "\n";
  out << "n,labeled,unlabeled\n";
  for (const auto& row : table.rows) out << row.n << ',' << row.labeled << ',' << row.unlabeled << '\n';
  return out.str();
}

}  // namespace hspeed
