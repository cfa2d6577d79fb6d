#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hspeed/common.hpp"

namespace hspeed {

struct RelationSymbol {
  std::string name;
  int arity = 1;

  friend bool operator==(const RelationSymbol&, const RelationSymbol&) = default;
};

// A finite language of relation and constant symbols.
class Language {
 public:
  Language() = default;
  Language(std::vector<RelationSymbol> relations, std::vector<std::string> constants = {})
      : relations_(std::move(relations)), constants_(std::move(constants)) {
    for (std::size_t i = 0; i < relations_.size(); ++i) {
      if (relations_[i].arity < 1)
        fail(errc::kInvalidStructure, "relation '" + relations_[i].name + "' has arity < 1");
      for (std::size_t j = 0; j < i; ++j)
        if (relations_[j].name == relations_[i].name)
          fail(errc::kInvalidStructure, "duplicate relation name '" + relations_[i].name + "'");
      arity_ = std::max(arity_, relations_[i].arity);
    }
    for (std::size_t i = 0; i < constants_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (constants_[j] == constants_[i])
          fail(errc::kInvalidStructure, "duplicate constant name '" + constants_[i] + "'");
  }

  const std::vector<RelationSymbol>& relations() const noexcept { return relations_; }
  const std::vector<std::string>& constants() const noexcept { return constants_; }
  int relation_count() const noexcept { return static_cast<int>(relations_.size()); }
  int constant_count() const noexcept { return static_cast<int>(constants_.size()); }
  // Maximum relation arity, 0 when there are no relations.
  int arity() const noexcept { return arity_; }

  std::optional<int> relation_index(std::string_view name) const {
    for (std::size_t i = 0; i < relations_.size(); ++i)
      if (relations_[i].name == name) return static_cast<int>(i);
    return std::nullopt;
  }
  std::optional<int> constant_index(std::string_view name) const {
    for (std::size_t i = 0; i < constants_.size(); ++i)
      if (constants_[i] == name) return static_cast<int>(i);
    return std::nullopt;
  }

  friend bool operator==(const Language& a, const Language& b) {
    return a.relations_ == b.relations_ && a.constants_ == b.constants_;
  }

 private:
  std::vector<RelationSymbol> relations_;
  std::vector<std::string> constants_;
  int arity_ = 0;
};

using LanguagePtr = std::shared_ptr<const Language>;

inline LanguagePtr make_language(std::vector<RelationSymbol> relations,
                                 std::vector<std::string> constants = {}) {
  return std::make_shared<const Language>(std::move(relations), std::move(constants));
}

inline LanguagePtr graph_language() {
  static const LanguagePtr kGraph = make_language({{"E", 2}});
  return kGraph;
}

inline LanguagePtr uniform_language(int r) {
  if (r == 2) return graph_language();
  return make_language({{"E", r}});
}

inline bool same_language(const LanguagePtr& a, const LanguagePtr& b) {
  return a == b || (a && b && *a == *b);
}

// Sorted, duplicate-free set of fixed-arity tuples stored contiguously.
class TupleSet {
 public:
  TupleSet() = default;
  explicit TupleSet(int arity) : arity_(arity) {}
  // `flat` holds consecutive tuples; they are sorted and deduplicated here.
  TupleSet(int arity, std::vector<Element> flat) : arity_(arity), data_(std::move(flat)) {
    normalize();
  }
  TupleSet(int arity, const std::vector<std::vector<Element>>& tuples) : arity_(arity) {
    data_.reserve(tuples.size() * static_cast<std::size_t>(arity));
    for (const auto& t : tuples) {
      if (static_cast<int>(t.size()) != arity)
        fail(errc::kArityMismatch, "tuple length " + std::to_string(t.size()) +
                                       " does not match arity " + std::to_string(arity));
      data_.insert(data_.end(), t.begin(), t.end());
    }
    normalize();
  }

  int arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return arity_ == 0 ? 0 : data_.size() / arity_; }
  bool empty() const noexcept { return data_.empty(); }
  std::span<const Element> operator[](std::size_t i) const {
    return {data_.data() + i * arity_, static_cast<std::size_t>(arity_)};
  }
  const std::vector<Element>& flat() const noexcept { return data_; }

  bool contains(std::span<const Element> tuple) const {
    std::size_t lo = 0;
    std::size_t hi = size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      auto t = (*this)[mid];
      if (std::lexicographical_compare(t.begin(), t.end(), tuple.begin(), tuple.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo == size()) return false;
    auto t = (*this)[lo];
    return std::equal(t.begin(), t.end(), tuple.begin(), tuple.end());
  }

  std::vector<std::vector<Element>> to_vectors() const {
    std::vector<std::vector<Element>> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      auto t = (*this)[i];
      out.emplace_back(t.begin(), t.end());
    }
    return out;
  }

  friend bool operator==(const TupleSet&, const TupleSet&) = default;
  friend auto operator<=>(const TupleSet&, const TupleSet&) = default;

 private:
  void normalize() {
    if (arity_ <= 0) {
      data_.clear();
      return;
    }
    if (data_.size() % arity_ != 0)
      fail(errc::kArityMismatch, "flat tuple data is not a multiple of the arity");
    const std::size_t count = data_.size() / arity_;
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    auto at = [&](std::size_t i) { return data_.begin() + static_cast<std::ptrdiff_t>(i * arity_); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(at(a), at(a) + arity_, at(b), at(b) + arity_);
    });
    std::vector<Element> sorted;
    sorted.reserve(data_.size());
    for (std::size_t k = 0; k < count; ++k) {
      auto begin = at(order[k]);
      if (k > 0) {
        auto prev = sorted.end() - arity_;
        if (std::equal(prev, sorted.end(), begin, begin + arity_)) continue;
      }
      sorted.insert(sorted.end(), begin, begin + arity_);
    }
    data_ = std::move(sorted);
  }

  int arity_ = 0;
  std::vector<Element> data_;
};

// A finite relational structure on the domain {0, ..., n-1}.
class Structure {
 public:
  Structure() : lang_(make_language({})) {}
  Structure(LanguagePtr language, int n, std::vector<TupleSet> relations = {},
            std::vector<Element> constants = {})
      : lang_(std::move(language)), n_(n), rels_(std::move(relations)), consts_(std::move(constants)) {
    if (!lang_) fail(errc::kInvalidStructure, "structure without a language");
    if (n_ < 0) fail(errc::kInvalidStructure, "negative domain size");
    if (rels_.empty()) {
      for (const auto& sym : lang_->relations()) rels_.emplace_back(sym.arity);
    }
    if (static_cast<int>(rels_.size()) != lang_->relation_count())
      fail(errc::kInvalidStructure, "relation count does not match the language");
    for (int r = 0; r < lang_->relation_count(); ++r) {
      const int arity = lang_->relations()[r].arity;
      if (rels_[r].arity() != arity && !(rels_[r].empty() && rels_[r].arity() == 0))
        fail(errc::kArityMismatch, "tuple set for '" + lang_->relations()[r].name +
                                       "' has the wrong arity");
      if (rels_[r].arity() == 0) rels_[r] = TupleSet(arity);
      for (Element e : rels_[r].flat())
        if (e < 0 || e >= n_)
          fail(errc::kInvalidStructure, "tuple entry outside the domain in '" +
                                            lang_->relations()[r].name + "'");
    }
    if (static_cast<int>(consts_.size()) != lang_->constant_count())
      fail(errc::kInvalidStructure, "every constant needs exactly one interpretation");
    for (Element c : consts_)
      if (c < 0 || c >= n_) fail(errc::kInvalidStructure, "constant interpretation outside the domain");
  }

  const LanguagePtr& language_ptr() const noexcept { return lang_; }
  const Language& language() const noexcept { return *lang_; }
  int size() const noexcept { return n_; }
  const TupleSet& relation(int r) const { return rels_.at(r); }
  const std::vector<TupleSet>& relations() const noexcept { return rels_; }
  const std::vector<Element>& constants() const noexcept { return consts_; }

  bool holds(int r, std::span<const Element> tuple) const { return rels_[r].contains(tuple); }
  bool is_constant_element(Element e) const {
    return std::find(consts_.begin(), consts_.end(), e) != consts_.end();
  }
  std::size_t tuple_count() const {
    std::size_t total = 0;
    for (const auto& t : rels_) total += t.size();
    return total;
  }

  // Labeled equality: same language, same domain, same tuples and constants.
  friend bool operator==(const Structure& a, const Structure& b) {
    return a.n_ == b.n_ && same_language(a.lang_, b.lang_) && a.rels_ == b.rels_ &&
           a.consts_ == b.consts_;
  }

 private:
  LanguagePtr lang_;
  int n_ = 0;
  std::vector<TupleSet> rels_;
  std::vector<Element> consts_;
};

inline void require_same_language(const Structure& a, const Structure& b) {
  if (!same_language(a.language_ptr(), b.language_ptr()))
    fail(errc::kLanguageMismatch, "structures are over different languages");
}

// Result of restricting to a subset: the relabeled structure plus the map
// from new labels back to the original elements.
struct Restriction {
  Structure structure;
  std::vector<Element> original;  // original[new_label] = old element
};

// M[X], relabeled onto {0..|X|-1} by the order-preserving map.
inline Restriction induced_substructure(const Structure& m, std::span<const Element> subset) {
  std::vector<Element> members(subset.begin(), subset.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::vector<Element> relabel(m.size(), -1);
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] < 0 || members[i] >= m.size())
      fail(errc::kOutOfRange, "element " + std::to_string(members[i]) + " outside the domain");
    relabel[members[i]] = static_cast<Element>(i);
  }
  std::vector<Element> consts;
  consts.reserve(m.constants().size());
  for (std::size_t c = 0; c < m.constants().size(); ++c) {
    Element e = m.constants()[c];
    if (relabel[e] < 0)
      fail(errc::kMissingConstant, "subset omits the interpretation of constant '" +
                                       m.language().constants()[c] + "'");
    consts.push_back(relabel[e]);
  }
  std::vector<TupleSet> rels;
  rels.reserve(m.relations().size());
  for (const auto& ts : m.relations()) {
    std::vector<Element> flat;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      auto t = ts[i];
      bool inside = std::all_of(t.begin(), t.end(), [&](Element e) { return relabel[e] >= 0; });
      if (!inside) continue;
      for (Element e : t) flat.push_back(relabel[e]);
    }
    rels.emplace_back(ts.arity(), std::move(flat));
  }
  return {Structure(m.language_ptr(), static_cast<int>(members.size()), std::move(rels),
                    std::move(consts)),
          std::move(members)};
}

// f(M) for an injection f: [n] -> [target_size). With target_size < 0 the
// image domain is taken to be max(f)+1 (n for a permutation).
inline Structure apply_bijection(const Structure& m, std::span<const Element> f, int target_size = -1) {
  if (static_cast<int>(f.size()) != m.size())
    fail(errc::kNotInjective, "map length differs from the domain size");
  int target = target_size;
  if (target < 0) {
    target = m.size();
    for (Element e : f) target = std::max(target, e + 1);
  }
  std::vector<char> hit(static_cast<std::size_t>(target), 0);
  for (Element e : f) {
    if (e < 0 || e >= target) fail(errc::kNotInjective, "map value outside the target domain");
    if (hit[e]) fail(errc::kNotInjective, "map sends two elements to " + std::to_string(e));
    hit[e] = 1;
  }
  std::vector<TupleSet> rels;
  rels.reserve(m.relations().size());
  for (const auto& ts : m.relations()) {
    std::vector<Element> flat;
    flat.reserve(ts.flat().size());
    for (Element e : ts.flat()) flat.push_back(f[e]);
    rels.emplace_back(ts.arity(), std::move(flat));
  }
  std::vector<Element> consts;
  for (Element c : m.constants()) consts.push_back(f[c]);
  return Structure(m.language_ptr(), target, std::move(rels), std::move(consts));
}

inline Permutation inverse(std::span<const Element> p) {
  Permutation inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<Element>(i);
  return inv;
}

inline bool is_automorphism(const Structure& m, std::span<const Element> p) {
  for (std::size_t c = 0; c < m.constants().size(); ++c)
    if (p[m.constants()[c]] != m.constants()[c]) return false;
  std::vector<Element> image;
  for (const auto& ts : m.relations()) {
    image.resize(ts.arity());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      auto t = ts[i];
      for (int j = 0; j < ts.arity(); ++j) image[j] = p[t[j]];
      if (!ts.contains(image)) return false;
    }
  }
  return true;
}

// Builders for common shapes used throughout tests, the corpus, and the CLI.
// Undirected edges are stored in both orientations.
inline TupleSet symmetric_edges(const std::vector<std::pair<Element, Element>>& edges) {
  std::vector<Element> flat;
  for (auto [a, b] : edges) {
    flat.insert(flat.end(), {a, b, b, a});
  }
  return TupleSet(2, std::move(flat));
}

inline Structure make_graph(int n, const std::vector<std::pair<Element, Element>>& edges) {
  return Structure(graph_language(), n, {symmetric_edges(edges)});
}

// r-uniform hypergraph as a structure: every ordering of each edge is a tuple.
inline Structure make_uniform(int r, int n, const std::vector<std::vector<Element>>& edges) {
  std::vector<Element> flat;
  for (auto e : edges) {
    if (static_cast<int>(e.size()) != r) fail(errc::kArityMismatch, "edge size differs from r");
    std::sort(e.begin(), e.end());
    do {
      flat.insert(flat.end(), e.begin(), e.end());
    } while (std::next_permutation(e.begin(), e.end()));
  }
  return Structure(uniform_language(r), n, {TupleSet(r, std::move(flat))});
}

}  // namespace hspeed
