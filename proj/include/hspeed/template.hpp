#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hspeed/common.hpp"
#include "hspeed/polyfit.hpp"
#include "hspeed/simclass.hpp"
#include "hspeed/structure.hpp"

namespace hspeed {

inline constexpr int kInfinite = -1;

// A finite description of a structure with some infinite ~-classes: class
// sizes (finite classes first, nondecreasing, then at least one infinite
// class), Sigma for every atom of the language, and the threshold K.
struct Template {
  LanguagePtr language;
  std::vector<int> sizes;  // kInfinite for an infinite class
  std::vector<AtomicDiff> atoms;
  std::vector<std::vector<std::vector<int>>> sigma;  // aligned with atoms, 0-based rows
  int K = 0;

  int k() const { return static_cast<int>(sizes.size()); }
  int finite_count() const {
    return static_cast<int>(std::count_if(sizes.begin(), sizes.end(), [](int s) { return s != kInfinite; }));
  }
  int infinite_count() const { return k() - finite_count(); }
  int finite_total() const {
    int c = 0;
    for (int s : sizes) c += s == kInfinite ? 0 : s;
    return c;
  }
  bool is_infinite(int i) const { return sizes[i] == kInfinite; }

  const std::vector<std::vector<int>>& sigma_for(std::string_view key) const {
    for (std::size_t a = 0; a < atoms.size(); ++a)
      if (atoms[a].key(*language) == key) return sigma[a];
    fail(errc::kInvalidTemplate, "no atom '" + std::string(key) + "' in the language");
  }

  friend bool operator==(const Template& a, const Template& b) {
    return same_language(a.language, b.language) && a.sizes == b.sizes && a.sigma == b.sigma && a.K == b.K;
  }
};

namespace detail {

inline int default_threshold(const Language& lang, const std::vector<int>& sizes) {
  int K = lang.arity();
  for (int s : sizes)
    if (s != kInfinite) K = std::max(K, s);
  return K;
}

// Rows that no distinct tuple can realise (a finite class used more often
// than its size) are dropped so equal structures get equal templates.
inline void normalize_sigma(Template& t) {
  for (auto& rows : t.sigma) {
    std::vector<std::vector<int>> kept;
    for (const auto& row : rows) {
      for (int c : row)
        if (c < 0 || c >= t.k()) fail(errc::kInvalidTemplate, "Sigma row names a class outside [k]");
      bool realizable = true;
      for (int c : row)
        if (!t.is_infinite(c) && std::count(row.begin(), row.end(), c) > t.sizes[c]) realizable = false;
      if (realizable) kept.push_back(row);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    rows = std::move(kept);
  }
}

// Class index per element for a realisation with the given block sizes.
inline std::vector<int> blocks_assignment(const std::vector<int>& block_sizes) {
  std::vector<int> class_of;
  for (std::size_t i = 0; i < block_sizes.size(); ++i) class_of.insert(class_of.end(), block_sizes[i], static_cast<int>(i));
  return class_of;
}

}  // namespace detail

inline Structure realize_template(const Template& t, const std::vector<int>& class_of) {
  return build_from_classes(t.language, static_cast<int>(class_of.size()), class_of, t.atoms, t.sigma);
}

// Checks shape and that the listed classes really are the ~-classes of a
// realisation whose infinite classes have K+1 elements.
inline void validate_template(Template& t) {
  if (!t.language) fail(errc::kInvalidTemplate, "template without a language");
  if (t.language->constant_count() > 0)
    fail(errc::kConstantsUnsupported, "templates are defined for relational languages only");
  if (t.sizes.empty()) fail(errc::kInvalidTemplate, "template needs at least one class");
  if (t.atoms.empty() && !t.sigma.empty()) fail(errc::kInvalidTemplate, "Sigma without atoms");
  if (t.sigma.size() != t.atoms.size()) fail(errc::kInvalidTemplate, "Sigma not aligned with atoms");
  bool seen_infinite = false;
  int prev = 0;
  for (int s : t.sizes) {
    if (s == kInfinite) {
      seen_infinite = true;
      continue;
    }
    if (s < 1) fail(errc::kInvalidTemplate, "finite class sizes must be positive");
    if (seen_infinite) fail(errc::kInvalidTemplate, "finite classes must precede infinite ones");
    if (s < prev) fail(errc::kInvalidTemplate, "finite class sizes must be nondecreasing");
    prev = s;
  }
  if (!seen_infinite) fail(errc::kInvalidTemplate, "template needs at least one infinite class");
  const int minimum = detail::default_threshold(*t.language, t.sizes);
  if (t.K == 0) t.K = minimum;
  if (t.K < minimum) fail(errc::kInvalidTemplate, "K must be at least max(r, largest finite class)");
  detail::normalize_sigma(t);

  std::vector<int> block_sizes;
  for (int s : t.sizes) block_sizes.push_back(s == kInfinite ? t.K + 1 : s);
  auto class_of = detail::blocks_assignment(block_sizes);
  auto classes = sim_classes(realize_template(t, class_of));
  if (static_cast<int>(classes.size()) != t.k())
    fail(errc::kInvalidTemplate, "the listed classes are not the ~-classes of any realisation");
  for (const auto& c : classes)
    for (Element v : c)
      if (class_of[v] != class_of[c.front()])
        fail(errc::kInvalidTemplate, "the listed classes are not the ~-classes of any realisation");
}

// Sigma given by atom key, e.g. {"E(x1,x2)": {{0,1},{1,0}}}; K = 0 picks the default.
inline Template make_template(LanguagePtr lang, std::vector<int> sizes,
                              const std::map<std::string, std::vector<std::vector<int>>>& sigma, int K = 0) {
  Template t;
  t.language = std::move(lang);
  t.sizes = std::move(sizes);
  t.K = K;
  if (!t.language) fail(errc::kInvalidTemplate, "template without a language");
  t.atoms = atomic_diffs(*t.language);
  t.sigma.assign(t.atoms.size(), {});
  for (const auto& [key, rows] : sigma) {
    auto atom = parse_atom_key(*t.language, key);
    if (!atom) fail(errc::kInvalidTemplate, "unknown atom '" + key + "'");
    auto pos = std::find(t.atoms.begin(), t.atoms.end(), *atom) - t.atoms.begin();
    for (const auto& row : rows)
      if (static_cast<int>(row.size()) != atom->variables)
        fail(errc::kInvalidTemplate, "Sigma row for '" + key + "' has the wrong length");
    t.sigma[pos] = rows;
  }
  validate_template(t);
  return t;
}

// Template of M with the chosen ~-classes (indices into decomposition(M))
// declared infinite.
inline Template template_of(const Structure& m, const std::vector<int>& infinite_classes, int K = 0) {
  Decomposition d = decomposition(m);
  std::vector<bool> marked(d.k(), false);
  for (int c : infinite_classes) {
    if (c < 0 || c >= d.k()) fail(errc::kOutOfRange, "class index outside the decomposition");
    marked[c] = true;
    for (Element v : d.classes[c])
      if (m.is_constant_element(v))
        fail(errc::kConstantInInfiniteClass, "a constant's class cannot be infinite");
  }
  if (m.language().constant_count() > 0)
    fail(errc::kConstantsUnsupported, "templates are defined for relational languages only");
  // Finite classes keep their (size, min) order; infinite ones move last.
  std::vector<int> order;
  for (int c = 0; c < d.k(); ++c)
    if (!marked[c]) order.push_back(c);
  for (int c = 0; c < d.k(); ++c)
    if (marked[c]) order.push_back(c);
  std::vector<int> new_index(d.k());
  for (int i = 0; i < d.k(); ++i) new_index[order[i]] = i;

  Template t;
  t.language = m.language_ptr();
  t.atoms = d.atoms;
  t.K = K;
  for (int c : order) t.sizes.push_back(marked[c] ? kInfinite : static_cast<int>(d.classes[c].size()));
  for (auto rows : d.sigma) {
    for (auto& row : rows)
      for (int& c : row) c = new_index[c];
    t.sigma.push_back(std::move(rows));
  }
  validate_template(t);
  return t;
}

namespace detail {

// Distributes the members of N's ~-classes over template classes and tests
// N == N_P. In exact mode finite classes get exactly their size and infinite
// ones more than K; otherwise sizes are only bounded above (embedding into
// the infinite structure).
inline std::optional<std::vector<int>> find_partition(const Structure& n, const Template& t, bool exact) {
  const int k = t.k();
  auto classes = sim_classes(n);
  std::vector<int> load(k, 0);
  std::vector<std::vector<int>> split(classes.size(), std::vector<int>(k, 0));
  std::optional<std::vector<int>> found;

  auto finish = [&]() {
    for (int i = 0; i < k; ++i) {
      if (t.is_infinite(i)) {
        if (exact && load[i] <= t.K) return;
      } else if (exact ? load[i] != t.sizes[i] : load[i] > t.sizes[i]) {
        return;
      }
    }
    std::vector<int> class_of(n.size());
    for (std::size_t j = 0; j < classes.size(); ++j) {
      std::size_t pos = 0;
      for (int i = 0; i < k; ++i)
        for (int c = 0; c < split[j][i]; ++c) class_of[classes[j][pos++]] = i;
    }
    if (realize_template(t, class_of) == n) found = std::move(class_of);
  };

  std::function<void(std::size_t, int, int)> rec = [&](std::size_t j, int i, int left) {
    if (found) return;
    if (j == classes.size()) {
      finish();
      return;
    }
    if (i == k - 1) {
      if (!t.is_infinite(i) && load[i] + left > t.sizes[i]) return;
      split[j][i] = left;
      load[i] += left;
      rec(j + 1, 0, j + 1 < classes.size() ? static_cast<int>(classes[j + 1].size()) : 0);
      load[i] -= left;
      split[j][i] = 0;
      return;
    }
    const int cap = t.is_infinite(i) ? left : std::min(left, t.sizes[i] - load[i]);
    for (int take = cap; take >= 0; --take) {
      split[j][i] = take;
      load[i] += take;
      rec(j, i + 1, left - take);
      load[i] -= take;
      split[j][i] = 0;
      if (found) return;
    }
  };
  if (classes.empty()) {
    finish();
  } else {
    rec(0, 0, static_cast<int>(classes[0].size()));
  }
  return found;
}

}  // namespace detail

struct Compatibility {
  bool compatible = false;
  std::vector<int> witness;  // class index per element when compatible
};

inline Compatibility is_compatible(const Structure& n, const Template& t) {
  if (!same_language(n.language_ptr(), t.language))
    fail(errc::kLanguageMismatch, "structure and template use different languages");
  auto w = detail::find_partition(n, t, true);
  if (!w) return {};
  return {true, std::move(*w)};
}

// Whether N embeds into the infinite structure described by T.
inline bool embeds_in_template(const Structure& n, const Template& t) {
  if (!same_language(n.language_ptr(), t.language))
    fail(errc::kLanguageMismatch, "structure and template use different languages");
  return detail::find_partition(n, t, false).has_value();
}

// Number of ordered partitions of [n] into classes of the template's sizes
// (infinite classes getting more than K elements each).
inline BigInt omega_count(const Template& t, int n) {
  const int c = t.finite_total();
  const int ell = t.infinite_count();
  if (n < c) return 0;
  const int rest = n - c;
  // g[l][R]: ordered partitions of R labeled points into l blocks each > K.
  std::vector<std::vector<BigInt>> g(ell + 1, std::vector<BigInt>(rest + 1, 0));
  g[0][0] = 1;
  for (int l = 1; l <= ell; ++l)
    for (int r = 0; r <= rest; ++r)
      for (int m = t.K + 1; m <= r; ++m) g[l][r] += binomial(r, m) * g[l - 1][r - m];
  BigInt ways = factorial(n) / factorial(rest);
  for (int s : t.sizes)
    if (s != kInfinite) ways /= factorial(s);
  return ways * g[ell][rest];
}

// Class permutations preserving sizes and every Sigma_tau.
inline std::vector<Permutation> aut_star(const Template& t) {
  const int k = t.k();
  Permutation p(k);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) ok = t.sizes[p[i]] == t.sizes[i];
    for (std::size_t a = 0; a < t.sigma.size() && ok; ++a) {
      for (const auto& row : t.sigma[a]) {
        std::vector<int> img(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) img[j] = p[row[j]];
        if (!std::binary_search(t.sigma[a].begin(), t.sigma[a].end(), img)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline BigInt count_compatible(const Template& t, int n) {
  const BigInt omega = omega_count(t, n);
  const BigInt order = aut_star(t).size();
  if (omega % order != 0)
    fail(errc::kNonIntegralCount, "Omega(n) = " + omega.str() + " is not divisible by |Aut*| = " + order.str());
  return omega / order;
}

// Every labeled structure on [n] compatible with T, sorted by tuples.
inline std::vector<Structure> enumerate_compatible(const Template& t, int n, int budget = 10) {
  if (n > budget) fail(errc::kBudgetExceeded, "enumeration limited to n <= " + std::to_string(budget));
  const int k = t.k();
  std::vector<int> class_of(n), load(k, 0);
  std::map<std::vector<TupleSet>, Structure> seen;
  auto rec = [&](auto&& self, int v) -> void {
    if (v == n) {
      for (int i = 0; i < k; ++i)
        if (t.is_infinite(i) ? load[i] <= t.K : load[i] != t.sizes[i]) return;
      Structure s = realize_template(t, class_of);
      seen.try_emplace(s.relations(), std::move(s));
      return;
    }
    // Cheap feasibility cut: unfilled finite classes need the remaining points.
    int need = 0;
    for (int i = 0; i < k; ++i) need += t.is_infinite(i) ? std::max(0, t.K + 1 - load[i]) : t.sizes[i] - load[i];
    if (need > n - v) return;
    for (int i = 0; i < k; ++i) {
      if (!t.is_infinite(i) && load[i] == t.sizes[i]) continue;
      class_of[v] = i;
      ++load[i];
      self(self, v + 1);
      --load[i];
    }
  };
  rec(rec, 0);
  std::vector<Structure> out;
  for (auto& [key, s] : seen) out.push_back(std::move(s));
  return out;
}

struct FitWindow {
  int lo = 6;
  int hi = 12;
};

// Exact closed form sum_i p_i(n) i^n of count_compatible, fitted on one
// window and checked on another. deg p_i <= c + (ell - i) K, and the form is
// exact from c + ell K + 1 on, so points below that are skipped.
inline SpeedForm speed_form(const Template& t, FitWindow fit = {6, 12}, FitWindow verify = {13, 16}) {
  const int c = t.finite_total();
  const int ell = t.infinite_count();
  const int threshold = c + ell * t.K + 1;
  std::vector<int> degrees;
  int unknowns = 0;
  for (int i = 1; i <= ell; ++i) {
    degrees.push_back(c + (ell - i) * t.K);
    unknowns += degrees.back() + 1;
  }
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  for (int n = std::max(fit.lo, threshold); n <= fit.hi; ++n) {
    std::vector<Rational> row;
    for (int i = 1; i <= ell; ++i) {
      Rational base = Rational(ipow(BigInt(i), static_cast<unsigned>(n)));
      for (int j = 0; j <= degrees[i - 1]; ++j) {
        row.push_back(base);
        base *= n;
      }
    }
    rows.push_back(std::move(row));
    rhs.push_back(Rational(count_compatible(t, n)));
  }
  if (static_cast<int>(rows.size()) < unknowns)
    fail(errc::kFitFailed, "fit window has " + std::to_string(rows.size()) + " usable points for " +
                               std::to_string(unknowns) + " unknowns");
  auto solution = solve_exact(std::move(rows), std::move(rhs));
  if (!solution) fail(errc::kFitFailed, "no exact solution on the fit window");
  SpeedForm form;
  form.threshold = threshold;
  std::size_t pos = 0;
  for (int i = 1; i <= ell; ++i) {
    std::vector<Rational> p(solution->begin() + pos, solution->begin() + pos + degrees[i - 1] + 1);
    pos += p.size();
    form.polys.push_back(std::move(p));
  }
  for (int n = std::max(verify.lo, threshold); n <= verify.hi; ++n)
    if (form(n) != Rational(count_compatible(t, n)))
      fail(errc::kFitFailed, "fitted form disagrees with the exact count at n = " + std::to_string(n));
  return form;
}

struct TemplateRelation {
  bool equivalent = false;
  Permutation sigma;  // class map from the first template to the second
};

inline TemplateRelation templates_equivalent_or_disjoint(const Template& a, const Template& b) {
  if (!same_language(a.language, b.language))
    fail(errc::kLanguageMismatch, "templates use different languages");
  if (a.k() != b.k()) return {};
  auto sorted_sizes = [](std::vector<int> s) {
    std::sort(s.begin(), s.end());
    return s;
  };
  if (sorted_sizes(a.sizes) != sorted_sizes(b.sizes)) {
    // A finite class larger than the other's K could sit inside an infinite class.
    for (int s : a.sizes)
      if (s != kInfinite && s > b.K) fail(errc::kMixedTemplates, "finite class of size " + std::to_string(s) + " exceeds the other template's K");
    for (int s : b.sizes)
      if (s != kInfinite && s > a.K) fail(errc::kMixedTemplates, "finite class of size " + std::to_string(s) + " exceeds the other template's K");
    return {};
  }
  const int k = a.k();
  Permutation p(k);
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) ok = b.sizes[p[i]] == a.sizes[i];
    for (std::size_t at = 0; at < a.sigma.size() && ok; ++at) {
      std::vector<std::vector<int>> img;
      for (const auto& row : a.sigma[at]) {
        std::vector<int> r(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) r[j] = p[row[j]];
        img.push_back(std::move(r));
      }
      std::sort(img.begin(), img.end());
      ok = img == b.sigma[at];
    }
    if (ok) {
      if (a.K != b.K) fail(errc::kMixedTemplates, "templates agree up to class order but use different K");
      return {true, p};
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return {};
}

// Labeled count of structures on [n] compatible with at least one template.
inline BigInt union_speed(const std::vector<Template>& templates, int n) {
  std::vector<const Template*> reps;
  for (const auto& t : templates) {
    bool duplicate = false;
    for (const Template* r : reps)
      if (templates_equivalent_or_disjoint(*r, t).equivalent) {
        duplicate = true;
        break;
      }
    if (!duplicate) reps.push_back(&t);
  }
  BigInt total = 0;
  for (const Template* r : reps) total += count_compatible(*r, n);
  return total;
}

}  // namespace hspeed
