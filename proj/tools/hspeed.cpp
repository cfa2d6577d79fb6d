// hspeed: command-line front end.
//
// Exit codes: 0 success, 2 contract or usage error (JSON on stderr),
// 1 internal failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hspeed/arrays.hpp"
#include "hspeed/components.hpp"
#include "hspeed/corpus.hpp"
#include "hspeed/io.hpp"
#include "hspeed/oscillate.hpp"
#include "hspeed/property.hpp"
#include "hspeed/simclass.hpp"
#include "hspeed/template.hpp"

using namespace hspeed;

namespace {

struct Globals {
  int budget = 0;
  std::uint64_t seed = 1;
  std::string format = "auto";
  std::string out;
};

struct PropertyArgs {
  std::vector<std::string> forbid;
  std::string predicate;
  std::vector<std::string> templates;
  int n_max = 6;

  void attach(CLI::App* app) {
    app->add_option("--forbid", forbid, "forbidden induced substructures (JSON files)")->delimiter(',');
    app->add_option("--predicate", predicate, "built-in predicate name");
    app->add_option("--template", templates, "templates whose age is the property")->delimiter(',');
    app->add_option("--nmax", n_max, "largest domain size")->check(CLI::PositiveNumber);
  }

  PropertySpec build() const {
    const int chosen = !forbid.empty() + !predicate.empty() + !templates.empty();
    if (chosen != 1) fail(errc::kUsageError, "give exactly one of --forbid, --predicate, --template");
    if (!predicate.empty()) return builtin_predicate(predicate);
    if (!templates.empty()) {
      std::vector<Template> ts;
      for (const auto& path : templates) ts.push_back(read_template(path));
      return age_of_templates(std::move(ts));
    }
    std::vector<Structure> fs;
    for (const auto& path : forbid)
      for (auto& s : read_structures(path)) fs.push_back(std::move(s));
    return forbid_induced(std::move(fs));
  }
};

Json rows_json(const std::vector<std::vector<Element>>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(detail::shift_up(r));
  return out;
}

std::vector<Element> shift_list(const std::vector<int>& one_based, int bound, const std::string& what) {
  std::vector<Element> out;
  for (int v : one_based) {
    if (v < 1 || v > bound) fail(errc::kOutOfRange, what + " " + std::to_string(v) + " outside 1.." + std::to_string(bound));
    out.push_back(v - 1);
  }
  return out;
}

FitWindow parse_window(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos) fail(errc::kUsageError, "window must look like a..b");
  auto bound = [&](std::string_view part) {
    Rational v = parse_rational(part);
    if (!is_integer(v)) fail(errc::kUsageError, "window bounds must be integers");
    return static_cast<int>(boost::multiprecision::numerator(v));
  };
  return {bound(std::string_view(text).substr(0, dots)), bound(std::string_view(text).substr(dots + 2))};
}

int relation_index(const Structure& m, const std::string& name) {
  auto r = m.language().relation_index(name);
  if (!r) fail(errc::kOutOfRange, "no relation '" + name + "' in the language");
  return *r;
}

Structure single_structure(const std::string& path) {
  auto all = read_structures(path);
  if (all.size() != 1) fail(errc::kUsageError, path + " must hold exactly one structure");
  return all.front();
}

class Runner {
 public:
  explicit Runner(const Globals& g) : g_(g) {}

  std::string format(const std::string& preferred) const { return g_.format == "auto" ? preferred : g_.format; }

  // Primary artifact: JSON with the seed attached, or preformatted text.
  void emit_json(Json j) const {
    j["seed"] = g_.seed;
    write(j.dump(2) + "\n");
  }
  void write(const std::string& text) const {
    if (g_.out.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(g_.out);
    if (!f) fail(errc::kUsageError, "cannot write '" + g_.out + "'");
    f << text;
  }

 private:
  const Globals& g_;
};

std::string growth_pretty(const SpeedTable& table) {
  std::ostringstream out;
  out << "n\tlabeled\tunlabeled\n";
  for (const auto& r : table.rows) out << r.n << '\t' << r.labeled << '\t' << r.unlabeled << '\n';
  if (table.rows.size() >= 4) {
    auto g = growth_diagnostics(table);
    out << "\nn\tlog2|H_n|\tlog|H_n|/(n log n)\t|H_n|/n!\tlog2 ratio\n";
    for (const auto& r : g.rows)
      out << r.n << '\t' << r.log2_count << '\t' << r.log_ratio << '\t' << r.over_factorial << '\t' << r.log2_difference
          << '\n';
    out << "growth: " << g.tag << " (fitted n log n coefficient " << g.factorial_exponent << ")\n";
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact counting for hereditary properties of finite structures"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("--budget", g.budget, "size budget; 0 keeps each operation's default")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "seed for every randomized step");
  app.add_option("--format", g.format, "json, csv or pretty")->check(CLI::IsMember({"auto", "json", "csv", "pretty"}));
  app.add_option("--out", g.out, "write the primary output here instead of stdout");
  Runner run(g);
  std::function<void()> action;

  // decompose
  std::string structure_path;
  auto* decompose = app.add_subcommand("decompose", "~-classes and Sigma of a structure");
  decompose->add_option("structure", structure_path)->required();
  decompose->callback([&] { action = [&] { run.emit_json(decomposition_to_json(single_structure(structure_path))); }; });

  // speed
  PropertyArgs prop;
  auto* speed_cmd = app.add_subcommand("speed", "labeled and unlabeled counts up to --nmax");
  prop.attach(speed_cmd);
  speed_cmd->callback([&] {
    action = [&] {
      auto table = speed(prop.build(), prop.n_max, g.budget);
      const auto fmt = run.format("csv");
      if (fmt == "csv") {
        run.write(speed_csv(table, g.seed));
      } else if (fmt == "pretty") {
        run.write("# seed=" + std::to_string(g.seed) + "\n" + growth_pretty(table));
      } else {
        Json rows = Json::array();
        for (const auto& r : table.rows)
          rows.push_back({{"n", r.n}, {"labeled", r.labeled.str()}, {"unlabeled", r.unlabeled}});
        Json j{{"rows", rows}};
        if (table.rows.size() >= 4) {
          auto gr = growth_diagnostics(table);
          j["growth"] = {{"tag", gr.tag}, {"factorial_exponent", gr.factorial_exponent}};
        }
        run.emit_json(j);
      }
    };
  });

  // probe basic|tb
  std::string probe_mode;
  int probe_k = 2;
  auto* probe = app.add_subcommand("probe", "finite checks of basic / totally bounded behaviour");
  probe->add_option("mode", probe_mode)->required()->check(CLI::IsMember({"basic", "tb"}));
  probe->add_option("--k", probe_k)->check(CLI::PositiveNumber);
  prop.attach(probe);
  probe->callback([&] {
    action = [&] {
      auto spec = prop.build();
      Json j{{"mode", probe_mode}, {"k", probe_k}, {"nmax", prop.n_max}};
      if (probe_mode == "basic") {
        auto v = is_basic_upto(spec, probe_k, prop.n_max, g.budget);
        j["consistent"] = v.consistent;
        if (v.witness) {
          j["witness"] = structure_to_json(*v.witness);
          j["classes"] = v.classes;
        }
      } else {
        auto v = is_totally_bounded_upto(spec, probe_k, prop.n_max, g.budget);
        j["consistent"] = v.consistent;
        if (v.witness) {
          const auto& w = *v.witness;
          std::vector<int> fixed, free;
          for (int p : w.fixed) fixed.push_back(p + 1);
          for (int p : w.free) free.push_back(p + 1);
          j["witness"] = {{"member", structure_to_json(w.member)}, {"relation", w.relation},
                          {"fixed_positions", fixed},           {"free_positions", free},
                          {"assignment", detail::shift_up(w.assignment)}, {"completions", w.completions}};
        }
      }
      run.emit_json(j);
    };
  });

  // template count|enumerate|fit|union|relate
  std::string tmode;
  std::vector<std::string> tpaths;
  int tn = 6;
  std::string fit_window = "6..12";
  std::string verify_window = "13..16";
  auto* tcmd = app.add_subcommand("template", "exact counting for template-compatible structures");
  tcmd->add_option("mode", tmode)->required()->check(CLI::IsMember({"count", "enumerate", "fit", "union", "relate"}));
  tcmd->add_option("--template", tpaths)->required()->delimiter(',');
  tcmd->add_option("--n", tn)->check(CLI::NonNegativeNumber);
  tcmd->add_option("--window", fit_window, "fit window a..b");
  tcmd->add_option("--verify", verify_window, "verification window a..b");
  tcmd->callback([&] {
    action = [&] {
      std::vector<Template> ts;
      for (const auto& p : tpaths) ts.push_back(read_template(p));
      const Template& t = ts.front();
      Json j{{"mode", tmode}};
      if (tmode == "count") {
        auto count = count_compatible(t, tn);
        if (run.format("json") == "pretty") {
          run.write(count.str() + "\n");
          return;
        }
        j["n"] = tn;
        j["count"] = count.str();
        j["omega"] = omega_count(t, tn).str();
        j["aut_star"] = aut_star(t).size();
      } else if (tmode == "enumerate") {
        auto all = enumerate_compatible(t, tn, g.budget > 0 ? g.budget : 10);
        Json list = Json::array();
        for (const auto& s : all) list.push_back(structure_to_json(s));
        j["n"] = tn;
        j["count"] = all.size();
        j["structures"] = list;
      } else if (tmode == "fit") {
        auto form = speed_form(t, parse_window(fit_window), parse_window(verify_window));
        Json polys = Json::array();
        for (const auto& p : form.polys) {
          Json coeffs = Json::array();
          for (const auto& c : p) coeffs.push_back(to_string(c));
          polys.push_back(coeffs);
        }
        j["polys"] = polys;
        j["threshold"] = form.threshold;
        j["form"] = form.to_string_form();
      } else if (tmode == "union") {
        j["n"] = tn;
        j["count"] = union_speed(ts, tn).str();
      } else {
        if (ts.size() != 2) fail(errc::kUsageError, "relate needs exactly two templates");
        auto rel = templates_equivalent_or_disjoint(ts[0], ts[1]);
        j["equivalent"] = rel.equivalent;
        if (rel.equivalent) {
          std::vector<int> sigma;
          for (int x : rel.sigma) sigma.push_back(x + 1);
          j["sigma"] = sigma;
        }
      }
      run.emit_json(j);
    };
  });

  // components
  std::string comp_path;
  auto* comps = app.add_subcommand("components", "components of a structure");
  comps->add_option("structure", comp_path)->required();
  comps->callback([&] {
    action = [&] {
      auto m = single_structure(comp_path);
      auto rep = components_of(m);
      Json hist = Json::object();
      for (const auto& [size, count] : rep.histogram) hist[std::to_string(size)] = count;
      Json nbhd = Json::array();
      for (int a = 0; a < m.size(); ++a) nbhd.push_back(detail::shift_up(neighborhood(m, a)));
      run.emit_json({{"components", rows_json(rep.components)}, {"histogram", hist}, {"neighborhoods", nbhd}});
    };
  });

  // census
  auto* census_cmd = app.add_subcommand("census", "component sizes over members up to --nmax");
  PropertyArgs census_prop;
  census_prop.attach(census_cmd);
  census_cmd->callback([&] {
    action = [&] {
      auto c = component_census(census_prop.build(), census_prop.n_max, g.budget);
      Json mult = Json::object();
      for (const auto& [size, count] : c.max_multiplicity) mult[std::to_string(size)] = count;
      run.emit_json({{"nmax", c.n_max}, {"max_multiplicity", mult}, {"largest_component", c.largest_component}});
    };
  });

  // blocks
  int bn = 6;
  int bk = 2;
  auto* blocks = app.add_subcommand("blocks", "partitions of [k floor(n/k)] into blocks of size k");
  blocks->add_option("--n", bn)->required();
  blocks->add_option("--k", bk)->required();
  blocks->callback([&] {
    action = [&] {
      auto b = partitions_into_blocks(bn, bk);
      run.emit_json({{"n", bn},
                     {"k", bk},
                     {"m", b.m},
                     {"parts", b.parts},
                     {"count", b.count.str()},
                     {"intermediate", b.intermediate.str(20)},
                     {"reference", b.reference.str(20)},
                     {"bound_holds", block_bound_holds(b)}});
    };
  });

  // arrays types|count|probe|algebraic
  std::string amode;
  std::string apath;
  std::string arel = "E";
  std::vector<int> asplit{1};
  std::vector<int> aparams;
  int am = 2;
  int ak = 2;
  PropertyArgs aprop;
  auto* arrays = app.add_subcommand("arrays", "R(x;y)-types, m-arrays and bounded-array probes");
  arrays->add_option("mode", amode)->required()->check(CLI::IsMember({"types", "count", "probe", "algebraic"}));
  arrays->add_option("--structure", apath);
  arrays->add_option("--rel", arel);
  arrays->add_option("--split", asplit, "1-based x positions")->delimiter(',');
  arrays->add_option("--A", aparams, "1-based parameter elements")->delimiter(',');
  arrays->add_option("--m", am)->check(CLI::PositiveNumber);
  arrays->add_option("--k", ak)->check(CLI::PositiveNumber);
  aprop.attach(arrays);
  arrays->callback([&] {
    action = [&] {
      std::vector<int> xs;
      for (int p : asplit) xs.push_back(p - 1);
      if (amode == "probe") {
        auto spec = aprop.build();
        auto r = spec.language->relation_index(arel);
        if (!r) fail(errc::kOutOfRange, "no relation '" + arel + "' in the language");
        ProbeOptions opt;
        opt.seed = g.seed;
        opt.budget = g.budget;
        auto table = bounded_array_probe(spec, *r, xs, am, aprop.n_max, opt);
        if (run.format("csv") == "csv") {
          std::ostringstream out;
          out << "# seed=" << g.seed << "\nn,maxN,witness_id\n";
          for (const auto& row : table.rows) out << row.n << ',' << row.max_count << ',' << row.witness << '\n';
          run.write(out.str());
          return;
        }
        Json rows = Json::array();
        for (const auto& row : table.rows)
          rows.push_back({{"n", row.n}, {"maxN", row.max_count}, {"witness_id", row.witness},
                          {"A", detail::shift_up(row.parameters)}});
        run.emit_json({{"rows", rows}, {"constant", table.constant()}, {"growing", table.growing()}});
        return;
      }
      if (apath.empty()) fail(errc::kUsageError, "--structure is required for arrays " + amode);
      auto m = single_structure(apath);
      const int r = relation_index(m, arel);
      if (amode == "algebraic") {
        auto v = is_k_mutually_algebraic(m, r, ak);
        Json j{{"k", ak}, {"holds", v.holds}};
        if (!v.holds) {
          std::vector<int> fixed;
          for (int p : v.fixed) fixed.push_back(p + 1);
          j["fixed_positions"] = fixed;
          j["assignment"] = detail::shift_up(v.assignment);
          j["completions"] = v.completions;
        }
        run.emit_json(j);
        return;
      }
      auto split = make_split(m, r, xs);
      auto a = shift_list(aparams, m.size(), "parameter");
      if (amode == "count") {
        run.emit_json({{"m", am}, {"A", detail::shift_up(a)}, {"count", n_array_count(m, split, am, a)}});
        return;
      }
      auto space = type_space(m, split, a);
      Json types = Json::array();
      for (const auto& t : space.types) {
        std::vector<int> bits(t.decisions.begin(), t.decisions.end());
        types.push_back({{"decisions", bits},
                         {"realizations", rows_json(t.realizations)},
                         {"supports_m_array", supports_m_array(t, am)}});
      }
      run.emit_json({{"basis", space.basis}, {"A", detail::shift_up(space.parameters)}, {"types", types}});
    };
  });

  // osc balanced|member|blowup|sample|sequence|density
  std::string omode;
  int orr = 2;
  std::string oc = "1";
  std::string omember = "q";
  std::vector<int> onu;
  std::string oh;
  int on = 0;
  int ok = 3;
  std::string odelta = "8/5";
  std::string oeps = "3/2";
  int osteps = 2;
  bool olist = false;
  auto* osc = app.add_subcommand("osc", "hypergraph density constructions");
  osc->set_help_flag("--help", "Print this help message and exit");  // frees --h for the hypergraph
  osc->add_option("operation", omode)
      ->required()
      ->check(CLI::IsMember({"balanced", "member", "blowup", "sample", "sequence", "density"}));
  osc->add_option("--r", orr)->check(CLI::Range(2, 16));
  osc->add_option("--c", oc, "density bound, e.g. 2/5");
  osc->add_option("--mode", omember, "membership test: q, s or p")->check(CLI::IsMember({"q", "s", "p"}));
  osc->add_option("--nu", onu, "constrained sizes for p")->delimiter(',');
  osc->add_option("--h", oh, "hypergraph JSON");
  osc->add_option("--n", on);
  osc->add_option("--k", ok);
  osc->add_option("--delta", odelta);
  osc->add_option("--eps", oeps);
  osc->add_option("--steps", osteps);
  osc->add_flag("--list", olist, "list blow-up members, not only their number");
  osc->callback([&] {
    action = [&] {
      const Rational c = parse_rational(oc);
      if (omode == "balanced") {
        BalancedOptions opt;
        opt.seed = g.seed;
        if (g.budget > 0) opt.budget = g.budget;
        auto found = find_strictly_balanced(orr, c, opt);
        run.emit_json({{"r", orr}, {"c", to_string(c)}, {"hypergraph", hypergraph_to_json(found.graph)},
                       {"source", found.source}, {"density", to_string(density(found.graph))},
                       {"strictly_balanced", is_strictly_balanced(found.graph)}});
        return;
      }
      if (omode == "sample") {
        auto s = sample_dense_member(orr, ok, c, on, parse_rational(odelta), g.seed);
        run.emit_json({{"hypergraph", hypergraph_to_json(s.graph)}, {"edges", s.graph.e()}, {"p", s.p},
                       {"edge_floor", s.edge_floor}, {"attempts", s.attempts}, {"verification", s.verification},
                       {"closure_checks", s.closure_checks}, {"log2_lower_bound", s.graph.e()}});
        return;
      }
      if (omode == "sequence") {
        const Rational eps = parse_rational(oeps);
        auto seq = build_sequence(orr, c, eps, osteps, sampling_estimator(orr, c, eps, g.seed));
        Json certs = Json::array();
        for (const auto& cert : seq.certificates)
          certs.push_back({{"n", cert.n}, {"log2_lower_bound", cert.log2_lower}, {"target", cert.target},
                           {"verification", cert.verification}, {"sample_seed", cert.seed}});
        run.emit_json({{"r", orr}, {"c", to_string(c)}, {"eps", to_string(eps)}, {"nu", seq.nu}, {"mu_upper", seq.mu},
                       {"certificates", certs}});
        return;
      }
      if (oh.empty()) fail(errc::kUsageError, "--h is required for osc " + omode);
      auto h = read_hypergraph(oh);
      if (omode == "density") {
        auto d = max_subgraph_density(h);
        run.emit_json({{"density", to_string(density(h))}, {"max_subgraph_density", to_string(d.density)},
                       {"witness", detail::shift_up(d.witness)}, {"strictly_balanced", is_strictly_balanced(h)}});
      } else if (omode == "member") {
        bool in = omember == "q" ? in_Q(h, c) : omember == "s" ? in_S(h, c) : in_P(h, onu, c, g.budget > 0 ? g.budget : 5'000'000);
        run.emit_json({{"mode", omember}, {"c", to_string(c)}, {"nu", onu}, {"member", in}});
      } else {
        auto b = blowup_members(h, on, !olist, g.budget > 0 ? g.budget : 200'000);
        Json j{{"n", on}, {"count", b.count.str()}, {"floor_bound", b.floor_bound.str()}, {"part_sizes", b.part_sizes}};
        if (olist) {
          Json list = Json::array();
          for (const auto& m : b.members) list.push_back(hypergraph_to_json(m));
          j["members"] = list;
        }
        run.emit_json(j);
      }
    };
  });

  // corpus
  std::string kind;
  std::string tname = "bipartite";
  std::map<std::string, int> params;
  std::map<std::string, int*> slots;
  int pm = 4, pn = 4, pr = 3, pv = 5, pk = 2, pa = 2, pb = 2;
  auto* corpus = app.add_subcommand("corpus", "write a built-in family member as JSON");
  corpus->add_option("kind", kind)->required();
  corpus->add_option("--name", tname, "built-in template name");
  for (auto [flag, slot] : std::vector<std::pair<std::string, int*>>{
           {"m", &pm}, {"n", &pn}, {"r", &pr}, {"v", &pv}, {"k", &pk}, {"a", &pa}, {"b", &pb}}) {
    corpus->add_option("--" + flag, *slot);
    slots[flag] = slot;
  }
  corpus->callback([&] {
    action = [&] {
      for (const auto& [key, slot] : slots) params[key] = *slot;
      run.write(corpus_generate(kind, params, tname).dump(2) + "\n");
    };
  });

  auto error_json = [](const std::string& code, const std::string& message) {
    return Json{{"code", code}, {"message", message}}.dump();
  };
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << error_json(std::string(errc::kUsageError), e.what()) << "\n";
    return 2;
  }
  try {
    action();
  } catch (const Error& e) {
    std::cerr << error_json(e.code(), e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_json("InternalError", e.what()) << "\n";
    return 1;
  }
  return 0;
}
