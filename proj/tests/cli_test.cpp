#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

#include "hspeed/corpus.hpp"
#include "hspeed/io.hpp"
#include "oracles.hpp"

using namespace hspeed;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hspeed_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  CliResult run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" + HSPEED_CLI_PATH + "' " + args + " >stdout.txt 2>stderr.txt";
    CliResult r;
    int status = std::system(cmd.c_str());
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir_ / "stdout.txt");
    r.err = slurp(dir_ / "stderr.txt");
    return r;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SpeedOfMatchingProperty) {
  write("p3.json", structure_to_json(make_graph(3, {{0, 1}, {1, 2}})).dump());
  write("k3.json", structure_to_json(make_graph(3, {{0, 1}, {1, 2}, {0, 2}})).dump());
  auto r = run("speed --forbid p3.json,k3.json --nmax 8");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n,labeled,unlabeled\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n8,764,5\n"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.rfind("# seed=1\n", 0), 0U);
  auto j = run("speed --predicate matching --nmax 8 --format json");
  ASSERT_EQ(j.code, 0);
  auto doc = Json::parse(j.out);
  EXPECT_EQ(doc["rows"][7]["labeled"], "764");
  EXPECT_EQ(doc["growth"]["tag"], "factorial-degree-2");
}

TEST_F(Cli, TemplateCount) {
  auto r = run("corpus template --name bipartite --out bip.json");
  ASSERT_EQ(r.code, 0) << r.err;
  auto count = run("template count --template bip.json --n 8");
  ASSERT_EQ(count.code, 0) << count.err;
  EXPECT_EQ(Json::parse(count.out)["count"], "91");
  EXPECT_EQ(run("template count --template bip.json --n 8 --format pretty").out, "91\n");
  auto fit = run("template fit --template bip.json --window 6..12");
  ASSERT_EQ(fit.code, 0) << fit.err;
  EXPECT_EQ(Json::parse(fit.out)["polys"][1][0], "1/2");
  auto bad = run("template fit --template bip.json --window 6-12");
  EXPECT_EQ(bad.code, 2);
}

TEST_F(Cli, ErrorsAreStructured) {
  auto unknown = run("frobnicate");
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("Usage:"), std::string::npos);
  auto last = unknown.err.substr(unknown.err.rfind('{'));
  EXPECT_EQ(Json::parse(last)["code"], "UsageError");

  auto blocks = run("blocks --n 2 --k 3");
  EXPECT_EQ(blocks.code, 2);
  EXPECT_EQ(Json::parse(blocks.err)["code"], "OutOfRange");
  EXPECT_TRUE(blocks.out.empty());

  auto kind = run("corpus nonsense");
  EXPECT_EQ(kind.code, 2);
  EXPECT_EQ(Json::parse(kind.err)["code"], "UnknownKind");

  write("broken.json", "{\"n\": 3");
  auto parse = run("decompose broken.json");
  EXPECT_EQ(parse.code, 2);
  EXPECT_EQ(Json::parse(parse.err)["code"], "ParseError");

  auto infeasible = run("osc balanced --r 3 --c 1/4");
  EXPECT_EQ(infeasible.code, 2);
  EXPECT_EQ(Json::parse(infeasible.err)["code"], "InfeasibleDensity");
}

TEST_F(Cli, CorpusFamilies) {
  auto m4 = structure_from_json(Json::parse(run("corpus matching --m 4").out));
  EXPECT_EQ(m4.size(), 8);
  EXPECT_EQ(m4.relation(0).size(), 8U);
  auto b4 = structure_from_json(Json::parse(run("corpus halfgraph-blowup --m 4").out));
  EXPECT_EQ(b4.size(), 20);
  EXPECT_EQ(b4.relation(0).size(), 2U * 4 * (4 + 3 + 2 + 1));
  auto tc = Json::parse(run("corpus tight-cycle --r 3 --v 5").out);
  EXPECT_EQ(tc["r"], 3);
  EXPECT_EQ(tc["v"], 5);
  std::set<std::vector<int>> edges;
  for (const auto& e : tc["edges"]) edges.insert(e.get<std::vector<int>>());
  std::set<std::vector<int>> expected;
  for (int i = 0; i < 5; ++i) {
    std::vector<int> e{i % 5 + 1, (i + 1) % 5 + 1, (i + 2) % 5 + 1};
    std::sort(e.begin(), e.end());
    expected.insert(e);
  }
  EXPECT_EQ(edges, expected);
}

TEST_F(Cli, Reproducible) {
  auto a = run("osc sample --r 2 --c 2/3 --k 3 --n 30 --delta 1.6 --seed 42");
  auto b = run("osc sample --r 2 --c 2/3 --k 3 --n 30 --delta 1.6 --seed 42");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(Json::parse(a.out)["seed"], 42);
  auto p1 = run("arrays probe --predicate bipartite --nmax 6 --m 2 --seed 3");
  auto p2 = run("arrays probe --predicate bipartite --nmax 6 --m 2 --seed 3");
  ASSERT_EQ(p1.code, 0) << p1.err;
  EXPECT_EQ(p1.out, p2.out);
  EXPECT_EQ(p1.out.rfind("# seed=3\nn,maxN,witness_id\n", 0), 0U);
  auto s = run("osc sequence --r 2 --c 1 --eps 3/2 --steps 2 --seed 7");
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.out, run("osc sequence --r 2 --c 1 --eps 3/2 --steps 2 --seed 7").out);
  EXPECT_EQ(Json::parse(s.out)["nu"][0], 3);
}

TEST_F(Cli, OutFileAndSubcommands) {
  ASSERT_EQ(run("corpus cycle --n 4 --out c4.json").code, 0);
  auto d = run("decompose c4.json --out dec.json");
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_TRUE(d.out.empty());
  auto dec = Json::parse(slurp(dir_ / "dec.json"));
  EXPECT_EQ(dec["classes"], Json::parse("[[1,3],[2,4]]"));
  EXPECT_EQ(dec["sigma"]["E(x1,x2)"], Json::parse("[[1,2],[2,1]]"));

  auto comps = Json::parse(run("components c4.json").out);
  EXPECT_EQ(comps["histogram"]["4"], 1);
  auto census = Json::parse(run("census --predicate matching --nmax 6").out);
  EXPECT_EQ(census["max_multiplicity"]["2"], 3);
  auto blocks = Json::parse(run("blocks --n 6 --k 2").out);
  EXPECT_EQ(blocks["count"], "15");
  auto probe = Json::parse(run("probe tb --predicate matching --k 2 --nmax 6").out);
  EXPECT_EQ(probe["consistent"], true);

  ASSERT_EQ(run("corpus matching --m 4 --out m4.json").code, 0);
  auto types = Json::parse(run("arrays types --structure m4.json --split 1 --A 1 --m 2").out);
  EXPECT_EQ(types["types"].size(), 3U);
  EXPECT_EQ(Json::parse(run("arrays count --structure m4.json --split 1 --A 1,3,5,7 --m 2").out)["count"], 0);
  EXPECT_EQ(Json::parse(run("arrays algebraic --structure m4.json --k 2").out)["holds"], true);

  ASSERT_EQ(run("corpus sunflower --r 3 --k 1 --out e3.json").code, 0);
  EXPECT_EQ(Json::parse(run("osc blowup --h e3.json --n 9").out)["count"], "36");
  EXPECT_EQ(Json::parse(run("osc density --h e3.json").out)["max_subgraph_density"], "1/3");
  write("k4.json", R"({"r":2,"v":4,"edges":[[1,2],[1,3],[1,4],[2,3],[2,4],[3,4]]})");
  EXPECT_EQ(Json::parse(run("osc member --mode p --c 2/3 --nu 3 --h k4.json").out)["member"], false);
  EXPECT_EQ(Json::parse(run("osc member --mode s --c 3/2 --h k4.json").out)["member"], true);
}

TEST(JsonBoundary, RoundTrips) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    auto m = oracle::random_mixed(rng, 1 + static_cast<int>(rng() % 6), 0.3, static_cast<int>(rng() % 3));
    ASSERT_EQ(structure_from_json(Json::parse(structure_to_json(m).dump())), m);
  }
  for (const auto& [name, t] : builtin_templates()) ASSERT_EQ(template_from_json(template_to_json(t)), t) << name;
  auto h = tight_cycle(3, 6);
  EXPECT_EQ(hypergraph_from_json(hypergraph_to_json(h)), h);
  EXPECT_EQ(hypergraph_to_json(h)["edges"][0], Json::parse("[1,2,3]"));

  auto one_based = Json::parse(R"({"language":{"relations":[{"name":"E","arity":2}]},"n":2,"tuples":{"E":[[1,2]]}})");
  auto s = structure_from_json(one_based);
  EXPECT_TRUE(s.holds(0, std::array<Element, 2>{0, 1}));
  auto bad = one_based;
  bad["tuples"]["E"] = Json::parse("[[0,1]]");
  EXPECT_THROW(structure_from_json(bad), Error);
  bad["tuples"] = Json::parse(R"({"F":[[1,2]]})");
  EXPECT_THROW(structure_from_json(bad), Error);
  EXPECT_THROW(hypergraph_from_json(Json::parse(R"({"r":2,"v":2,"edges":[[1,1]]})")), Error);

  auto docs = parse_documents("{\"a\":1}\n\n{\"a\":2}\n", "stream");
  EXPECT_EQ(docs.size(), 2U);
}
