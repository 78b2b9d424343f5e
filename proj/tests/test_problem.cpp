#include <cmath>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>

#include "abocs/hoa.hpp"
#include "abocs/problem.hpp"
#include "doctest.h"

using namespace abocs;
namespace fs = std::filesystem;

namespace {

/* scratch directory for problems that reference other files */
struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("abocs_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string put(const std::string& name, const std::string& text) {
    std::ofstream out(dir / name);
    out << text;
    return (dir / name).string();
  }
};

const char* kTinySystem =
    "[states]\ns0\ns1\n[initial]\ns0\n[inputs]\na\n[outputs]\ny\n"
    "[trans]\ns0 a -> s1\ns1 a -> s0\n[out]\ns0 -> y\ns1 -> y\n"
    "[aps.out]\np\n[preds.state]\ns0 -> {}\ns1 -> {p}\n"
    "[preds.input]\na -> {}\n";

std::string plant_text(const std::string& extra = "",
                       const std::string& spec = "formula = \"GF goal\"") {
  return "[plant]\n"
         "dim = 2\n"
         "a = [[0, 1], [-1, 0]]\n"
         "b = [[1, 0], [0, 2]]\n"
         "inputs = [[1, 0], [0, -1]]\n"
         "dist = [0.1, 0.2]\n"
         "init = [[0, 0], [1, 1]]\n"
         "[grid]\n"
         "theta = [[0, 0], [2, 2]]\n"
         "eta = [1, 1]\n"
         "tau = 0.5\n"
         "[region.goal]\n"
         "boxes = [[[0, 0], [1, 1]]]\n" +
         extra + "[spec]\n" + spec + "\n";
}

}  // namespace

TEST_CASE("finite problem references a system file") {
  TempDir td;
  td.put("tiny.sys", kTinySystem);
  Problem p = parse_problem(
      "[system]\nfile = \"tiny.sys\"\n[spec]\nformula = \"G !p\"\n",
      td.dir.string());
  CHECK(!p.continuous());
  auto& fp = std::get<FiniteProblem>(p.model);
  CHECK(fp.model.sys.states.names() == std::vector<std::string>{"s0", "s1"});
  CHECK(p.formula == "G !p");
  CHECK(effective_formula(p) == "G !p");
  CHECK(p.k_max == -1);

  CompiledModel cm = compile_model(p);
  CHECK(!cm.grid.has_value());
  CHECK(cm.model.sys.states.size() == 2);
}

TEST_CASE("plant section builds the linear field with defaults") {
  Problem p = parse_problem(plant_text(), ".");
  REQUIRE(p.continuous());
  auto& cp = std::get<ContinuousProblem>(p.model);

  // dx = A x + B u at x = (1, 2), u = (0.5, -1)
  Vec dx = cp.plant.field({1.0, 2.0}, {0.5, -1.0});
  CHECK(dx[0] == doctest::Approx(0 * 1 + 1 * 2 + 1 * 0.5));
  CHECK(dx[1] == doctest::Approx(-1 * 1 + 0 * 2 + 2 * -1.0));

  // growth defaults to |A| entrywise
  CHECK(cp.plant.growth[0][0] == 0.0);
  CHECK(cp.plant.growth[0][1] == 1.0);
  CHECK(cp.plant.growth[1][0] == 1.0);
  CHECK(cp.plant.dist[1] == 0.2);
  REQUIRE(cp.plant.init.has_value());
  CHECK(cp.plant.init->hi[1] == 1.0);

  // tile outputs inherit the state grid when out_eta is omitted
  CHECK(cp.grid.mode == OutputMode::Tiles);
  CHECK(cp.grid.out_eta == cp.grid.eta);
  REQUIRE(cp.regions.size() == 1);
  CHECK(cp.regions[0].label == "goal");
}

TEST_CASE("explicit growth entries may contract on the diagonal") {
  std::string text = plant_text();
  text.insert(text.find("[grid]"), "growth = [[-0.3, 1], [1, -0.3]]\n");
  Problem q = parse_problem(text, ".");
  auto& cp = std::get<ContinuousProblem>(q.model);
  CHECK(cp.plant.growth[0][0] == -0.3);
  CHECK(cp.plant.growth[1][0] == 1.0);
}

TEST_CASE("region labels sort alphabetically regardless of file order") {
  std::string text = plant_text(
      "[region.zone]\nboxes = [[[1, 1], [2, 2]]]\n"
      "[region.alpha]\nboxes = [[[0, 1], [1, 2]]]\n");
  Problem p = parse_problem(text, ".");
  auto& cp = std::get<ContinuousProblem>(p.model);
  REQUIRE(cp.regions.size() == 3);
  CHECK(cp.regions[0].label == "alpha");
  CHECK(cp.regions[1].label == "goal");
  CHECK(cp.regions[2].label == "zone");
}

TEST_CASE("continuous objectives pick up the overflow guard") {
  Problem p = parse_problem(plant_text(), ".");
  CHECK(effective_formula(p) == "(GF goal) & G !violation");

  Problem q = parse_problem(
      plant_text("", "formula = \"GF goal & G !violation\""), ".");
  CHECK(effective_formula(q) == "GF goal & G !violation");
}

TEST_CASE("synthesis section overrides the defaults") {
  Problem p = parse_problem(plant_text("[synthesis]\nk_max = 7\n"
                                       "antichain = false\n"
                                       "output_anchored = true\n"),
                            ".");
  CHECK(p.k_max == 7);
  CHECK(!p.synth.antichain);
  CHECK(p.product.output_anchored_preds);
}

TEST_CASE("schema violations are rejected with a reason") {
  TempDir td;
  td.put("tiny.sys", kTinySystem);
  auto finite = [&](const std::string& text) {
    return parse_problem(text, td.dir.string());
  };

  CHECK_THROWS_WITH_AS(finite("[system]\nfile = \"tiny.sys\"\n"),
                       "a problem needs a [spec]", ValidationError);
  CHECK_THROWS_WITH_AS(
      finite("[spec]\nformula = \"G p\"\n"),
      "a problem needs exactly one of [system] and [plant]", ValidationError);
  CHECK_THROWS_WITH_AS(
      finite("[system]\nfile = \"tiny.sys\"\n[grid]\ntau = 1\n"
             "[spec]\nformula = \"G p\"\n"),
      "[grid] only applies to a [plant] model", ValidationError);
  CHECK_THROWS_AS(finite("[system]\nfile = \"tiny.sys\"\n[mystery]\nx = 1\n"
                         "[spec]\nformula = \"G p\"\n"),
                  ValidationError);
  CHECK_THROWS_AS(
      finite("[system]\nfile = \"tiny.sys\"\nfile = \"tiny.sys\"\n"
             "[spec]\nformula = \"G p\"\n"),
      ParseError);
  CHECK_THROWS_AS(
      finite("[system]\nfile = \"tiny.sys\"\nextra = 3\n"
             "[spec]\nformula = \"G p\"\n"),
      ParseError);
  CHECK_THROWS_WITH_AS(
      finite("[system]\nfile = \"tiny.sys\"\n"
             "[spec]\nformula = \"G p\"\nhoa = \"x.hoa\"\n"),
      "[spec] needs exactly one of formula and hoa", ValidationError);

  std::string reserved = plant_text("[region.violation]\n"
                                    "boxes = [[[0, 0], [1, 1]]]\n");
  CHECK_THROWS_WITH_AS(parse_problem(reserved, "."),
                       "region label violation is reserved", ValidationError);

  std::string badbox =
      plant_text("[region.flat]\nboxes = [[[0], [1]]]\n");
  CHECK_THROWS_AS(parse_problem(badbox, "."), ValidationError);
}

TEST_CASE("proposition order puts state bits below input bits") {
  TempDir td;
  td.put("tiny.sys", kTinySystem);
  Problem p = parse_problem(
      "[system]\nfile = \"tiny.sys\"\n[spec]\nformula = \"G !p\"\n",
      td.dir.string());
  auto& sf = std::get<FiniteProblem>(p.model).model;
  REQUIRE(sf.preds.has_value());
  CHECK(letter_aps(*sf.preds) == std::vector<std::string>{"p"});
}

TEST_CASE("imported automata must name the propositions in order") {
  TempDir td;
  td.put("tiny.sys", kTinySystem);
  Problem base = parse_problem(
      "[system]\nfile = \"tiny.sys\"\n[spec]\nformula = \"G !p\"\n",
      td.dir.string());
  auto& pm = *std::get<FiniteProblem>(base.model).model.preds;

  LtlFactory f;
  Uca direct = compile_spec(f, base, pm);

  // identity letter bits: letter id == valuation over letter_aps
  std::vector<std::uint64_t> bits(direct.num_letters);
  for (std::uint64_t i = 0; i < bits.size(); ++i) bits[i] = i;
  td.put("spec.hoa", hoa_export(direct, letter_aps(pm), bits));

  Problem p = parse_problem(
      "[system]\nfile = \"tiny.sys\"\n[spec]\nhoa = \"spec.hoa\"\n",
      td.dir.string());
  LtlFactory f2;
  Uca imported = compile_spec(f2, p, pm);
  CHECK(imported.num_states == direct.num_states);
  CHECK(imported.num_letters == direct.num_letters);
  CHECK(imported.rejecting == direct.rejecting);

  // same automaton over a renamed proposition no longer matches
  td.put("bad.hoa", hoa_export(direct, {"q"}, bits));
  Problem b = parse_problem(
      "[system]\nfile = \"tiny.sys\"\n[spec]\nhoa = \"bad.hoa\"\n",
      td.dir.string());
  LtlFactory f3;
  CHECK_THROWS_AS(compile_spec(f3, b, pm), ValidationError);
}

TEST_CASE("relation tables survive the text round trip") {
  EfrrRelation q;
  q.alpha = {{0}, {0, 1}, {2}};
  q.beta = {{1}, {0}};
  q.gamma = {{0, 2}, {1}};
  std::string text = serialize_relation(q);
  EfrrRelation back = parse_relation(text);
  CHECK(back == q);

  CHECK_THROWS_AS(parse_relation("[alpha]\n0 -> 0\n[beta]\n0 -> 0\n"),
                  ParseError);
}

TEST_CASE("abstraction serialization is deterministic") {
  Problem p = parse_problem(plant_text(), ".");
  CompiledModel cm = compile_model(p);
  REQUIRE(cm.grid.has_value());
  std::string one = serialize_abstraction(*cm.grid);
  std::string two = serialize_abstraction(*cm.grid);
  CHECK(one == two);
  CHECK(one.find("[grid]") != std::string::npos);
  CHECK(one.find("[cells]") != std::string::npos);
  CHECK(one.find("[tiles]") != std::string::npos);
  CHECK(cm.model.sys.states.size() == cm.grid->sys.states.size());
}

TEST_CASE("number and list values are parsed strictly") {
  std::string text = plant_text();
  auto broken = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  CHECK_THROWS_AS(parse_problem(broken("tau = 0.5", "tau = fast"), "."),
                  ParseError);
  CHECK_THROWS_AS(
      parse_problem(broken("dist = [0.1, 0.2]", "dist = [0.1, 0.2"), "."),
      ParseError);
  CHECK_THROWS_AS(
      parse_problem(broken("dim = 2", "dim = 2.5"), "."), ValidationError);
  CHECK_THROWS_AS(
      parse_problem(broken("b = [[1, 0], [0, 2]]", "b = [[1, 0]]"), "."),
      ValidationError);
}
