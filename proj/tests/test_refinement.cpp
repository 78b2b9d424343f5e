#include <random>
#include <set>
#include <vector>

#include "abocs/oracle/random_instance.hpp"
#include "abocs/refinement.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace abocs;

namespace {

/* memoryless controller answering every output with the same input */
MealyController constant_controller(const FiniteSystem& sys, int u) {
  MealyController m;
  m.outputs = sys.outputs;
  m.inputs = sys.inputs;
  m.num_memory = 1;
  m.initial = 0;
  m.step.assign(1, std::vector<std::optional<std::pair<int, int>>>(
                       sys.num_outputs(), std::make_pair(u, 0)));
  return m;
}

ControlSystem line_decay() {
  ControlSystem cs;
  cs.dim = 1;
  cs.init = Box{{0.0}, {0.4}};
  cs.inputs = {{-1.0}, {1.0}};
  cs.dist = {0.1};
  cs.growth = {{0.5}};
  cs.field = [](const Vec& x, const Vec& u) { return Vec{-0.5 * x[0] + u[0]}; };
  return cs;
}

GridSpec line_grid() {
  GridSpec g;
  g.theta = Box{{0.0}, {2.0}};
  g.eta = {0.5};
  g.tau = 0.5;
  g.rk_steps = 10;
  g.mode = OutputMode::Tiles;
  g.out_eta = {1.0};
  return g;
}

std::vector<LabeledRegion> goal_region() {
  return {{"goal", {Box{{0.5}, {1.0}}}}};
}

int count_sub(const std::string& s, const std::string& pat) {
  int n = 0;
  for (std::size_t p = s.find(pat); p != std::string::npos;
       p = s.find(pat, p + pat.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("identity relation projects a prefix to itself") {
  FiniteSystem s = make_s2();
  EfrrRelation q = identity_relation(s);
  ExternalPrefix pre{{0, 1, 0}, {1, 0}};
  CHECK(project_omega(pre, q) == pre);
}

TEST_CASE("projection resolves thick images through the policy") {
  EfrrRelation q;
  q.alpha = {{0}};
  q.beta = {{3}, {1, 4}};
  q.gamma = {{2, 5}, {}};

  ExternalPrefix pre{{0, 0}, {1}};
  ExternalPrefix ab = project_omega(pre, q);
  CHECK((ab.ys == std::vector<int>{2, 2}));
  CHECK((ab.us == std::vector<int>{1}));          // only uhat 1 maps onto 1
  ExternalPrefix alt{{0, 0}, {4}};
  CHECK((project_omega(alt, q).us == std::vector<int>{1}));

  SelectionPolicy highest;
  highest.gamma_select = [](const IdSet& s) { return s[s.size() - 1]; };
  CHECK((project_omega(pre, q, highest).ys == std::vector<int>{5, 5}));

  /* empty image, empty preimage, malformed and out-of-range prefixes */
  CHECK_THROWS_AS(project_omega(ExternalPrefix{{1}, {}}, q), ValidationError);
  CHECK_THROWS_AS(project_omega(ExternalPrefix{{0, 0}, {0}}, q),
                  ValidationError);
  CHECK_THROWS_AS(project_omega(ExternalPrefix{{0, 0}, {}}, q),
                  ValidationError);
  CHECK_THROWS_AS(project_omega(ExternalPrefix{{5}, {}}, q), ValidationError);
}

TEST_CASE("refined stepping replays the abstract controller") {
  FiniteSystem s = make_s2();
  RefinedController rc =
      make_refined(constant_controller(s, 1), identity_relation(s));
  for (int i = 0; i < 5; ++i) CHECK(refined_step(rc, 0) == 1);
  CHECK((rc.trace.ys == std::vector<int>(5, 0)));
  CHECK((rc.trace.us == std::vector<int>(5, 1)));
  CHECK(rc.memory == 0);
}

TEST_CASE("an undefined abstract move carries the projected prefix") {
  FiniteSystem s = make_s2();
  MealyController m = constant_controller(s, 1);
  m.step[0][1] = std::nullopt;
  RefinedController rc = make_refined(m, identity_relation(s));
  bool caught = false;
  try {
    refined_step(rc, 1);
  } catch (const UndefinedStrategy& e) {
    caught = true;
    CHECK((e.prefix.ys == std::vector<int>{1}));
    CHECK(e.prefix.us.empty());
  }
  CHECK(caught);
}

TEST_CASE("stateful stepping agrees with the prefix-addressed form") {
  FiniteSystem s = make_s2();
  EfrrRelation q = identity_relation(s);
  q.gamma = {{0}, {0, 1}};  // both outputs project onto the first
  MealyController m = constant_controller(s, 1);
  RefinedController rc = make_refined(m, q);
  Strategy c = refined_strategy(m, q);

  std::vector<int> ys{0, 1, 1, 0};
  ExternalPrefix pre;
  for (int y : ys) {
    pre.ys.push_back(y);
    int u = refined_step(rc, y);
    CHECK(c(pre) == u);
    pre.us.push_back(u);
  }
  CHECK((rc.trace.ys == std::vector<int>(4, 0)));

  /* a history the controller would not have produced is rejected */
  CHECK_FALSE(c(ExternalPrefix{{0, 0}, {0}}).has_value());
}

TEST_CASE("a constant loop resolves to a single branch") {
  FiniteSystem s = make_s2();
  PredicateMaps pm = make_s2_preds();
  Strategy c = refined_strategy(constant_controller(s, 1), identity_relation(s));
  auto traces = simulate_closed_loop(s, pm, c, 5, BranchMode::All);
  REQUIRE(traces.size() == 1);
  const FiniteTrace& t = traces[0];
  CHECK((t.xs == std::vector<int>(6, 0)));
  CHECK((t.ys == std::vector<int>(6, 0)));
  CHECK((t.us == std::vector<int>(5, 1)));
  CHECK((t.state_letters == std::vector<PredMask>(6, 0)));
  CHECK((t.input_letters == std::vector<PredMask>(5, 0)));
}

TEST_CASE("branch mode all enumerates every resolution") {
  FiniteSystem s = make_s2();
  PredicateMaps pm = make_s2_preds();
  Strategy c = refined_strategy(constant_controller(s, 0), identity_relation(s));
  auto traces = simulate_closed_loop(s, pm, c, 2, BranchMode::All);
  CHECK(traces.size() == 7);
  std::set<FiniteTrace> uniq(traces.begin(), traces.end());
  CHECK(uniq.size() == 7);

  FiniteTrace first;
  first.xs = {0, 0, 0};
  first.us = {0, 0};
  first.ys = {0, 0, 0};
  first.state_letters = {0, 0, 0};
  first.input_letters = {0, 0};
  CHECK(traces.front() == first);

  /* the observable part matches the closed-loop prefix construction */
  std::set<ExternalPrefix> seen;
  for (const auto& t : traces) seen.insert(ExternalPrefix{t.ys, t.us});
  auto direct = closed_loop_prefixes(s, c, 2);
  CHECK(seen == std::set<ExternalPrefix>(direct.begin(), direct.end()));
}

TEST_CASE("a blocked or undefined controller surfaces as composition error") {
  FiniteSystem s = make_s2();
  PredicateMaps pm = make_s2_preds();

  Strategy blocked = [](const ExternalPrefix& pre) -> std::optional<int> {
    return pre.ys.back() == 1 ? 1 : 0;  // answers the second output with b
  };
  bool caught = false;
  try {
    simulate_closed_loop(s, pm, blocked, 2, BranchMode::All);
  } catch (const CompositionError& e) {
    caught = true;
    CHECK(e.reason == CompositionError::Reason::NotEnabled);
    CHECK((e.prefix == ExternalPrefix{{0, 1}, {0}}));
  }
  CHECK(caught);

  Strategy silent = [](const ExternalPrefix&) { return std::optional<int>{}; };
  try {
    simulate_closed_loop(s, pm, silent, 2, BranchMode::All);
    CHECK(false);
  } catch (const CompositionError& e) {
    CHECK(e.reason == CompositionError::Reason::Undefined);
    CHECK((e.prefix == ExternalPrefix{{0}, {}}));
  }

  CHECK_THROWS_AS(simulate_closed_loop(s, pm, blocked, 0, BranchMode::All),
                  ValidationError);
}

TEST_CASE("random mode draws one reproducible trajectory") {
  FiniteSystem s = make_s2();
  PredicateMaps pm = make_s2_preds();
  Strategy c = refined_strategy(constant_controller(s, 0), identity_relation(s));
  auto a = simulate_closed_loop(s, pm, c, 10, BranchMode::Random, 42);
  auto b = simulate_closed_loop(s, pm, c, 10, BranchMode::Random, 42);
  REQUIRE(a.size() == 1);
  CHECK(a == b);

  const FiniteTrace& t = a[0];
  REQUIRE(t.xs.size() == 11);
  REQUIRE(t.ys.size() == 11);
  REQUIRE(t.us.size() == 10);
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    CHECK(s.out[t.xs[i]].contains(t.ys[i]));
    bool letter_offered = false;
    for (PredMask mask : pm.state_preds[t.xs[i]])
      letter_offered |= mask == t.state_letters[i];
    CHECK(letter_offered);
    if (i < t.us.size()) {
      CHECK(t.us[i] == 0);
      CHECK(s.trans[t.xs[i]][t.us[i]].contains(t.xs[i + 1]));
    }
  }
}

TEST_CASE("the refined grid loop stays inside the relation images") {
  ControlSystem cs = line_decay();
  GriddedAbstraction ga = build_abstraction(cs, line_grid(), goal_region());
  MealyController m = constant_controller(ga.sys, 1);  // push right
  ContinuousTrace t = simulate_closed_loop(cs, ga, m, goal_region(), 20, 5);

  REQUIRE(t.xs.size() == 21);
  REQUIRE(t.ys.size() == 21);
  REQUIRE(t.yhats.size() == 21);
  REQUIRE(t.us.size() == 20);
  REQUIRE(t.letters.size() == 21);

  int z = m.initial;
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    CHECK(t.ys[i] == t.xs[i]);  // exact measurement under tile outputs
    CHECK(ga.outputs_at(t.ys[i]).contains(t.yhats[i]));
    double x = t.xs[i][0];
    PredMask want = 0;
    if (0.5 <= x && x <= 1.0) want |= 1;
    if (x < 0.0 || x > 2.0) want |= 2;
    CHECK(t.letters[i] == want);
    if (i < t.us.size()) {
      auto mv = m.act(z, t.yhats[i]);
      REQUIRE(mv.has_value());
      CHECK(t.us[i] == mv->first);
      z = mv->second;
    }
  }

  /* same seed reruns identically */
  ContinuousTrace again = simulate_closed_loop(cs, ga, m, goal_region(), 20, 5);
  CHECK(t.xs == again.xs);
  CHECK(t.us == again.us);

  CHECK_THROWS_AS(simulate_closed_loop(cs, ga, m, goal_region(), 0, 5),
                  ValidationError);
}

TEST_CASE("noisy measurements stay within the tolerance band") {
  ControlSystem cs = line_decay();
  GridSpec g = line_grid();
  g.mode = OutputMode::Noisy;
  g.out_eta.clear();
  g.eps = 0.25;
  GriddedAbstraction ga = build_abstraction(cs, g, goal_region());
  MealyController m = constant_controller(ga.sys, 0);
  ContinuousTrace t = simulate_closed_loop(cs, ga, m, goal_region(), 10, 9);
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    CHECK(std::abs(t.ys[i][0] - t.xs[i][0]) <= 0.25 + 1e-12);
    CHECK(ga.outputs_at(t.ys[i]).contains(t.yhats[i]));
  }
}

TEST_CASE("a projected output the controller lacks ends the run") {
  ControlSystem cs = line_decay();
  GriddedAbstraction ga = build_abstraction(cs, line_grid(), goal_region());
  MealyController m = constant_controller(ga.sys, 1);
  m.step[0][1] = std::nullopt;  // no move once the far tile is seen
  bool caught = false;
  try {
    simulate_closed_loop(cs, ga, m, goal_region(), 80, 1);
  } catch (const UndefinedStrategy& e) {
    caught = true;
    CHECK(e.prefix.ys.back() == 1);
    CHECK(e.prefix.us.size() + 1 == e.prefix.ys.size());
  }
  CHECK(caught);
}

TEST_CASE("region letters follow the label table") {
  ControlSystem cs = line_decay();
  GriddedAbstraction ga = build_abstraction(cs, line_grid(), goal_region());
  auto regions = goal_region();
  CHECK(region_letter(ga, regions, {0.75}) == 1);
  CHECK(region_letter(ga, regions, {0.25}) == 0);
  CHECK(region_letter(ga, regions, {2.5}) == 2);
  CHECK(region_letter(ga, regions, {-0.1}) == 2);
  std::vector<LabeledRegion> unknown{{"mystery", {Box{{0.5}, {1.0}}}}};
  CHECK_THROWS_AS(region_letter(ga, unknown, {0.75}), ValidationError);
  CHECK_THROWS_AS(region_letter(ga, regions, {0.5, 0.5}), ValidationError);
}

TEST_CASE("refinement guarantees hold for thickened pairs") {
  FiniteSystem s = make_s2();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    FiniteSystem abst = oracle::thicken_system(rng, s);
    EfrrRelation q = identity_relation(s);
    REQUIRE(check_sound_abstraction(s, abst, q).pass);
    /* the constant move must stay enabled under every thickened belief,
     * which only the first input guarantees here */
    RefinementCheck r =
        check_refinement(s, abst, q, constant_controller(abst, 0), 4);
    CHECK(r.pass);
    CHECK(r.first_failure.empty());
  }
}

TEST_CASE("refinement guarantees hold across a coarser output map") {
  FiniteSystem s = make_s2();
  FiniteSystem coarse = make_s2();
  coarse.outputs = SymbolTable();
  coarse.outputs.intern("any");
  coarse.out = {IdSet{0}, IdSet{0}};
  EfrrRelation q = identity_relation(s);
  q.gamma = {{0}, {0}};
  REQUIRE(check_sound_abstraction(s, coarse, q).pass);
  RefinementCheck r =
      check_refinement(s, coarse, q, constant_controller(coarse, 1), 6);
  CHECK(r.pass);
}

TEST_CASE("an output choice outside gamma breaks the projection clause") {
  FiniteSystem s = make_s2();
  SelectionPolicy bad;
  bad.gamma_select = [](const IdSet& s2) { return 1 - s2.front(); };
  RefinementCheck r = check_refinement(s, s, identity_relation(s),
                                       constant_controller(s, 1), 4, bad);
  CHECK_FALSE(r.projections_in_loop);
  CHECK(r.prefix_closed);
  CHECK(r.inputs_enabled);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.first_failure.empty());
}

TEST_CASE("a missing state cover breaks the lifted-path clause") {
  FiniteSystem s = make_s2();
  EfrrRelation q = identity_relation(s);
  q.alpha[1] = {};
  RefinementCheck r =
      check_refinement(s, s, q, constant_controller(s, 0), 4);
  CHECK_FALSE(r.lifted_paths_comply);
  CHECK(r.projections_in_loop);
  CHECK(r.inputs_enabled);
  CHECK(r.prefix_closed);
}

TEST_CASE("a move disabled under the belief breaks the enabledness clause") {
  FiniteSystem s = make_s2();
  MealyController m;
  m.outputs = s.outputs;
  m.inputs = s.inputs;
  m.num_memory = 2;
  m.initial = 0;
  m.step = {{std::make_pair(0, 1), std::make_pair(0, 1)},
            {std::make_pair(1, 1), std::make_pair(1, 1)}};
  RefinementCheck r = check_refinement(s, s, identity_relation(s), m, 4);
  CHECK_FALSE(r.inputs_enabled);
  CHECK(r.prefix_closed);
  CHECK(r.projections_in_loop);
  CHECK(r.lifted_paths_comply);
}

TEST_CASE("finite traces serialize to csv rows") {
  FiniteSystem s = make_s2();
  PredicateMaps pm = make_s2_preds();
  FiniteTrace t;
  t.xs = {0, 1};
  t.us = {0};
  t.ys = {0, 1};
  t.state_letters = {0, 1};
  t.input_letters = {0};
  CHECK(trace_csv(s, pm, t) ==
        "t,x,u,y,state_preds,input_preds\n"
        "0,x0,a,y0,,\n"
        "1,x1,,y1,p,\n");
}

TEST_CASE("continuous traces serialize to csv and svg") {
  ControlSystem cs = line_decay();
  GriddedAbstraction ga = build_abstraction(cs, line_grid(), goal_region());
  ContinuousTrace t;
  t.xs = {{0.75}, {1.5}, {2.5}};
  t.ys = t.xs;
  t.yhats = {0, 1, 2};
  t.us = {1, 1};
  t.letters = {1, 0, 2};
  CHECK(trace_csv(ga, t) ==
        "t,x0,u,y0,yhat,predicates\n"
        "0,0.75,u1,0.75,t0,goal\n"
        "1,1.5,u1,1.5,t1,\n"
        "2,2.5,,2.5,out_of_range,violation\n");

  std::string svg = trace_svg(ga, goal_region(), t);
  CHECK(svg.find("<svg") == 0);
  CHECK(count_sub(svg, "<rect") == 2);  // frame plus the goal box
  CHECK(count_sub(svg, "<circle") == 2);
  CHECK(count_sub(svg, "<polyline") == 1);
  CHECK(svg.find("goal") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("planar traces plot both state dimensions") {
  ControlSystem cs;
  cs.dim = 2;
  cs.inputs = {{-0.5}, {0.5}};
  cs.dist = {0.01, 0.05};
  cs.growth = {{0.0, 1.0}, {0.0, 0.0}};
  cs.field = [](const Vec& x, const Vec& u) { return Vec{x[1], u[0]}; };
  GridSpec g;
  g.theta = Box{{0.0, -1.0}, {2.0, 1.0}};
  g.eta = {0.5, 0.5};
  g.tau = 0.25;
  g.rk_steps = 10;
  g.mode = OutputMode::Tiles;
  g.out_eta = {1.0, 1.0};
  std::vector<LabeledRegion> regions{{"box", {Box{{0.5, -0.5}, {1.0, 0.0}}}}};

  GriddedAbstraction ga = build_abstraction(cs, g, regions);
  MealyController m = constant_controller(ga.sys, 0);
  ContinuousTrace t = simulate_closed_loop(cs, ga, m, regions, 5, 3);
  REQUIRE(t.xs.size() == 6);

  std::string svg = trace_svg(ga, regions, t);
  CHECK(count_sub(svg, "<rect") == 2);
  CHECK(count_sub(svg, "<circle") == 2);
  CHECK(svg.find("box") != std::string::npos);

  std::string csv = trace_csv(ga, t);
  CHECK(csv.rfind("t,x0,x1,u,y0,y1,yhat,predicates\n", 0) == 0);
  CHECK(count_sub(csv, "\n") == 7);
}
