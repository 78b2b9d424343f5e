/* Command-line front end: problem files in, synthesized controllers,
 * abstraction bundles, reports, and traces out. */

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "abocs/continuous.hpp"
#include "abocs/controller_io.hpp"
#include "abocs/efrr.hpp"
#include "abocs/errors.hpp"
#include "abocs/hoa.hpp"
#include "abocs/ltl.hpp"
#include "abocs/ltl_to_uca.hpp"
#include "abocs/oracle/random_instance.hpp"
#include "abocs/oracle/verify.hpp"
#include "abocs/problem.hpp"
#include "abocs/product.hpp"
#include "abocs/refinement.hpp"
#include "abocs/synthesis.hpp"
#include "abocs/system_io.hpp"

namespace fs = std::filesystem;
using namespace abocs;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/* empty or "-" writes to stdout */
void spill(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

Problem load_problem_or_bundle(const std::string& path) {
  if (fs::is_directory(path))
    return load_problem((fs::path(path) / "problem.toml").string());
  return load_problem(path);
}

const PredicateMaps& require_preds(const CompiledModel& cm) {
  if (!cm.model.preds)
    throw ValidationError("the model carries no proposition tables");
  return *cm.model.preds;
}

SelectionPolicy make_policy(const std::string& name) {
  SelectionPolicy pol;
  if (name == "highest") {
    auto last = [](const IdSet& s) { return s[s.size() - 1]; };
    pol.gamma_select = last;
    pol.beta_select = last;
    pol.input_project = last;
  }
  return pol;  // lowest is the built-in default
}

std::string compiled_hoa(const Problem& p, const CompiledModel& cm) {
  const PredicateMaps& pm = require_preds(cm);
  LtlFactory f;
  Uca spec = compile_spec(f, p, pm);
  std::vector<std::uint64_t> bits(spec.num_letters);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = i;
  return hoa_export(spec, letter_aps(pm), bits);
}

int cmd_compile(const std::string& path, const std::string& out, int jobs) {
  Problem p = load_problem_or_bundle(path);
  CompiledModel cm = compile_model(p, jobs);
  spill(out, compiled_hoa(p, cm));
  return 0;
}

int cmd_abstract(const std::string& path, const std::string& outdir,
                 int jobs) {
  Problem p = load_problem(path);
  if (!p.continuous())
    throw ValidationError("abstract needs a [plant] problem");
  CompiledModel cm = compile_model(p, jobs);
  fs::create_directories(outdir);
  spill((fs::path(outdir) / "problem.toml").string(), slurp(path));
  save_system(cm.model, (fs::path(outdir) / "system.txt").string());
  spill((fs::path(outdir) / "abstraction.txt").string(),
        serialize_abstraction(*cm.grid));
  std::cout << "abstraction written to " << outdir << ": "
            << cm.model.sys.num_states() << " states, "
            << cm.model.sys.num_inputs() << " inputs, "
            << cm.model.sys.num_outputs() << " outputs\n";
  return 0;
}

int cmd_synthesize(const std::string& path, std::string out,
                   const std::string& spec_override, int k_flag, int jobs,
                   bool antichain, bool output_anchored) {
  Problem p;
  CompiledModel cm;
  if (fs::is_directory(path)) {
    /* reuse the bundled abstraction instead of re-gridding */
    p = load_problem((fs::path(path) / "problem.toml").string());
    cm.model = load_system((fs::path(path) / "system.txt").string());
  } else {
    p = load_problem(path);
    cm = compile_model(p, jobs);
  }
  if (!spec_override.empty()) {
    p.formula = spec_override;
    p.hoa_path.clear();
  }
  if (antichain) p.synth.antichain = true;
  if (output_anchored) p.product.output_anchored_preds = true;
  if (k_flag >= 0) p.k_max = k_flag;

  const PredicateMaps& pm = require_preds(cm);
  LtlFactory f;
  Uca spec = compile_spec(f, p, pm);
  int cap = p.k_max;
  if (cap < 0) {
    ProductUca prod = build_product(cm.model.sys, pm, spec, p.product);
    cap = default_k_max(prod, cm.model.sys);
  }
  SynthesisResult res =
      synthesize(cm.model.sys, pm, spec, cap, p.synth, p.product);
  if (const auto* un = std::get_if<Unrealizable>(&res)) {
    std::cout << "unrealizable up to k=" << un->k_max << "\n";
    return 1;
  }
  int k = 0;
  for (; k < cap; ++k) {
    SynthesisResult probe =
        synthesize(cm.model.sys, pm, spec, k, p.synth, p.product);
    if (std::holds_alternative<MealyController>(probe)) break;
  }
  if (out.empty()) out = "controller.txt";
  save_controller(std::get<MealyController>(res), out);
  std::cout << "realizable at k=" << k << "; controller written to " << out
            << "\n";
  return 0;
}

int cmd_check_efrr(const std::string& path, const std::string& conc,
                   const std::string& abst, const std::string& relation,
                   bool realization, int samples, unsigned seed, double tau,
                   int jobs) {
  if (!conc.empty() || !abst.empty() || !relation.empty()) {
    if (conc.empty() || abst.empty() || relation.empty())
      throw ValidationError(
          "a finite pair needs all of --conc, --abst and --relation");
    SystemFile a = load_system(conc);
    SystemFile b = load_system(abst);
    EfrrRelation q = parse_relation(slurp(relation));
    if (realization) {
      RealizationReport r = check_sound_realization(a.sys, b.sys, q);
      std::cout << r.render();
      return r.pass ? 0 : 1;
    }
    EfrrReport r = check_sound_abstraction(a.sys, b.sys, q);
    std::cout << r.render();
    return r.pass ? 0 : 1;
  }

  if (path.empty())
    throw ValidationError(
        "pass a [plant] problem or bundle, or a finite pair via "
        "--conc/--abst/--relation");
  Problem p = load_problem_or_bundle(path);
  if (!p.continuous())
    throw ValidationError("the sampling check needs a [plant] problem");
  CompiledModel cm = compile_model(p, jobs);
  if (fs::is_directory(path)) {
    /* the bundle must describe the same abstraction the problem rebuilds */
    if (slurp((fs::path(path) / "system.txt").string()) !=
        serialize_system(cm.model))
      throw ValidationError("bundle system.txt is stale; re-run abstract");
    if (slurp((fs::path(path) / "abstraction.txt").string()) !=
        serialize_abstraction(*cm.grid))
      throw ValidationError("bundle abstraction.txt is stale; re-run abstract");
  }
  const auto& cp = std::get<ContinuousProblem>(p.model);
  SampledReport r = check_sampled(cp.plant, *cm.grid, samples, seed, tau);
  std::cout << r.render();
  return r.pass ? 0 : 1;
}

int cmd_verify(const std::string& suite, int count, std::uint64_t seed0,
               oracle::SizeCaps caps, int depth) {
  using nlohmann::json;
  long long failures = 0;
  auto emit = [&](json j) {
    std::cout << j.dump() << "\n";
  };
  for (int i = 0; i < count; ++i) {
    std::uint64_t sd = seed0 + static_cast<std::uint64_t>(i);
    oracle::RandomInstance inst = oracle::random_instance(sd, caps);
    auto basic = [&](const char* name, const oracle::OracleVerdict& v) {
      json j{{"suite", name},
             {"seed", sd},
             {"spec", inst.spec},
             {"checked", v.checked},
             {"failures", v.failures},
             {"pass", v.pass()}};
      if (!v.first_witness.empty()) j["witness"] = v.first_witness;
      if (!v.pass()) ++failures;
      emit(j);
    };
    if (suite == "admissibility" || suite == "all")
      basic("admissibility",
            oracle::verify_admissibility(inst, caps.lasso_prefix,
                                         caps.lasso_period));
    if (suite == "soundness" || suite == "all")
      basic("soundness", oracle::verify_soundness(inst));
    if (suite == "realizability" || suite == "all")
      basic("realizability",
            oracle::verify_realizability(inst, caps.mealy_cap));
    if (suite == "refined" || suite == "all") {
      oracle::RefinedPairOutcome o = oracle::verify_refined_pair(inst, depth);
      bool pass = !o.realizable || o.check.pass;
      json j{{"suite", "refined"},
             {"seed", sd},
             {"spec", inst.spec},
             {"realizable", o.realizable},
             {"pass", pass}};
      if (o.realizable && !o.check.pass) j["witness"] = o.check.first_failure;
      if (!pass) ++failures;
      emit(j);
    }
  }
  return failures ? 1 : 0;
}

struct SimText {
  std::string csv;
  std::string svg;  // empty unless continuous and requested
};

SimText run_simulation(const std::string& path, const std::string& controller,
                       int steps, std::uint64_t seed,
                       const std::string& policy, bool all_mode,
                       bool want_svg, int jobs) {
  Problem p = load_problem_or_bundle(path);
  CompiledModel cm = compile_model(p, jobs);
  MealyController m = load_controller(controller);
  SimText st;
  if (p.continuous()) {
    const auto& cp = std::get<ContinuousProblem>(p.model);
    ContinuousTrace t = simulate_closed_loop(cp.plant, *cm.grid, m, cp.regions,
                                             steps, seed, make_policy(policy));
    st.csv = trace_csv(*cm.grid, t);
    if (want_svg) st.svg = trace_svg(*cm.grid, cp.regions, t);
    return st;
  }
  if (want_svg)
    throw ValidationError("plots apply to [plant] problems only");
  const PredicateMaps& pm = require_preds(cm);
  Strategy ctrl = induced_strategy(m);
  std::vector<FiniteTrace> traces =
      simulate_closed_loop(cm.model.sys, pm, ctrl, steps,
                           all_mode ? BranchMode::All : BranchMode::Random,
                           seed);
  std::ostringstream o;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (traces.size() > 1) o << "# trace " << i << "\n";
    o << trace_csv(cm.model.sys, pm, traces[i]);
  }
  st.csv = o.str();
  return st;
}

int cmd_simulate(const std::string& path, const std::string& controller,
                 int steps, std::uint64_t seed, const std::string& policy,
                 bool all_mode, const std::string& out,
                 const std::string& plot, int jobs) {
  SimText st = run_simulation(path, controller, steps, seed, policy, all_mode,
                              !plot.empty(), jobs);
  spill(out, st.csv);
  if (!plot.empty()) spill(plot, st.svg);
  return 0;
}

int cmd_export(const std::string& format, const std::string& path,
               const std::string& controller, int steps, std::uint64_t seed,
               const std::string& policy, bool all_mode,
               const std::string& out, int jobs) {
  if (format == "hoa") {
    if (path.empty()) throw ValidationError("hoa export needs a problem");
    return cmd_compile(path, out, jobs);
  }
  if (format == "dot") {
    if (controller.empty())
      throw ValidationError("dot export needs --controller");
    spill(out, controller_dot(load_controller(controller)));
    return 0;
  }
  if (path.empty() || controller.empty())
    throw ValidationError(format + " export needs a problem and --controller");
  SimText st = run_simulation(path, controller, steps, seed, policy, all_mode,
                              format == "svg", jobs);
  spill(out, format == "svg" ? st.svg : st.csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"abstraction-based output-feedback controller synthesis"};
  app.require_subcommand(1);

  std::string c_path, c_out;
  int c_jobs = 1;
  CLI::App* compile =
      app.add_subcommand("compile", "compile a problem's objective to HOA");
  compile->add_option("problem", c_path, "problem file or bundle")->required();
  compile->add_option("-o,--out", c_out, "output path (default stdout)");
  compile->add_option("--jobs", c_jobs, "abstraction worker threads");

  std::string a_path, a_out;
  int a_jobs = 1;
  CLI::App* abst = app.add_subcommand(
      "abstract", "grid a continuous problem into a bundle directory");
  abst->add_option("problem", a_path, "problem file")->required();
  abst->add_option("-o,--out", a_out, "bundle directory")->required();
  abst->add_option("--jobs", a_jobs, "worker threads");

  std::string s_path, s_out, s_spec;
  int s_k = -1, s_jobs = 1;
  bool s_anti = false, s_anchor = false;
  CLI::App* synth = app.add_subcommand(
      "synthesize", "synthesize a controller for a problem or bundle");
  synth->add_option("problem", s_path, "problem file or bundle")->required();
  synth->add_option("-o,--out", s_out,
                    "controller path (default controller.txt)");
  synth->add_option("--spec", s_spec, "override the objective formula");
  synth->add_option("--k-max", s_k, "counter bound cap");
  synth->add_option("--jobs", s_jobs, "abstraction worker threads");
  synth->add_flag("--antichain", s_anti, "solve via the antichain engine");
  synth->add_flag("--output-anchored", s_anchor,
                  "read state propositions through the observed output");

  CLI::App* check = app.add_subcommand("check", "soundness checks");
  check->require_subcommand(1);
  std::string ce_path, ce_conc, ce_abst, ce_rel;
  bool ce_real = false;
  int ce_samples = 10000, ce_jobs = 1;
  unsigned ce_seed = 1;
  double ce_tau = 0;
  CLI::App* cefrr = check->add_subcommand(
      "efrr", "check an abstraction: sampled for grids, exhaustive for pairs");
  cefrr->add_option("problem", ce_path, "continuous problem file or bundle");
  cefrr->add_option("--conc", ce_conc, "concrete finite system");
  cefrr->add_option("--abst", ce_abst, "abstract finite system");
  cefrr->add_option("--relation", ce_rel, "relation tables file");
  cefrr->add_flag("--realization", ce_real,
                  "also require the inverse direction");
  cefrr->add_option("--samples", ce_samples, "sample count");
  cefrr->add_option("--seed", ce_seed, "sampling seed");
  cefrr->add_option("--tau", ce_tau,
                    "override the sampling period (mismatch experiments)");
  cefrr->add_option("--jobs", ce_jobs, "abstraction worker threads");

  std::string v_suite = "all";
  int v_count = 20, v_depth = 6;
  std::uint64_t v_seed = 1;
  oracle::SizeCaps v_caps;
  v_caps.max_states = 4;
  v_caps.mealy_cap = 2;
  CLI::App* verify = app.add_subcommand(
      "verify", "randomized cross-checks against reference algorithms");
  verify->add_option("--suite", v_suite, "suite to run")
      ->check(CLI::IsMember(
          {"admissibility", "soundness", "realizability", "refined", "all"}));
  verify->add_option("--count", v_count, "instances per suite");
  verify->add_option("--seed", v_seed, "first instance seed");
  verify->add_option("--max-states", v_caps.max_states, "plant state cap");
  verify->add_option("--aps", v_caps.num_aps, "state proposition count");
  verify->add_option("--prefix-bound", v_caps.lasso_prefix,
                     "lasso stem bound");
  verify->add_option("--period-bound", v_caps.lasso_period,
                     "lasso period bound");
  verify->add_option("--mealy-cap", v_caps.mealy_cap,
                     "brute-force memory cap");
  verify->add_option("--depth", v_depth, "refined-loop check depth");

  std::string m_path, m_ctrl, m_policy = "lowest", m_out, m_plot;
  int m_steps = 50, m_jobs = 1;
  std::uint64_t m_seed = 0;
  bool m_all = false;
  CLI::App* sim = app.add_subcommand(
      "simulate", "run the closed loop and emit a CSV trace");
  sim->add_option("problem", m_path, "problem file or bundle")->required();
  sim->add_option("--controller", m_ctrl, "controller file")->required();
  sim->add_option("--steps", m_steps, "control periods");
  sim->add_option("--seed", m_seed, "branch and disturbance seed");
  sim->add_option("--policy", m_policy, "tie-break policy")
      ->check(CLI::IsMember({"lowest", "highest"}));
  sim->add_flag("--all", m_all,
                "enumerate every finite-plant resolution instead of sampling");
  sim->add_option("-o,--out", m_out, "CSV path (default stdout)");
  sim->add_option("--plot", m_plot, "also write an SVG picture here");
  sim->add_option("--jobs", m_jobs, "abstraction worker threads");

  std::string e_format, e_path, e_ctrl, e_policy = "lowest", e_out;
  int e_steps = 50, e_jobs = 1;
  std::uint64_t e_seed = 0;
  bool e_all = false;
  CLI::App* exp = app.add_subcommand("export", "write an artifact in a "
                                               "chosen format");
  exp->add_option("--format", e_format, "hoa, dot, csv or svg")
      ->required()
      ->check(CLI::IsMember({"hoa", "dot", "csv", "svg"}));
  exp->add_option("problem", e_path, "problem file or bundle");
  exp->add_option("--controller", e_ctrl, "controller file");
  exp->add_option("--steps", e_steps, "control periods");
  exp->add_option("--seed", e_seed, "branch and disturbance seed");
  exp->add_option("--policy", e_policy, "tie-break policy")
      ->check(CLI::IsMember({"lowest", "highest"}));
  exp->add_flag("--all", e_all, "enumerate finite-plant resolutions");
  exp->add_option("-o,--out", e_out, "output path (default stdout)");
  exp->add_option("--jobs", e_jobs, "abstraction worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (compile->parsed()) return cmd_compile(c_path, c_out, c_jobs);
    if (abst->parsed()) return cmd_abstract(a_path, a_out, a_jobs);
    if (synth->parsed())
      return cmd_synthesize(s_path, s_out, s_spec, s_k, s_jobs, s_anti,
                            s_anchor);
    if (cefrr->parsed())
      return cmd_check_efrr(ce_path, ce_conc, ce_abst, ce_rel, ce_real,
                            ce_samples, ce_seed, ce_tau, ce_jobs);
    if (verify->parsed())
      return cmd_verify(v_suite, v_count, v_seed, v_caps, v_depth);
    if (sim->parsed())
      return cmd_simulate(m_path, m_ctrl, m_steps, m_seed, m_policy, m_all,
                          m_out, m_plot, m_jobs);
    if (exp->parsed())
      return cmd_export(e_format, e_path, e_ctrl, e_steps, e_seed, e_policy,
                        e_all, e_out, e_jobs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
