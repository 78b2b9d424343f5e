#include "abocs/problem.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "abocs/errors.hpp"
#include "abocs/hoa.hpp"
#include "abocs/ltl_to_uca.hpp"

namespace abocs {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve(const std::string& base_dir, const std::string& rel) {
  std::filesystem::path p(rel);
  if (p.is_absolute() || base_dir.empty()) return rel;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

/* `key = value` rows; a value is a number, "string", boolean, or a
 * bracketed comma-separated list of values, all on one line. */
struct Value {
  enum Kind { Num, Str, Bool, Arr };
  Kind kind = Num;
  double num = 0;
  bool truth = false;
  std::string str;
  std::vector<Value> arr;
  int line = 0;
};

void skip_ws(const std::string& s, size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

Value parse_value(const std::string& s, size_t& i, int line) {
  skip_ws(s, i);
  if (i >= s.size()) throw ParseError("missing value", line);
  Value v;
  v.line = line;
  if (s[i] == '[') {
    v.kind = Value::Arr;
    ++i;
    skip_ws(s, i);
    if (i < s.size() && s[i] == ']') {
      ++i;
      return v;
    }
    while (true) {
      v.arr.push_back(parse_value(s, i, line));
      skip_ws(s, i);
      if (i >= s.size()) throw ParseError("unterminated list", line);
      if (s[i] == ',') {
        ++i;
        continue;
      }
      if (s[i] == ']') {
        ++i;
        return v;
      }
      throw ParseError("expected ',' or ']' in list", line);
    }
  }
  if (s[i] == '"') {
    v.kind = Value::Str;
    auto end = s.find('"', i + 1);
    if (end == std::string::npos) throw ParseError("unterminated string", line);
    v.str = s.substr(i + 1, end - i - 1);
    i = end + 1;
    return v;
  }
  size_t j = i;
  while (j < s.size() && s[j] != ',' && s[j] != ']' && s[j] != ' ' &&
         s[j] != '\t')
    ++j;
  std::string tok = s.substr(i, j - i);
  i = j;
  if (tok == "true" || tok == "false") {
    v.kind = Value::Bool;
    v.truth = tok == "true";
    return v;
  }
  char* endp = nullptr;
  v.num = std::strtod(tok.c_str(), &endp);
  if (endp == tok.c_str() || *endp != '\0')
    throw ParseError("bad value '" + tok + "'", line);
  return v;
}

struct Keys {
  std::string section;
  std::map<std::string, Value> kv;
  std::set<std::string> taken;

  static Keys of(const std::string& name, const std::vector<TextLine>& lines) {
    Keys k;
    k.section = name;
    for (const auto& ln : lines) {
      auto eq = ln.text.find('=');
      if (eq == std::string::npos)
        throw ParseError("expected key = value in [" + name + "]", ln.no);
      std::string key = trim(ln.text.substr(0, eq));
      if (key.empty()) throw ParseError("missing key", ln.no);
      if (k.kv.count(key))
        throw ParseError("duplicate key " + key + " in [" + name + "]", ln.no);
      size_t i = eq + 1;
      Value v = parse_value(ln.text, i, ln.no);
      skip_ws(ln.text, i);
      if (i != ln.text.size())
        throw ParseError("trailing text after value of " + key, ln.no);
      k.kv.emplace(key, std::move(v));
    }
    return k;
  }

  const Value* find(const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    taken.insert(key);
    return &it->second;
  }
  const Value& need(const std::string& key) {
    const Value* v = find(key);
    if (!v) throw ValidationError("[" + section + "] needs " + key);
    return *v;
  }
  void done() const {
    for (const auto& [key, v] : kv)
      if (!taken.count(key))
        throw ParseError("unknown key " + key + " in [" + section + "]",
                         v.line);
  }
};

double as_num(const Value& v, const std::string& what) {
  if (v.kind != Value::Num)
    throw ValidationError(what + " must be a number");
  return v.num;
}

int as_int(const Value& v, const std::string& what) {
  double d = as_num(v, what);
  int i = static_cast<int>(std::llround(d));
  if (std::abs(d - i) > 1e-9)
    throw ValidationError(what + " must be an integer");
  return i;
}

std::string as_str(const Value& v, const std::string& what) {
  if (v.kind != Value::Str)
    throw ValidationError(what + " must be a quoted string");
  return v.str;
}

bool as_bool(const Value& v, const std::string& what) {
  if (v.kind != Value::Bool)
    throw ValidationError(what + " must be true or false");
  return v.truth;
}

Vec as_vec(const Value& v, const std::string& what) {
  if (v.kind != Value::Arr)
    throw ValidationError(what + " must be a list of numbers");
  Vec r;
  for (const auto& e : v.arr) r.push_back(as_num(e, what + " entry"));
  return r;
}

std::vector<Vec> as_mat(const Value& v, const std::string& what) {
  if (v.kind != Value::Arr)
    throw ValidationError(what + " must be a list of rows");
  std::vector<Vec> m;
  for (const auto& e : v.arr) m.push_back(as_vec(e, what + " row"));
  return m;
}

Box as_box(const Value& v, const std::string& what) {
  auto m = as_mat(v, what);
  if (m.size() != 2 || m[0].size() != m[1].size() || m[0].empty())
    throw ValidationError(what + " must be [[lo...], [hi...]]");
  return Box{m[0], m[1]};
}

std::vector<Box> as_boxes(const Value& v, const std::string& what) {
  if (v.kind != Value::Arr)
    throw ValidationError(what + " must be a list of boxes");
  std::vector<Box> r;
  for (const auto& e : v.arr) r.push_back(as_box(e, what + " entry"));
  return r;
}

ControlSystem parse_plant(Keys& k) {
  ControlSystem cs;
  cs.dim = as_int(k.need("dim"), "dim");
  if (cs.dim <= 0) throw ValidationError("dim must be positive");
  auto a = as_mat(k.need("a"), "a");
  auto b = as_mat(k.need("b"), "b");
  auto inputs = as_mat(k.need("inputs"), "inputs");
  cs.dist = as_vec(k.need("dist"), "dist");
  const Value* initv = k.find("init");
  const Value* growv = k.find("growth");

  size_t n = static_cast<size_t>(cs.dim);
  if (a.size() != n)
    throw ValidationError("a must have dim rows");
  for (const auto& row : a)
    if (row.size() != n) throw ValidationError("a must be dim by dim");
  if (b.size() != n)
    throw ValidationError("b must have dim rows");
  size_t m = b.empty() ? 0 : b[0].size();
  for (const auto& row : b)
    if (row.size() != m) throw ValidationError("b rows differ in length");
  if (m == 0) throw ValidationError("b must have at least one column");
  if (inputs.empty()) throw ValidationError("inputs must list input vectors");
  for (const auto& u : inputs)
    if (u.size() != m)
      throw ValidationError("inputs entries must match b's column count");
  if (cs.dist.size() != n)
    throw ValidationError("dist must have dim entries");

  cs.inputs = std::move(inputs);
  if (initv) {
    Box ib = as_box(*initv, "init");
    if (ib.dim() != cs.dim)
      throw ValidationError("init must have dim coordinates");
    cs.init = ib;
  }
  if (growv) {
    auto g = as_mat(*growv, "growth");
    if (g.size() != n)
      throw ValidationError("growth must be dim by dim");
    for (const auto& row : g)
      if (row.size() != n)
        throw ValidationError("growth must be dim by dim");
    cs.growth = std::move(g);
  } else {
    cs.growth.assign(n, Vec(n, 0.0));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) cs.growth[i][j] = std::abs(a[i][j]);
  }
  cs.field = [a, b](const Vec& x, const Vec& u) {
    Vec r(a.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
      for (size_t j = 0; j < a.size(); ++j) r[i] += a[i][j] * x[j];
      for (size_t j = 0; j < b[i].size(); ++j) r[i] += b[i][j] * u[j];
    }
    return r;
  };
  return cs;
}

GridSpec parse_grid(Keys& k, int dim) {
  GridSpec g;
  g.theta = as_box(k.need("theta"), "theta");
  g.eta = as_vec(k.need("eta"), "eta");
  g.tau = as_num(k.need("tau"), "tau");
  if (const Value* v = k.find("rk_steps")) g.rk_steps = as_int(*v, "rk_steps");
  if (const Value* v = k.find("mode")) {
    std::string s = as_str(*v, "mode");
    if (s == "tiles")
      g.mode = OutputMode::Tiles;
    else if (s == "noisy")
      g.mode = OutputMode::Noisy;
    else
      throw ValidationError("mode must be \"tiles\" or \"noisy\"");
  }
  if (const Value* v = k.find("out_eta")) g.out_eta = as_vec(*v, "out_eta");
  if (const Value* v = k.find("eps")) g.eps = as_num(*v, "eps");
  if (g.mode == OutputMode::Tiles && g.out_eta.empty()) g.out_eta = g.eta;
  g.validate(dim);
  return g;
}

int to_id(const std::string& tok, int no) {
  char* e = nullptr;
  long v = std::strtol(tok.c_str(), &e, 10);
  if (e == tok.c_str() || *e != '\0' || v < 0)
    throw ParseError("bad id '" + tok + "'", no);
  return static_cast<int>(v);
}

std::vector<IdSet> id_table(const std::vector<TextLine>& lines) {
  std::vector<IdSet> t;
  std::vector<bool> seen;
  for (const auto& ln : lines) {
    std::vector<std::string> lhs, rhs;
    split_arrow(ln.text, ln.no, lhs, rhs);
    if (lhs.size() != 1)
      throw ParseError("expected one id left of ->", ln.no);
    int i = to_id(lhs[0], ln.no);
    if (i >= static_cast<int>(t.size())) {
      t.resize(i + 1);
      seen.resize(i + 1, false);
    }
    if (seen[i]) throw ParseError("duplicate row " + lhs[0], ln.no);
    seen[i] = true;
    IdSet s;
    for (const auto& tok : rhs) s.insert(to_id(tok, ln.no));
    t[i] = std::move(s);
  }
  return t;
}

}  // namespace

Problem parse_problem(const std::string& text, const std::string& base_dir) {
  auto sec = read_sections(text);
  for (const auto& [name, lines] : sec) {
    (void)lines;
    bool known = name == "system" || name == "plant" || name == "grid" ||
                 name == "spec" || name == "synthesis" ||
                 (name.rfind("region.", 0) == 0 && name.size() > 7);
    if (!known) throw ValidationError("unknown section [" + name + "]");
  }

  bool has_system = sec.count("system") != 0;
  bool has_plant = sec.count("plant") != 0;
  if (has_system == has_plant)
    throw ValidationError(
        "a problem needs exactly one of [system] and [plant]");

  Problem p;
  if (has_system) {
    if (sec.count("grid"))
      throw ValidationError("[grid] only applies to a [plant] model");
    for (const auto& [name, lines] : sec) {
      (void)lines;
      if (name.rfind("region.", 0) == 0)
        throw ValidationError("[" + name + "] only applies to a [plant] model");
    }
    Keys k = Keys::of("system", sec.at("system"));
    std::string file = as_str(k.need("file"), "file");
    k.done();
    FiniteProblem fp;
    fp.model = load_system(resolve(base_dir, file));
    p.model = std::move(fp);
  } else {
    ContinuousProblem cp;
    {
      Keys k = Keys::of("plant", sec.at("plant"));
      cp.plant = parse_plant(k);
      k.done();
    }
    if (!sec.count("grid"))
      throw ValidationError("a [plant] model needs a [grid]");
    {
      Keys k = Keys::of("grid", sec.at("grid"));
      cp.grid = parse_grid(k, cp.plant.dim);
      k.done();
    }
    for (const auto& [name, lines] : sec) {
      if (name.rfind("region.", 0) != 0) continue;
      std::string label = name.substr(7);
      if (label == "violation")
        throw ValidationError("region label violation is reserved");
      Keys k = Keys::of(name, lines);
      auto boxes = as_boxes(k.need("boxes"), "boxes");
      k.done();
      for (const auto& b : boxes)
        if (b.dim() != cp.plant.dim)
          throw ValidationError("[" + name + "] boxes must have dim " +
                                std::to_string(cp.plant.dim));
      cp.regions.push_back({label, std::move(boxes)});
    }
    cp.plant.validate();
    p.model = std::move(cp);
  }

  if (!sec.count("spec")) throw ValidationError("a problem needs a [spec]");
  {
    Keys k = Keys::of("spec", sec.at("spec"));
    const Value* f = k.find("formula");
    const Value* h = k.find("hoa");
    k.done();
    if (!!f == !!h)
      throw ValidationError("[spec] needs exactly one of formula and hoa");
    if (f)
      p.formula = as_str(*f, "formula");
    else
      p.hoa_path = resolve(base_dir, as_str(*h, "hoa"));
  }

  if (sec.count("synthesis")) {
    Keys k = Keys::of("synthesis", sec.at("synthesis"));
    if (const Value* v = k.find("k_max")) p.k_max = as_int(*v, "k_max");
    if (const Value* v = k.find("antichain"))
      p.synth.antichain = as_bool(*v, "antichain");
    if (const Value* v = k.find("output_anchored"))
      p.product.output_anchored_preds = as_bool(*v, "output_anchored");
    k.done();
  }
  return p;
}

Problem load_problem(const std::string& path) {
  std::string text = read_file(path);
  std::string base = std::filesystem::path(path).parent_path().string();
  return parse_problem(text, base);
}

CompiledModel compile_model(const Problem& p, int jobs) {
  if (const auto* fp = std::get_if<FiniteProblem>(&p.model))
    return {fp->model, std::nullopt};
  const auto& cp = std::get<ContinuousProblem>(p.model);
  GriddedAbstraction ga =
      build_abstraction(cp.plant, cp.grid, cp.regions, jobs);
  CompiledModel cm;
  cm.model = {ga.sys, ga.preds};
  cm.grid = std::move(ga);
  return cm;
}

std::string effective_formula(const Problem& p) {
  if (!p.continuous() || p.formula.empty()) return p.formula;
  if (p.formula.find("violation") != std::string::npos) return p.formula;
  return "(" + p.formula + ") & G !violation";
}

std::vector<std::string> letter_aps(const PredicateMaps& pm) {
  std::vector<std::string> v = pm.ap_out.names();
  for (const auto& n : pm.ap_in.names()) v.push_back(n);
  return v;
}

Uca compile_spec(LtlFactory& f, const Problem& p, const PredicateMaps& pm) {
  PredAlphabet ab{pm.ap_in, pm.ap_out};
  if (!p.hoa_path.empty()) {
    // a co-Buchi file carries the objective itself; a Buchi file is read as
    // the complement's acceptor and dualized
    std::string text = read_file(p.hoa_path);
    HoaAutomaton ha;
    try {
      ha = hoa_import(text, false);
    } catch (const UnsupportedAcceptanceError&) {
      ha = hoa_import(text, true);
    }
    auto want = letter_aps(pm);
    if (ha.aps != want) {
      auto join = [](const std::vector<std::string>& xs) {
        std::string s;
        for (const auto& x : xs) s += (s.empty() ? "" : " ") + x;
        return s;
      };
      throw ValidationError("automaton propositions [" + join(ha.aps) +
                            "] do not match the model's [" + join(want) + "]");
    }
    return ha.uca;
  }
  std::string text = effective_formula(p);
  if (text.empty()) throw ValidationError("problem has no objective");
  return ltl_to_uca(f, parse_ltl(f, text, pm.ap_in, pm.ap_out), ab);
}

std::string serialize_abstraction(const GriddedAbstraction& ga) {
  std::ostringstream o;
  o << std::setprecision(17);
  auto vec = [&](const Vec& v) {
    o << "[";
    for (size_t i = 0; i < v.size(); ++i) o << (i ? ", " : "") << v[i];
    o << "]";
  };
  auto box = [&](const Box& b) {
    o << "[";
    vec(b.lo);
    o << ", ";
    vec(b.hi);
    o << "]";
  };

  o << "[grid]\ntheta = ";
  box(ga.grid.theta);
  o << "\neta = ";
  vec(ga.grid.eta);
  o << "\ntau = " << ga.grid.tau << "\nrk_steps = " << ga.grid.rk_steps
    << "\nmode = \""
    << (ga.grid.mode == OutputMode::Tiles ? "tiles" : "noisy") << "\"\n";
  if (ga.grid.mode == OutputMode::Tiles) {
    o << "out_eta = ";
    vec(ga.grid.out_eta);
    o << "\n";
  } else {
    o << "eps = " << ga.grid.eps << "\n";
  }

  o << "\n[inputs]\n";
  for (size_t u = 0; u < ga.input_reps.size(); ++u) {
    o << ga.sys.inputs.name(static_cast<int>(u)) << " -> ";
    vec(ga.input_reps[u]);
    o << "\n";
  }

  o << "\n[cells]\n";
  for (size_t s = 0; s < ga.cell_box.size(); ++s) {
    o << ga.sys.states.name(static_cast<int>(s)) << " -> ";
    box(ga.cell_box[s]);
    o << "\n";
  }

  o << "\n[escape]\nlow = " << ga.sys.states.name(ga.low_id)
    << "\nhigh = " << ga.sys.states.name(ga.high_id) << "\n";

  if (ga.grid.mode == OutputMode::Tiles) {
    o << "\n[tiles]\n";
    for (size_t t = 0; t < ga.tile_box.size(); ++t) {
      o << ga.sys.outputs.name(static_cast<int>(t)) << " -> ";
      box(ga.tile_box[t]);
      o << "\n";
    }
    o << "\n[outputs]\nout_of_range = " << ga.sys.outputs.name(ga.out_of_range)
      << "\n";
  }
  return o.str();
}

EfrrRelation parse_relation(const std::string& text) {
  auto sec = read_sections(text);
  for (const char* req : {"alpha", "beta", "gamma"})
    if (!sec.count(req))
      throw ParseError(std::string("missing section [") + req + "]");
  for (const auto& [name, lines] : sec) {
    (void)lines;
    if (name != "alpha" && name != "beta" && name != "gamma")
      throw ValidationError("unknown section [" + name + "]");
  }
  EfrrRelation q;
  q.alpha = id_table(sec.at("alpha"));
  q.beta = id_table(sec.at("beta"));
  q.gamma = id_table(sec.at("gamma"));
  return q;
}

std::string serialize_relation(const EfrrRelation& q) {
  std::ostringstream o;
  auto table = [&](const char* name, const std::vector<IdSet>& t) {
    o << "[" << name << "]\n";
    for (size_t i = 0; i < t.size(); ++i) {
      o << i << " ->";
      for (int x : t[i]) o << " " << x;
      o << "\n";
    }
  };
  table("alpha", q.alpha);
  o << "\n";
  table("beta", q.beta);
  o << "\n";
  table("gamma", q.gamma);
  return o.str();
}

}  // namespace abocs
