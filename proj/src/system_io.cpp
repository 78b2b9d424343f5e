#include "abocs/system_io.hpp"

#include <fstream>
#include <sstream>

#include "abocs/text.hpp"

namespace abocs {

std::string format_letter(const SymbolTable& aps, PredMask m) {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < aps.size(); ++i) {
    if (!(m & (PredMask(1) << i))) continue;
    if (!first) s += ",";
    s += aps.name(i);
    first = false;
  }
  s += "}";
  return s;
}

PredMask parse_letter(const SymbolTable& aps, const std::string& tok,
                      int line) {
  if (tok.size() < 2 || tok.front() != '{' || tok.back() != '}')
    throw ParseError("expected predicate letter {..}, got '" + tok + "'",
                     line);
  PredMask m = 0;
  std::string body = tok.substr(1, tok.size() - 2);
  for (const std::string& ap : split(body, ',')) {
    if (ap.empty()) continue;
    int id = aps.lookup(ap);
    if (id < 0) throw ParseError("unknown atomic proposition '" + ap + "'",
                                 line);
    m |= PredMask(1) << id;
  }
  return m;
}

/* section name -> lines in order */
std::map<std::string, std::vector<TextLine>> read_sections(
    const std::string& text) {
  std::map<std::string, std::vector<TextLine>> sec;
  std::string cur;
  int no = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++no;
    std::string l = strip_comment(raw);
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') throw ParseError("malformed section header", no);
      cur = l.substr(1, l.size() - 2);
      if (sec.count(cur)) throw ParseError("duplicate section " + l, no);
      sec[cur];
      continue;
    }
    if (cur.empty()) throw ParseError("content before first section", no);
    sec[cur].push_back({l, no});
  }
  return sec;
}

std::vector<std::string> section_symbols(
    const std::map<std::string, std::vector<TextLine>>& sec,
    const std::string& name) {
  std::vector<std::string> res;
  auto it = sec.find(name);
  if (it == sec.end()) return res;
  for (const TextLine& l : it->second)
    for (const std::string& t : split_ws(l.text)) res.push_back(t);
  return res;
}

void split_arrow(const std::string& l, int no, std::vector<std::string>& lhs,
                 std::vector<std::string>& rhs) {
  auto pos = l.find("->");
  if (pos == std::string::npos)
    throw ParseError("expected '->' in mapping row", no);
  lhs = split_ws(l.substr(0, pos));
  rhs = split_ws(l.substr(pos + 2));
}

SystemFile parse_system(const std::string& text) {
  auto sec = read_sections(text);
  for (const char* req : {"states", "initial", "inputs", "outputs", "trans",
                          "out"})
    if (!sec.count(req))
      throw ParseError(std::string("missing section [") + req + "]");

  SystemFile sf;
  FiniteSystem& s = sf.sys;
  for (const auto& n : section_symbols(sec, "states")) s.states.intern(n);
  for (const auto& n : section_symbols(sec, "inputs")) s.inputs.intern(n);
  for (const auto& n : section_symbols(sec, "outputs")) s.outputs.intern(n);
  for (const auto& n : section_symbols(sec, "initial"))
    s.initial.insert(s.states.require(n));

  s.trans.assign(s.num_states(),
                 std::vector<IdSet>(s.num_inputs(), IdSet{}));
  for (const TextLine& l : sec["trans"]) {
    std::vector<std::string> lhs, rhs;
    split_arrow(l.text, l.no, lhs, rhs);
    if (lhs.size() != 2)
      throw ParseError("transition row needs 'state input -> ...'", l.no);
    int x = s.states.require(lhs[0]);
    int u = s.inputs.require(lhs[1]);
    for (const auto& n : rhs) s.trans[x][u].insert(s.states.require(n));
  }

  s.out.assign(s.num_states(), IdSet{});
  for (const TextLine& l : sec["out"]) {
    std::vector<std::string> lhs, rhs;
    split_arrow(l.text, l.no, lhs, rhs);
    if (lhs.size() != 1)
      throw ParseError("output row needs 'state -> outputs'", l.no);
    int x = s.states.require(lhs[0]);
    for (const auto& n : rhs) s.out[x].insert(s.outputs.require(n));
  }
  s.validate();

  bool has_preds = sec.count("preds.state") || sec.count("preds.input") ||
                   sec.count("aps.in") || sec.count("aps.out");
  if (has_preds) {
    PredicateMaps pm;
    for (const auto& n : section_symbols(sec, "aps.in")) pm.ap_in.intern(n);
    for (const auto& n : section_symbols(sec, "aps.out")) pm.ap_out.intern(n);
    // letters may mention propositions that were not declared up front
    auto scan_aps = [&](const char* name, SymbolTable& t) {
      if (!sec.count(name)) return;
      for (const TextLine& l : sec[name]) {
        std::vector<std::string> lhs, rhs;
        split_arrow(l.text, l.no, lhs, rhs);
        for (const auto& tok : rhs) {
          if (tok.size() < 2 || tok.front() != '{') continue;
          for (const auto& ap : split(tok.substr(1, tok.size() - 2), ','))
            if (!ap.empty()) t.intern(ap);
        }
      }
    };
    scan_aps("preds.state", pm.ap_out);
    scan_aps("preds.input", pm.ap_in);
    if (pm.ap_out.size() > 31 || pm.ap_in.size() > 31)
      throw ParseError("too many atomic propositions (max 31 per side)");

    pm.state_preds.assign(s.num_states(), {0});
    pm.input_preds.assign(s.num_inputs(), {0});
    if (sec.count("preds.state"))
      for (const TextLine& l : sec["preds.state"]) {
        std::vector<std::string> lhs, rhs;
        split_arrow(l.text, l.no, lhs, rhs);
        if (lhs.size() != 1)
          throw ParseError("predicate row needs 'state -> letters'", l.no);
        int x = s.states.require(lhs[0]);
        std::vector<PredMask> ls;
        for (const auto& tok : rhs)
          ls.push_back(parse_letter(pm.ap_out, tok, l.no));
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        if (ls.empty()) throw ParseError("empty predicate row", l.no);
        pm.state_preds[x] = std::move(ls);
      }
    if (sec.count("preds.input"))
      for (const TextLine& l : sec["preds.input"]) {
        std::vector<std::string> lhs, rhs;
        split_arrow(l.text, l.no, lhs, rhs);
        if (lhs.size() != 1)
          throw ParseError("predicate row needs 'input -> letters'", l.no);
        int u = s.inputs.require(lhs[0]);
        std::vector<PredMask> ls;
        for (const auto& tok : rhs)
          ls.push_back(parse_letter(pm.ap_in, tok, l.no));
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        if (ls.empty()) throw ParseError("empty predicate row", l.no);
        pm.input_preds[u] = std::move(ls);
      }
    pm.validate(s);
    sf.preds = std::move(pm);
  }
  return sf;
}

std::string serialize_system(const SystemFile& sf) {
  const FiniteSystem& s = sf.sys;
  std::ostringstream o;
  auto words = [&o](const std::vector<std::string>& ns) {
    for (std::size_t i = 0; i < ns.size(); ++i)
      o << (i ? " " : "") << ns[i];
    o << "\n";
  };
  o << "[states]\n";
  words(s.states.names());
  o << "[initial]\n";
  {
    std::vector<std::string> ns;
    for (int x : s.initial) ns.push_back(s.states.name(x));
    words(ns);
  }
  o << "[inputs]\n";
  words(s.inputs.names());
  o << "[outputs]\n";
  words(s.outputs.names());
  o << "[trans]\n";
  for (int x = 0; x < s.num_states(); ++x)
    for (int u = 0; u < s.num_inputs(); ++u) {
      if (s.trans[x][u].empty()) continue;
      o << s.states.name(x) << " " << s.inputs.name(u) << " ->";
      for (int x2 : s.trans[x][u]) o << " " << s.states.name(x2);
      o << "\n";
    }
  o << "[out]\n";
  for (int x = 0; x < s.num_states(); ++x) {
    o << s.states.name(x) << " ->";
    for (int y : s.out[x]) o << " " << s.outputs.name(y);
    o << "\n";
  }
  if (sf.preds) {
    const PredicateMaps& pm = *sf.preds;
    o << "[aps.in]\n";
    words(pm.ap_in.names());
    o << "[aps.out]\n";
    words(pm.ap_out.names());
    o << "[preds.state]\n";
    for (int x = 0; x < s.num_states(); ++x) {
      o << s.states.name(x) << " ->";
      for (PredMask m : pm.state_preds[x]) o << " " << format_letter(pm.ap_out, m);
      o << "\n";
    }
    o << "[preds.input]\n";
    for (int u = 0; u < s.num_inputs(); ++u) {
      o << s.inputs.name(u) << " ->";
      for (PredMask m : pm.input_preds[u]) o << " " << format_letter(pm.ap_in, m);
      o << "\n";
    }
  }
  return o.str();
}

SystemFile load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

void save_system(const SystemFile& sf, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw Error("cannot write " + path);
  outf << serialize_system(sf);
}

}  // namespace abocs
