#include "abocs/controller_io.hpp"

#include <fstream>
#include <sstream>

#include "abocs/system_io.hpp"

namespace abocs {

MealyController parse_controller(const std::string& text) {
  auto sec = read_sections(text);
  for (const char* req : {"outputs", "inputs", "memory", "initial", "step"})
    if (!sec.count(req))
      throw ParseError(std::string("missing section [") + req + "]");

  MealyController m;
  for (const auto& n : section_symbols(sec, "outputs")) m.outputs.intern(n);
  for (const auto& n : section_symbols(sec, "inputs")) m.inputs.intern(n);

  SymbolTable mem;
  for (const auto& n : section_symbols(sec, "memory")) mem.intern(n);
  m.num_memory = mem.size();

  auto init = section_symbols(sec, "initial");
  if (init.size() != 1)
    throw ParseError("section [initial] needs exactly one memory state");
  m.initial = mem.require(init[0]);

  m.step.assign(m.num_memory,
                std::vector<std::optional<std::pair<int, int>>>(
                    m.outputs.size()));
  for (const TextLine& l : sec["step"]) {
    std::vector<std::string> lhs, rhs;
    split_arrow(l.text, l.no, lhs, rhs);
    if (lhs.size() != 2 || rhs.size() != 2)
      throw ParseError("step row needs 'z y -> u z2'", l.no);
    int z = mem.require(lhs[0]);
    int y = m.outputs.require(lhs[1]);
    if (m.step[z][y]) throw ParseError("duplicate step row", l.no);
    m.step[z][y] = std::make_pair(m.inputs.require(rhs[0]),
                                  mem.require(rhs[1]));
  }
  m.validate();
  return m;
}

std::string serialize_controller(const MealyController& m) {
  auto zname = [](int z) { return "m" + std::to_string(z); };
  std::ostringstream o;
  auto words = [&o](const std::vector<std::string>& ns) {
    for (std::size_t i = 0; i < ns.size(); ++i)
      o << (i ? " " : "") << ns[i];
    o << "\n";
  };
  o << "[outputs]\n";
  words(m.outputs.names());
  o << "[inputs]\n";
  words(m.inputs.names());
  o << "[memory]\n";
  {
    std::vector<std::string> ns;
    for (int z = 0; z < m.num_memory; ++z) ns.push_back(zname(z));
    words(ns);
  }
  o << "[initial]\n" << zname(m.initial) << "\n";
  o << "[step]\n";
  for (int z = 0; z < m.num_memory; ++z)
    for (int y = 0; y < m.outputs.size(); ++y) {
      if (!m.step[z][y]) continue;
      auto [u, z2] = *m.step[z][y];
      o << zname(z) << " " << m.outputs.name(y) << " -> "
        << m.inputs.name(u) << " " << zname(z2) << "\n";
    }
  return o.str();
}

std::string controller_dot(const MealyController& m) {
  std::ostringstream o;
  o << "digraph controller {\n  rankdir=LR;\n  node [shape=circle];\n";
  o << "  entry [shape=point, label=\"\"];\n";
  o << "  entry -> m" << m.initial << ";\n";
  for (int z = 0; z < m.num_memory; ++z)
    for (int y = 0; y < m.outputs.size(); ++y) {
      if (!m.step[z][y]) continue;
      auto [u, z2] = *m.step[z][y];
      o << "  m" << z << " -> m" << z2 << " [label=\"" << m.outputs.name(y)
        << "/" << m.inputs.name(u) << "\"];\n";
    }
  o << "}\n";
  return o.str();
}

MealyController load_controller(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_controller(ss.str());
}

void save_controller(const MealyController& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out << serialize_controller(m);
}

}  // namespace abocs
