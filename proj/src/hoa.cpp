#include "abocs/hoa.hpp"

#include <cctype>
#include <sstream>

#include "abocs/text.hpp"

namespace abocs {

std::string hoa_export(const Uca& a, const std::vector<std::string>& aps,
                       const std::vector<std::uint64_t>& letter_bits) {
  if (static_cast<int>(letter_bits.size()) != a.num_letters)
    throw ValidationError("letter valuation table size mismatch");
  std::ostringstream o;
  o << "HOA: v1\n";
  o << "States: " << a.num_states << "\n";
  for (int q : a.initial) o << "Start: " << q << "\n";
  o << "AP: " << aps.size();
  for (const auto& ap : aps) o << " \"" << ap << "\"";
  o << "\n";
  o << "acc-name: co-Buchi\n";
  o << "Acceptance: 1 Fin(0)\n";
  o << "--BODY--\n";
  for (int q = 0; q < a.num_states; ++q) {
    o << "State: " << q;
    if (a.rejecting.contains(q)) o << " {0}";
    o << "\n";
    for (int l = 0; l < a.num_letters; ++l) {
      const IdSet& succ = a.delta[q][l];
      if (succ.empty()) continue;
      o << "[";
      if (aps.empty()) {
        o << "t";
      } else {
        for (std::size_t i = 0; i < aps.size(); ++i) {
          if (i) o << "&";
          if (!((letter_bits[l] >> i) & 1)) o << "!";
          o << i;
        }
      }
      o << "] ";
      bool first = true;
      for (int q2 : succ) {
        if (!first) o << "&";
        o << q2;
        first = false;
      }
      o << "\n";
    }
  }
  o << "--END--\n";
  return o.str();
}

namespace {

/* label formulas over AP indices: t, f, !, &, |, parentheses */
struct LabelParser {
  const std::string& s;
  std::size_t i = 0;
  int num_aps;

  void skip() {
    while (i < s.size() && s[i] == ' ') ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  /* evaluate for one valuation */
  bool disj(std::uint64_t val) {
    bool r = conj(val);
    while (eat('|')) r = conj(val) || r;
    return r;
  }
  bool conj(std::uint64_t val) {
    bool r = lit(val);
    while (eat('&')) r = lit(val) && r;
    return r;
  }
  bool lit(std::uint64_t val) {
    if (eat('!')) return !lit(val);
    if (eat('(')) {
      bool r = disj(val);
      if (!eat(')')) throw ParseError("label: expected ')'");
      return r;
    }
    if (eat('t')) return true;
    if (eat('f')) return false;
    skip();
    std::size_t b = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (b == i) throw ParseError("label: expected proposition index");
    int ap = std::stoi(s.substr(b, i - b));
    if (ap < 0 || ap >= num_aps)
      throw ParseError("label: proposition index out of range");
    return (val >> ap) & 1;
  }
};

IdSet letters_of_label(const std::string& label, int num_aps) {
  IdSet ls;
  int n = 1 << num_aps;
  for (int val = 0; val < n; ++val) {
    LabelParser p{label, 0, num_aps};
    bool r = p.disj(static_cast<std::uint64_t>(val));
    p.skip();
    if (p.i != label.size())
      throw ParseError("label: trailing input in '" + label + "'");
    if (r) ls.insert(val);
  }
  return ls;
}

std::vector<int> parse_state_conj(const std::string& text, int line) {
  std::vector<int> states;
  for (const std::string& part : split(text, '&')) {
    if (part.empty()) throw ParseError("empty destination", line);
    for (char c : part)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw ParseError("expected state number, got '" + part + "'", line);
    states.push_back(std::stoi(part));
  }
  return states;
}

}  // namespace

HoaAutomaton hoa_import(const std::string& text, bool dualize_buchi) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool saw_hoa = false, in_body = false, ended = false;
  int num_states = -1;
  std::string acceptance;
  HoaAutomaton res;
  std::vector<std::pair<int, std::vector<std::pair<std::string, std::vector<int>>>>>
      states;  // (rejecting-mark, edges)
  int cur_state = -1;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string l = trim(raw);
    if (l.empty() || l.rfind("/*", 0) == 0) continue;
    if (l == "--BODY--") {
      in_body = true;
      continue;
    }
    if (l == "--END--") {
      ended = true;
      break;
    }
    if (!in_body) {
      auto colon = l.find(':');
      if (colon == std::string::npos)
        throw ParseError("malformed header line", lineno);
      std::string key = trim(l.substr(0, colon));
      std::string val = trim(l.substr(colon + 1));
      if (key == "HOA") {
        if (val != "v1") throw ParseError("unsupported HOA version", lineno);
        saw_hoa = true;
      } else if (key == "States") {
        num_states = std::stoi(val);
      } else if (key == "Start") {
        for (int q : parse_state_conj(val, lineno)) res.uca.initial.insert(q);
      } else if (key == "AP") {
        std::istringstream ap(val);
        int n;
        ap >> n;
        for (int i = 0; i < n; ++i) {
          std::string name;
          ap >> std::ws;
          if (ap.get() != '"') throw ParseError("AP names must be quoted",
                                                lineno);
          std::getline(ap, name, '"');
          res.aps.push_back(name);
        }
        if (static_cast<int>(res.aps.size()) != n)
          throw ParseError("AP count mismatch", lineno);
      } else if (key == "Acceptance") {
        acceptance = val;
      } else if (key == "acc-name" || key == "tool" || key == "name" ||
                 key == "properties") {
        // informative only
      } else {
        throw ParseError("unknown header '" + key + "'", lineno);
      }
      continue;
    }
    // body
    if (l.rfind("State:", 0) == 0) {
      std::string rest = trim(l.substr(6));
      int rej = 0;
      auto brace = rest.find('{');
      if (brace != std::string::npos) {
        std::string marks = rest.substr(brace);
        rest = trim(rest.substr(0, brace));
        if (marks.back() != '}')
          throw ParseError("malformed acceptance marks", lineno);
        std::string inner = trim(marks.substr(1, marks.size() - 2));
        if (!inner.empty()) {
          if (inner != "0")
            throw ParseError("acceptance mark must be {0}", lineno);
          rej = 1;
        }
      }
      if (rest.find('[') != std::string::npos)
        throw ParseError("state labels are not supported", lineno);
      cur_state = std::stoi(rest);
      if (cur_state != static_cast<int>(states.size()))
        throw ParseError("states must be declared in order", lineno);
      states.push_back({rej, {}});
      continue;
    }
    if (l.front() == '[') {
      if (cur_state < 0) throw ParseError("edge before first state", lineno);
      auto close = l.find(']');
      if (close == std::string::npos)
        throw ParseError("unterminated edge label", lineno);
      std::string label = l.substr(1, close - 1);
      std::string rest = trim(l.substr(close + 1));
      if (rest.find('{') != std::string::npos)
        throw UnsupportedAcceptanceError(
            "transition-based acceptance marks are not supported");
      states[cur_state].second.push_back(
          {label, parse_state_conj(rest, lineno)});
      continue;
    }
    throw ParseError("implicit edge labels are not supported", lineno);
  }
  if (!saw_hoa) throw ParseError("missing HOA: v1 header");
  if (!ended) throw ParseError("missing --END--");
  if (num_states >= 0 && num_states != static_cast<int>(states.size()))
    throw ParseError("declared and listed state counts differ");

  bool rejecting_marks;
  if (acceptance == "1 Fin(0)") {
    if (dualize_buchi)
      throw UnsupportedAcceptanceError(
          "file is already co-Buchi; dualization expects Buchi input");
    rejecting_marks = true;
  } else if (acceptance == "0 t") {
    rejecting_marks = false;
  } else if (acceptance == "1 Inf(0)") {
    if (!dualize_buchi)
      throw UnsupportedAcceptanceError(
          "Buchi acceptance requires dualization to read as universal "
          "co-Buchi");
    rejecting_marks = true;
  } else {
    throw UnsupportedAcceptanceError("unsupported acceptance condition: " +
                                     acceptance);
  }

  Uca& a = res.uca;
  a.num_states = static_cast<int>(states.size());
  a.num_letters = 1 << res.aps.size();
  a.delta.assign(a.num_states, std::vector<IdSet>(a.num_letters, IdSet{}));
  for (int q = 0; q < a.num_states; ++q) {
    if (states[q].first && rejecting_marks) a.rejecting.insert(q);
    for (const auto& [label, dests] : states[q].second) {
      IdSet ls = letters_of_label(label, static_cast<int>(res.aps.size()));
      for (int l : ls)
        for (int q2 : dests) {
          if (q2 < 0 || q2 >= a.num_states)
            throw ParseError("edge destination out of range");
          a.delta[q][l].insert(q2);
        }
    }
  }
  a.validate();
  return res;
}

}  // namespace abocs
