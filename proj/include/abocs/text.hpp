#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace abocs {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::string strip_comment(const std::string& s) {
  auto pos = s.find('#');
  return trim(pos == std::string::npos ? s : s.substr(0, pos));
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> r;
  std::istringstream in(s);
  std::string t;
  while (in >> t) r.push_back(t);
  return r;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> r;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      r.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  r.push_back(trim(cur));
  return r;
}

}  // namespace abocs
