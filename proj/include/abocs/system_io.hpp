#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abocs/system.hpp"

namespace abocs {

struct SystemFile {
  FiniteSystem sys;
  std::optional<PredicateMaps> preds;
};

/* Structured-text system format. Sections: [states], [initial], [inputs],
 * [outputs], [trans], [out] and optionally [aps.in], [aps.out],
 * [preds.state], [preds.input]. '#' starts a comment. */
SystemFile parse_system(const std::string& text);
SystemFile load_system(const std::string& path);

/* Deterministic rendering: declaration order, one transition row per
 * (state, input) with successors sorted by id. parse(serialize(s)) == s. */
std::string serialize_system(const SystemFile& sf);
void save_system(const SystemFile& sf, const std::string& path);

/* Shared helpers for the other structured-text formats. */
std::string format_letter(const SymbolTable& aps, PredMask m);
PredMask parse_letter(const SymbolTable& aps, const std::string& tok,
                      int line);

/* One content-bearing line, with its 1-based source line number. */
struct TextLine {
  std::string text;
  int no;
};

/* Comment-stripped lines grouped under their [section] headers. */
std::map<std::string, std::vector<TextLine>> read_sections(
    const std::string& text);
std::vector<std::string> section_symbols(
    const std::map<std::string, std::vector<TextLine>>& sec,
    const std::string& name);
/* "lhs tokens -> rhs tokens" */
void split_arrow(const std::string& l, int no, std::vector<std::string>& lhs,
                 std::vector<std::string>& rhs);

}  // namespace abocs
