#pragma once

#include <deque>
#include <map>
#include <string>
#include <tuple>

#include "abocs/errors.hpp"
#include "abocs/ids.hpp"

namespace abocs {

enum class LtlOp {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Next,
  Until,
  Release,
  Finally,
  Globally
};

/* Hash-consed formula node: equal subformulas share one node, so node
 * pointers double as ids. Atoms carry whether they read inputs or states. */
struct Ltl {
  LtlOp op;
  int atom = -1;
  bool input_ap = false;
  const Ltl* lhs = nullptr;
  const Ltl* rhs = nullptr;
  int id = -1;
};

using LtlRef = const Ltl*;

class LtlFactory {
 public:
  LtlRef tru() { return make(LtlOp::True, -1, false, nullptr, nullptr); }
  LtlRef fls() { return make(LtlOp::False, -1, false, nullptr, nullptr); }
  LtlRef atom(int id, bool input_ap) {
    return make(LtlOp::Atom, id, input_ap, nullptr, nullptr);
  }
  LtlRef lnot(LtlRef a) { return make(LtlOp::Not, -1, false, a, nullptr); }
  LtlRef land(LtlRef a, LtlRef b) { return make(LtlOp::And, -1, false, a, b); }
  LtlRef lor(LtlRef a, LtlRef b) { return make(LtlOp::Or, -1, false, a, b); }
  LtlRef next(LtlRef a) { return make(LtlOp::Next, -1, false, a, nullptr); }
  LtlRef until(LtlRef a, LtlRef b) {
    return make(LtlOp::Until, -1, false, a, b);
  }
  LtlRef release(LtlRef a, LtlRef b) {
    return make(LtlOp::Release, -1, false, a, b);
  }
  LtlRef finally_(LtlRef a) {
    return make(LtlOp::Finally, -1, false, a, nullptr);
  }
  LtlRef globally(LtlRef a) {
    return make(LtlOp::Globally, -1, false, a, nullptr);
  }

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  LtlRef make(LtlOp op, int atom, bool input_ap, LtlRef l, LtlRef r);
  using Key = std::tuple<LtlOp, int, bool, LtlRef, LtlRef>;
  std::map<Key, LtlRef> interned_;
  std::deque<Ltl> nodes_;
};

struct LtlParseError : Error {
  int pos;  // 0-based offset into the formula text
  LtlParseError(const std::string& msg, int pos_)
      : Error(msg + " at offset " + std::to_string(pos_)), pos(pos_) {}
};

/* Parse over declared propositions. Unary operators and F/G bind tightest,
 * then U/R (right associative), then &, then |, then -> (right
 * associative). Atoms must be declared on exactly one side. */
LtlRef parse_ltl(LtlFactory& f, const std::string& text,
                 const SymbolTable& ap_in, const SymbolTable& ap_out);

/* Negation normal form; negations end up on atoms only. */
LtlRef nnf(LtlFactory& f, LtlRef a);

/* Language-preserving shrink rewrites applied bottom-up (merge F over |, G
 * over &, collapse FF/GG). Keeps the tableau small for conjunctions of
 * recurrence goals. */
LtlRef simplify(LtlFactory& f, LtlRef a);

std::string to_string(LtlRef a, const SymbolTable& ap_in,
                      const SymbolTable& ap_out);

}  // namespace abocs
