#include "abocs/ltl.hpp"

#include <cctype>

namespace abocs {

LtlRef LtlFactory::make(LtlOp op, int atom, bool input_ap, LtlRef l,
                        LtlRef r) {
  Key k{op, atom, input_ap, l, r};
  auto it = interned_.find(k);
  if (it != interned_.end()) return it->second;
  nodes_.push_back(Ltl{op, atom, input_ap, l, r,
                       static_cast<int>(nodes_.size())});
  LtlRef ref = &nodes_.back();
  interned_.emplace(k, ref);
  return ref;
}

namespace {

struct Parser {
  LtlFactory& f;
  const std::string& s;
  const SymbolTable& ap_in;
  const SymbolTable& ap_out;
  std::size_t i = 0;

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool eat_arrow() {
    skip();
    if (i + 1 < s.size() && s[i] == '-' && s[i + 1] == '>') {
      i += 2;
      return true;
    }
    return false;
  }

  /* identifier or single temporal-operator letter */
  std::string word() {
    skip();
    std::size_t b = i;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                            s[i] == '_'))
      ++i;
    return s.substr(b, i - b);
  }

  LtlRef parse() {
    LtlRef a = imp();
    skip();
    if (i != s.size())
      throw LtlParseError("unexpected trailing input", static_cast<int>(i));
    return a;
  }

  LtlRef imp() {
    LtlRef a = disj();
    if (eat_arrow()) return f.lor(f.lnot(a), imp());
    return a;
  }
  LtlRef disj() {
    LtlRef a = conj();
    while (true) {
      skip();
      if (i < s.size() && s[i] == '|') {
        ++i;
        a = f.lor(a, conj());
      } else {
        return a;
      }
    }
  }
  LtlRef conj() {
    LtlRef a = bin_temporal();
    while (true) {
      skip();
      if (i < s.size() && s[i] == '&') {
        ++i;
        a = f.land(a, bin_temporal());
      } else {
        return a;
      }
    }
  }
  LtlRef bin_temporal() {
    LtlRef a = unary();
    skip();
    std::size_t save = i;
    std::string w = word();
    if (w == "U") return f.until(a, bin_temporal());
    if (w == "R") return f.release(a, bin_temporal());
    i = save;
    return a;
  }
  LtlRef unary() {
    skip();
    int at = static_cast<int>(i);
    if (i >= s.size())
      throw LtlParseError("unexpected end of formula", at);
    if (eat('!')) return f.lnot(unary());
    if (eat('(')) {
      LtlRef a = imp();
      if (!eat(')')) throw LtlParseError("expected ')'", static_cast<int>(i));
      return a;
    }
    std::string w = word();
    if (w.empty())
      throw LtlParseError(std::string("unexpected character '") + s[i] + "'",
                          at);
    if (w == "X") return f.next(unary());
    if (w == "F") return f.finally_(unary());
    if (w == "G") return f.globally(unary());
    if (w == "GF") return f.globally(f.finally_(unary()));
    if (w == "FG") return f.finally_(f.globally(unary()));
    if (w == "true") return f.tru();
    if (w == "false") return f.fls();
    int in_id = ap_in.lookup(w);
    int out_id = ap_out.lookup(w);
    if (in_id >= 0 && out_id >= 0)
      throw LtlParseError("proposition '" + w +
                              "' declared on both input and state side",
                          at);
    if (in_id >= 0) return f.atom(in_id, true);
    if (out_id >= 0) return f.atom(out_id, false);
    throw LtlParseError("undeclared proposition '" + w + "'", at);
  }
};

}  // namespace

LtlRef parse_ltl(LtlFactory& f, const std::string& text,
                 const SymbolTable& ap_in, const SymbolTable& ap_out) {
  Parser p{f, text, ap_in, ap_out};
  return p.parse();
}

LtlRef nnf(LtlFactory& f, LtlRef a) {
  switch (a->op) {
    case LtlOp::True:
    case LtlOp::False:
    case LtlOp::Atom:
      return a;
    case LtlOp::And:
      return f.land(nnf(f, a->lhs), nnf(f, a->rhs));
    case LtlOp::Or:
      return f.lor(nnf(f, a->lhs), nnf(f, a->rhs));
    case LtlOp::Next:
      return f.next(nnf(f, a->lhs));
    case LtlOp::Until:
      return f.until(nnf(f, a->lhs), nnf(f, a->rhs));
    case LtlOp::Release:
      return f.release(nnf(f, a->lhs), nnf(f, a->rhs));
    case LtlOp::Finally:
      return f.finally_(nnf(f, a->lhs));
    case LtlOp::Globally:
      return f.globally(nnf(f, a->lhs));
    case LtlOp::Not:
      break;
  }
  LtlRef b = a->lhs;
  switch (b->op) {
    case LtlOp::True:
      return f.fls();
    case LtlOp::False:
      return f.tru();
    case LtlOp::Atom:
      return f.lnot(b);
    case LtlOp::Not:
      return nnf(f, b->lhs);
    case LtlOp::And:
      return f.lor(nnf(f, f.lnot(b->lhs)), nnf(f, f.lnot(b->rhs)));
    case LtlOp::Or:
      return f.land(nnf(f, f.lnot(b->lhs)), nnf(f, f.lnot(b->rhs)));
    case LtlOp::Next:
      return f.next(nnf(f, f.lnot(b->lhs)));
    case LtlOp::Until:
      return f.release(nnf(f, f.lnot(b->lhs)), nnf(f, f.lnot(b->rhs)));
    case LtlOp::Release:
      return f.until(nnf(f, f.lnot(b->lhs)), nnf(f, f.lnot(b->rhs)));
    case LtlOp::Finally:
      return f.globally(nnf(f, f.lnot(b->lhs)));
    case LtlOp::Globally:
      return f.finally_(nnf(f, f.lnot(b->lhs)));
  }
  throw Error("unreachable");
}

LtlRef simplify(LtlFactory& f, LtlRef a) {
  LtlRef l = a->lhs ? simplify(f, a->lhs) : nullptr;
  LtlRef r = a->rhs ? simplify(f, a->rhs) : nullptr;
  switch (a->op) {
    case LtlOp::Finally:
      if (l->op == LtlOp::Finally) return l;
      return f.finally_(l);
    case LtlOp::Globally:
      if (l->op == LtlOp::Globally) return l;
      return f.globally(l);
    case LtlOp::Or:
      if (l->op == LtlOp::Finally && r->op == LtlOp::Finally)
        return f.finally_(simplify(f, f.lor(l->lhs, r->lhs)));
      if (l->op == LtlOp::False) return r;
      if (r->op == LtlOp::False) return l;
      if (l->op == LtlOp::True || r->op == LtlOp::True) return f.tru();
      return f.lor(l, r);
    case LtlOp::And:
      if (l->op == LtlOp::Globally && r->op == LtlOp::Globally)
        return f.globally(simplify(f, f.land(l->lhs, r->lhs)));
      if (l->op == LtlOp::True) return r;
      if (r->op == LtlOp::True) return l;
      if (l->op == LtlOp::False || r->op == LtlOp::False) return f.fls();
      return f.land(l, r);
    case LtlOp::Not:
      return f.lnot(l);
    case LtlOp::Next:
      return f.next(l);
    case LtlOp::Until:
      return f.until(l, r);
    case LtlOp::Release:
      return f.release(l, r);
    default:
      return a;
  }
}

namespace {

int prec(LtlOp op) {
  switch (op) {
    case LtlOp::Or:
      return 1;
    case LtlOp::And:
      return 2;
    case LtlOp::Until:
    case LtlOp::Release:
      return 3;
    default:
      return 4;
  }
}

void render(LtlRef a, const SymbolTable& ap_in, const SymbolTable& ap_out,
            int outer, std::string& s) {
  int p = prec(a->op);
  bool paren = p < outer;
  if (paren) s += "(";
  switch (a->op) {
    case LtlOp::True:
      s += "true";
      break;
    case LtlOp::False:
      s += "false";
      break;
    case LtlOp::Atom:
      s += a->input_ap ? ap_in.name(a->atom) : ap_out.name(a->atom);
      break;
    case LtlOp::Not:
      s += "!";
      render(a->lhs, ap_in, ap_out, 4, s);
      break;
    case LtlOp::Next:
      s += "X ";
      render(a->lhs, ap_in, ap_out, 4, s);
      break;
    case LtlOp::Finally:
      s += "F ";
      render(a->lhs, ap_in, ap_out, 4, s);
      break;
    case LtlOp::Globally:
      s += "G ";
      render(a->lhs, ap_in, ap_out, 4, s);
      break;
    case LtlOp::And:
      render(a->lhs, ap_in, ap_out, p, s);
      s += " & ";
      render(a->rhs, ap_in, ap_out, p + 1, s);
      break;
    case LtlOp::Or:
      render(a->lhs, ap_in, ap_out, p, s);
      s += " | ";
      render(a->rhs, ap_in, ap_out, p + 1, s);
      break;
    case LtlOp::Until:
      render(a->lhs, ap_in, ap_out, p + 1, s);
      s += " U ";
      render(a->rhs, ap_in, ap_out, p, s);
      break;
    case LtlOp::Release:
      render(a->lhs, ap_in, ap_out, p + 1, s);
      s += " R ";
      render(a->rhs, ap_in, ap_out, p, s);
      break;
  }
  if (paren) s += ")";
}

}  // namespace

std::string to_string(LtlRef a, const SymbolTable& ap_in,
                      const SymbolTable& ap_out) {
  std::string s;
  render(a, ap_in, ap_out, 0, s);
  return s;
}

}  // namespace abocs
