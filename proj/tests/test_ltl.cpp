#include <string>
#include <vector>

#include "abocs/hoa.hpp"
#include "abocs/ltl.hpp"
#include "abocs/ltl_to_uca.hpp"
#include "abocs/oracle/ltl_ref.hpp"
#include "abocs/uca.hpp"
#include "doctest.h"

using namespace abocs;

namespace {

SymbolTable tab(std::initializer_list<const char*> names) {
  SymbolTable t;
  for (const char* n : names) t.intern(n);
  return t;
}

int parse_err_pos(LtlFactory& f, const std::string& text,
                  const SymbolTable& in, const SymbolTable& out) {
  try {
    parse_ltl(f, text, in, out);
  } catch (const LtlParseError& e) {
    return e.pos;
  }
  return -1;
}

}  // namespace

TEST_CASE("parser precedence and operator identities") {
  LtlFactory f;
  SymbolTable in = tab({});
  SymbolTable out = tab({"p", "q"});
  LtlRef p = f.atom(0, false);
  LtlRef q = f.atom(1, false);

  CHECK(parse_ltl(f, "F q & G !p", in, out) ==
        f.land(f.finally_(q), f.globally(f.lnot(p))));
  CHECK(parse_ltl(f, "p U q U p", in, out) == f.until(p, f.until(q, p)));
  CHECK(parse_ltl(f, "p -> q", in, out) == f.lor(f.lnot(p), q));
  CHECK(parse_ltl(f, "p -> q -> p", in, out) ==
        f.lor(f.lnot(p), f.lor(f.lnot(q), p)));
  CHECK(parse_ltl(f, "X X p", in, out) == f.next(f.next(p)));
  CHECK(parse_ltl(f, "G (p | q)", in, out) == f.globally(f.lor(p, q)));
  CHECK(parse_ltl(f, "GF p", in, out) == f.globally(f.finally_(p)));
  CHECK(parse_ltl(f, "FG p", in, out) == f.finally_(f.globally(p)));
  CHECK(parse_ltl(f, "p & q | p", in, out) == f.lor(f.land(p, q), p));
  CHECK(parse_ltl(f, "p R q", in, out) == f.release(p, q));
  CHECK(parse_ltl(f, "true", in, out) == f.tru());
  CHECK(parse_ltl(f, "false", in, out) == f.fls());
}

TEST_CASE("parser distinguishes input from state propositions") {
  LtlFactory f;
  SymbolTable in = tab({"go"});
  SymbolTable out = tab({"p"});
  LtlRef a = parse_ltl(f, "go -> X p", in, out);
  CHECK(a == f.lor(f.lnot(f.atom(0, true)), f.next(f.atom(0, false))));
}

TEST_CASE("parse errors carry the offending offset") {
  LtlFactory f;
  SymbolTable in = tab({});
  SymbolTable out = tab({"p", "q"});

  CHECK(parse_err_pos(f, "F r", in, out) == 2);
  CHECK(parse_err_pos(f, "(p", in, out) == 2);
  CHECK(parse_err_pos(f, "p q", in, out) == 2);
  CHECK(parse_err_pos(f, "", in, out) == 0);
  CHECK(parse_err_pos(f, "p &", in, out) == 3);
  CHECK(parse_err_pos(f, "@", in, out) == 0);

  SymbolTable both_in = tab({"p"});
  CHECK(parse_err_pos(f, "p", both_in, out) == 0);
}

TEST_CASE("negation normal form pushes negations onto atoms") {
  LtlFactory f;
  LtlRef p = f.atom(0, false);
  LtlRef q = f.atom(1, false);

  CHECK(nnf(f, f.lnot(f.until(p, q))) ==
        f.release(f.lnot(p), f.lnot(q)));
  CHECK(nnf(f, f.lnot(f.globally(p))) == f.finally_(f.lnot(p)));
  CHECK(nnf(f, f.lnot(f.finally_(p))) == f.globally(f.lnot(p)));
  CHECK(nnf(f, f.lnot(f.lnot(p))) == p);
  CHECK(nnf(f, f.lnot(f.land(p, f.next(q)))) ==
        f.lor(f.lnot(p), f.next(f.lnot(q))));
  CHECK(nnf(f, f.lnot(f.tru())) == f.fls());
  CHECK(nnf(f, f.release(p, q)) == f.release(p, q));
}

TEST_CASE("shrink rewrites merge eventualities and invariants") {
  LtlFactory f;
  SymbolTable in = tab({});
  SymbolTable out = tab({"p", "q"});
  LtlRef p = f.atom(0, false);
  LtlRef q = f.atom(1, false);

  CHECK(simplify(f, parse_ltl(f, "F p | F q", in, out)) ==
        f.finally_(f.lor(p, q)));
  CHECK(simplify(f, parse_ltl(f, "G p & G q", in, out)) ==
        f.globally(f.land(p, q)));
  CHECK(simplify(f, parse_ltl(f, "F F p", in, out)) == f.finally_(p));
  CHECK(simplify(f, parse_ltl(f, "G G p", in, out)) == f.globally(p));
  CHECK(simplify(f, parse_ltl(f, "p & true", in, out)) == p);
  CHECK(simplify(f, parse_ltl(f, "p | false", in, out)) == p);
  CHECK(simplify(f, parse_ltl(f, "p & false", in, out)) == f.fls());
  CHECK(simplify(f, parse_ltl(f, "p | true", in, out)) == f.tru());
  CHECK(simplify(f, parse_ltl(f, "GF p & GF q", in, out)) ==
        f.globally(f.land(f.finally_(p), f.finally_(q))));
}

TEST_CASE("formula rendering round trips through the parser") {
  LtlFactory f;
  SymbolTable in = tab({"go"});
  SymbolTable out = tab({"p", "q"});
  for (const char* text :
       {"F q & G !p", "p U q U p", "!p | q", "X X p", "G (p | q)",
        "(p U q) U p", "p & (q | p)", "go & F p", "p R q R p", "true"}) {
    LtlRef a = parse_ltl(f, text, in, out);
    CHECK(to_string(a, in, out) == text);
    CHECK(parse_ltl(f, to_string(a, in, out), in, out) == a);
  }
}

TEST_CASE("reference lasso evaluation agrees with hand-checked words") {
  LtlFactory f;
  SymbolTable in = tab({});
  SymbolTable out = tab({"p", "q"});
  auto holds = [&](const char* text, const oracle::ValLasso& w) {
    return oracle::ltl_ref_holds(parse_ltl(f, text, in, out), w);
  };

  oracle::ValLasso always_p{{}, {{0, 1}}};
  CHECK(holds("p", always_p));
  CHECK(holds("G p", always_p));
  CHECK(holds("F p", always_p));
  CHECK(holds("X p", always_p));
  CHECK(!holds("q", always_p));
  CHECK(!holds("F q", always_p));

  oracle::ValLasso p_then_nothing{{{0, 1}}, {{0, 0}}};
  CHECK(holds("p", p_then_nothing));
  CHECK(!holds("G p", p_then_nothing));
  CHECK(holds("F p", p_then_nothing));
  CHECK(!holds("X p", p_then_nothing));
  CHECK(holds("FG !p", p_then_nothing));
  CHECK(!holds("GF p", p_then_nothing));

  oracle::ValLasso pp_then_q{{{0, 1}, {0, 1}}, {{0, 2}}};
  CHECK(holds("p U q", pp_then_q));
  CHECK(holds("true U q", pp_then_q));
  CHECK(!holds("q", pp_then_q));

  oracle::ValLasso gap_then_q{{{0, 0}}, {{0, 2}}};
  CHECK(!holds("p U q", gap_then_q));
  CHECK(holds("F q", gap_then_q));

  oracle::ValLasso always_q{{}, {{0, 2}}};
  CHECK(holds("p R q", always_q));
  oracle::ValLasso never{{}, {{0, 0}}};
  CHECK(!holds("p R q", never));

  CHECK_THROWS_AS(
      oracle::ltl_ref_holds(f.tru(), oracle::ValLasso{{{0, 0}}, {}}),
      ValidationError);
}

namespace {

/* Compare the automaton's universal reading against the reference
 * evaluator on every lasso up to the given shape bounds. */
void check_language_agreement(const std::string& text,
                              std::initializer_list<const char*> ins,
                              std::initializer_list<const char*> outs,
                              int max_prefix, int max_period) {
  LtlFactory f;
  PredAlphabet ab;
  for (const char* n : ins) ab.ap_in.intern(n);
  for (const char* n : outs) ab.ap_out.intern(n);
  LtlRef phi = parse_ltl(f, text, ab.ap_in, ab.ap_out);
  Uca a = ltl_to_uca(f, phi, ab);
  a.validate();
  REQUIRE(a.is_total());

  const int L = ab.num_letters();
  long long checked = 0, mismatches = 0;
  std::string first_bad;
  for (int pl = 0; pl <= max_prefix; ++pl) {
    for (int nl = 1; nl <= max_period; ++nl) {
      int t = pl + nl;
      long long combos = 1;
      for (int i = 0; i < t; ++i) combos *= L;
      for (long long code = 0; code < combos; ++code) {
        std::vector<int> prefix(pl), period(nl);
        long long c = code;
        for (int i = 0; i < t; ++i) {
          int l = static_cast<int>(c % L);
          c /= L;
          (i < pl ? prefix[i] : period[i - pl]) = l;
        }
        oracle::ValLasso w;
        for (int l : prefix) w.prefix.push_back({ab.in_of(l), ab.out_of(l)});
        for (int l : period) w.period.push_back({ab.in_of(l), ab.out_of(l)});
        bool via_automaton = uca_accepts_lasso(a, prefix, period);
        bool via_reference = oracle::ltl_ref_holds(phi, w);
        ++checked;
        if (via_automaton != via_reference) {
          ++mismatches;
          if (first_bad.empty()) {
            first_bad = "prefix [";
            for (int l : prefix) first_bad += std::to_string(l) + " ";
            first_bad += "] period [";
            for (int l : period) first_bad += std::to_string(l) + " ";
            first_bad += "] automaton=" + std::to_string(via_automaton);
          }
        }
      }
    }
  }
  INFO("formula: " << text << ", first mismatch: " << first_bad);
  CHECK(mismatches == 0);
  CHECK(checked > 0);
}

}  // namespace

TEST_CASE("automaton language matches reference evaluation") {
  for (const char* text :
       {"true", "false", "p", "!p", "X p", "X X p", "F p", "G p", "G !p",
        "p U q", "p R q", "!(p U q)", "F p & G q", "F p | F q", "p -> X q",
        "p & X !p"}) {
    check_language_agreement(text, {}, {"p", "q"}, 2, 2);
  }
}

TEST_CASE("automaton language matches reference on recurrence goals") {
  for (const char* text :
       {"GF p", "FG p", "GF p & GF q", "G (p -> F q)", "F G !p | G F q"}) {
    check_language_agreement(text, {}, {"p", "q"}, 2, 3);
  }
}

TEST_CASE("automaton language matches reference with input propositions") {
  for (const char* text : {"F go", "G go", "go U p", "G (go -> X p)"}) {
    check_language_agreement(text, {"go"}, {"p"}, 2, 3);
  }
}

TEST_CASE("tableau automaton under existential reading accepts witnesses") {
  LtlFactory f;
  PredAlphabet ab;
  ab.ap_out.intern("p");
  LtlRef phi = parse_ltl(f, "GF p", ab.ap_in, ab.ap_out);
  Nba nba = ltl_to_nba(f, phi, ab);
  CHECK(nba_accepts_lasso(nba, {}, {1}));
  CHECK(nba_accepts_lasso(nba, {0}, {1, 0}));
  CHECK(!nba_accepts_lasso(nba, {1}, {0}));
  CHECK(!nba_accepts_lasso(nba, {}, {0}));
}

TEST_CASE("completion adds an absorbing sink without changing the language") {
  Uca a;
  a.num_states = 2;
  a.num_letters = 2;
  a.initial = {0};
  a.delta = {{IdSet{1}, IdSet{}}, {IdSet{}, IdSet{}}};
  a.rejecting = {1};
  a.validate();
  CHECK(!a.is_total());

  Uca b = complete_uca(a);
  b.validate();
  CHECK(b.is_total());
  CHECK(b.num_states == 3);
  CHECK(b.rejecting == IdSet{1});

  for (int pl = 0; pl <= 1; ++pl) {
    for (int nl = 1; nl <= 2; ++nl) {
      int t = pl + nl;
      for (int code = 0; code < (1 << t); ++code) {
        std::vector<int> prefix(pl), period(nl);
        for (int i = 0; i < t; ++i) {
          int l = (code >> i) & 1;
          (i < pl ? prefix[i] : period[i - pl]) = l;
        }
        CHECK(uca_accepts_lasso(a, prefix, period) ==
              uca_accepts_lasso(b, prefix, period));
      }
    }
  }
}

TEST_CASE("alphabet size guard") {
  PredAlphabet ab;
  for (int i = 0; i < 13; ++i) ab.ap_out.intern("a" + std::to_string(i));
  CHECK_THROWS_AS(ab.check_size(), ValidationError);
}

TEST_CASE("automaton exchange format round trips") {
  LtlFactory f;
  PredAlphabet ab;
  ab.ap_out.intern("p");
  Uca a = ltl_to_uca(f, parse_ltl(f, "G !p", ab.ap_in, ab.ap_out), ab);

  std::vector<std::uint64_t> bits;
  for (int l = 0; l < a.num_letters; ++l) bits.push_back(l);
  std::string text = hoa_export(a, {"p"}, bits);

  HoaAutomaton h = hoa_import(text);
  CHECK(h.aps == std::vector<std::string>{"p"});
  CHECK(h.uca.num_states == a.num_states);
  CHECK(h.uca.num_letters == a.num_letters);
  CHECK(h.uca.initial == a.initial);
  CHECK(h.uca.rejecting == a.rejecting);
  CHECK(h.uca.delta == a.delta);

  CHECK(hoa_export(h.uca, h.aps, bits) == text);
}

TEST_CASE("import reads edge labels as boolean formulas") {
  std::string text =
      "HOA: v1\n"
      "States: 2\n"
      "Start: 0\n"
      "AP: 2 \"a\" \"b\"\n"
      "Acceptance: 1 Fin(0)\n"
      "--BODY--\n"
      "State: 0 {0}\n"
      "[0 | !1] 1\n"
      "[t] 0\n"
      "State: 1\n"
      "[!(0 & 1)] 0&1\n"
      "--END--\n";
  HoaAutomaton h = hoa_import(text);
  CHECK(h.uca.num_letters == 4);
  CHECK(h.uca.rejecting == IdSet{0});
  // 0 | !1 holds for valuations 00, 01, 11
  CHECK(h.uca.delta[0][0] == IdSet{0, 1});
  CHECK(h.uca.delta[0][1] == IdSet{0, 1});
  CHECK(h.uca.delta[0][2] == IdSet{0});
  CHECK(h.uca.delta[0][3] == IdSet{0, 1});
  // !(0 & 1) excludes only valuation 11; conjunctive destination
  CHECK(h.uca.delta[1][0] == IdSet{0, 1});
  CHECK(h.uca.delta[1][3] == IdSet{});
}

TEST_CASE("import acceptance handling") {
  auto doc = [](const std::string& acc, const std::string& marks) {
    return "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"p\"\nAcceptance: " + acc +
           "\n--BODY--\nState: 0 " + marks + "\n[t] 0\n--END--\n";
  };

  HoaAutomaton buchi = hoa_import(doc("1 Inf(0)", "{0}"), true);
  CHECK(buchi.uca.rejecting == IdSet{0});
  CHECK_THROWS_AS(hoa_import(doc("1 Inf(0)", "{0}")),
                  UnsupportedAcceptanceError);
  CHECK_THROWS_AS(hoa_import(doc("1 Fin(0)", "{0}"), true),
                  UnsupportedAcceptanceError);

  HoaAutomaton trivial = hoa_import(doc("0 t", ""));
  CHECK(trivial.uca.rejecting.empty());

  CHECK_THROWS_AS(hoa_import(doc("2 Inf(0) | Fin(1)", "{0}")),
                  UnsupportedAcceptanceError);
  CHECK_THROWS_AS(hoa_import(doc("2 Inf(0) | Fin(1)", "{0}"), true),
                  UnsupportedAcceptanceError);
}

TEST_CASE("import rejects malformed documents") {
  CHECK_THROWS_AS(hoa_import("HOA: v1\n--BODY--\nState: 0\n"), ParseError);
  CHECK_THROWS_AS(hoa_import("States: 1\n--BODY--\n--END--\n"), ParseError);
  std::string out_of_order =
      "HOA: v1\nStates: 2\nStart: 0\nAP: 0\nAcceptance: 0 t\n--BODY--\n"
      "State: 1\n--END--\n";
  CHECK_THROWS_AS(hoa_import(out_of_order), ParseError);
  std::string implicit =
      "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"p\"\nAcceptance: 0 t\n"
      "--BODY--\nState: 0\n0\n--END--\n";
  CHECK_THROWS_AS(hoa_import(implicit), ParseError);
  std::string trans_marks =
      "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"p\"\nAcceptance: 1 Fin(0)\n"
      "--BODY--\nState: 0\n[t] 0 {0}\n--END--\n";
  CHECK_THROWS_AS(hoa_import(trans_marks), UnsupportedAcceptanceError);
}

TEST_CASE("automaton for fixed specifications stays small") {
  LtlFactory f;
  PredAlphabet ab;
  ab.ap_out.intern("p");
  ab.ap_out.intern("q");
  Uca safety = ltl_to_uca(f, parse_ltl(f, "G !p", ab.ap_in, ab.ap_out), ab);
  CHECK(safety.num_states <= 6);
  Uca reach = ltl_to_uca(
      f, simplify(f, parse_ltl(f, "F p & F q", ab.ap_in, ab.ap_out)), ab);
  CHECK(reach.num_states <= 16);
}
