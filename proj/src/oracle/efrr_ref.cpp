#include "abocs/oracle/efrr_ref.hpp"

namespace abocs::oracle {

namespace {

bool member(const IdSet& s, int v) {
  for (int a : s)
    if (a == v) return true;
  return false;
}

}  // namespace

bool efrr_holds_ref(const FiniteSystem& conc, const FiniteSystem& abst,
                    const EfrrRelation& q) {
  for (int x : conc.initial) {
    if (q.alpha[x].empty()) return false;
    for (int xh : q.alpha[x])
      if (!member(abst.initial, xh)) return false;
  }
  for (int x = 0; x < conc.num_states(); ++x)
    for (int xh : q.alpha[x]) {
      bool any_out = false;
      for (int y : conc.out[x])
        for (int yh : q.gamma[y]) {
          any_out = true;
          if (!member(abst.out[xh], yh)) return false;
        }
      if (!any_out) return false;
      for (int uh = 0; uh < abst.num_inputs(); ++uh) {
        if (abst.trans[xh][uh].empty()) continue;
        if (q.beta[uh].empty()) return false;
        bool any_succ = false;
        for (int u : q.beta[uh]) {
          if (conc.trans[x][u].empty()) return false;
          for (int x2 : conc.trans[x][u])
            for (int x2h : q.alpha[x2]) {
              any_succ = true;
              if (!member(abst.trans[xh][uh], x2h)) return false;
            }
        }
        if (!any_succ) return false;
      }
    }
  return true;
}

}  // namespace abocs::oracle
