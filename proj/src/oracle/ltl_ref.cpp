#include "abocs/oracle/ltl_ref.hpp"

#include <map>

namespace abocs::oracle {

namespace {

struct Eval {
  const ValLasso& w;
  int p, n, total;
  std::map<LtlRef, std::vector<char>> memo;

  int succ(int i) const { return i + 1 < total ? i + 1 : p; }
  std::pair<PredMask, PredMask> at(int i) const {
    return i < p ? w.prefix[i] : w.period[i - p];
  }

  const std::vector<char>& values(LtlRef f) {
    auto it = memo.find(f);
    if (it != memo.end()) return it->second;
    std::vector<char> v(total, 0);
    switch (f->op) {
      case LtlOp::True:
        v.assign(total, 1);
        break;
      case LtlOp::False:
        break;
      case LtlOp::Atom:
        for (int i = 0; i < total; ++i) {
          auto [im, om] = at(i);
          PredMask m = f->input_ap ? im : om;
          v[i] = (m >> f->atom) & 1;
        }
        break;
      case LtlOp::Not: {
        const auto& a = values(f->lhs);
        for (int i = 0; i < total; ++i) v[i] = !a[i];
        break;
      }
      case LtlOp::And: {
        const auto& a = values(f->lhs);
        const auto& b = values(f->rhs);
        for (int i = 0; i < total; ++i) v[i] = a[i] && b[i];
        break;
      }
      case LtlOp::Or: {
        const auto& a = values(f->lhs);
        const auto& b = values(f->rhs);
        for (int i = 0; i < total; ++i) v[i] = a[i] || b[i];
        break;
      }
      case LtlOp::Next: {
        const auto& a = values(f->lhs);
        for (int i = 0; i < total; ++i) v[i] = a[succ(i)];
        break;
      }
      case LtlOp::Finally: {
        const auto& a = values(f->lhs);
        v = a;
        iterate([&](int i, const std::vector<char>& cur) {
          return static_cast<char>(a[i] || cur[succ(i)]);
        }, v);
        break;
      }
      case LtlOp::Globally: {
        const auto& a = values(f->lhs);
        v.assign(total, 1);
        iterate([&](int i, const std::vector<char>& cur) {
          return static_cast<char>(a[i] && cur[succ(i)]);
        }, v);
        break;
      }
      case LtlOp::Until: {
        const auto& a = values(f->lhs);
        const auto& b = values(f->rhs);
        v.assign(total, 0);
        iterate([&](int i, const std::vector<char>& cur) {
          return static_cast<char>(b[i] || (a[i] && cur[succ(i)]));
        }, v);
        break;
      }
      case LtlOp::Release: {
        const auto& a = values(f->lhs);
        const auto& b = values(f->rhs);
        v.assign(total, 1);
        iterate([&](int i, const std::vector<char>& cur) {
          return static_cast<char>(b[i] && (a[i] || cur[succ(i)]));
        }, v);
        break;
      }
    }
    return memo.emplace(f, std::move(v)).first->second;
  }

  template <typename Step>
  void iterate(Step step, std::vector<char>& v) {
    for (int round = 0; round <= total; ++round) {
      bool changed = false;
      for (int i = total - 1; i >= 0; --i) {
        char nv = step(i, v);
        if (nv != v[i]) {
          v[i] = nv;
          changed = true;
        }
      }
      if (!changed) return;
    }
  }
};

}  // namespace

bool ltl_ref_holds(LtlRef f, const ValLasso& w) {
  if (w.period.empty())
    throw ValidationError("lasso period must be nonempty");
  Eval e{w, static_cast<int>(w.prefix.size()),
         static_cast<int>(w.period.size()),
         static_cast<int>(w.prefix.size() + w.period.size()),
         {}};
  return e.values(f)[0] != 0;
}

}  // namespace abocs::oracle
