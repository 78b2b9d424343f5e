#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace abocs {

/* Sorted set of dense integer ids. Deterministic iteration order by
 * construction; all domain objects (states, inputs, outputs, automaton
 * states) are referred to by such ids. */
class IdSet {
 public:
  IdSet() = default;
  IdSet(std::initializer_list<int> xs) : v_(xs) { normalize(); }
  explicit IdSet(std::vector<int> xs) : v_(std::move(xs)) { normalize(); }

  static IdSet range(int n) {
    IdSet s;
    s.v_.resize(n);
    for (int i = 0; i < n; ++i) s.v_[i] = i;
    return s;
  }

  bool contains(int x) const {
    return std::binary_search(v_.begin(), v_.end(), x);
  }
  void insert(int x) {
    auto it = std::lower_bound(v_.begin(), v_.end(), x);
    if (it == v_.end() || *it != x) v_.insert(it, x);
  }
  void erase(int x) {
    auto it = std::lower_bound(v_.begin(), v_.end(), x);
    if (it != v_.end() && *it == x) v_.erase(it);
  }

  bool empty() const { return v_.empty(); }
  std::size_t size() const { return v_.size(); }
  int front() const { return v_.front(); }
  int operator[](std::size_t i) const { return v_[i]; }

  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }
  const std::vector<int>& items() const { return v_; }

  bool operator==(const IdSet&) const = default;
  bool operator<(const IdSet& o) const { return v_ < o.v_; }

  bool subset_of(const IdSet& o) const {
    return std::includes(o.v_.begin(), o.v_.end(), v_.begin(), v_.end());
  }

  friend IdSet set_union(const IdSet& a, const IdSet& b) {
    IdSet r;
    std::set_union(a.v_.begin(), a.v_.end(), b.v_.begin(), b.v_.end(),
                   std::back_inserter(r.v_));
    return r;
  }
  friend IdSet set_intersect(const IdSet& a, const IdSet& b) {
    IdSet r;
    std::set_intersection(a.v_.begin(), a.v_.end(), b.v_.begin(), b.v_.end(),
                          std::back_inserter(r.v_));
    return r;
  }
  friend IdSet set_minus(const IdSet& a, const IdSet& b) {
    IdSet r;
    std::set_difference(a.v_.begin(), a.v_.end(), b.v_.begin(), b.v_.end(),
                        std::back_inserter(r.v_));
    return r;
  }

 private:
  void normalize() {
    std::sort(v_.begin(), v_.end());
    v_.erase(std::unique(v_.begin(), v_.end()), v_.end());
  }
  std::vector<int> v_;
};

/* Name <-> dense id table. Ids are assigned in declaration order and are
 * stable, which keeps every serialization deterministic. */
class SymbolTable {
 public:
  int intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }
  int lookup(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }
  int require(const std::string& name) const {
    int id = lookup(name);
    if (id < 0) throw std::out_of_range("unknown symbol: " + name);
    return id;
  }
  const std::string& name(int id) const { return names_.at(id); }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const SymbolTable& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
};

}  // namespace abocs
