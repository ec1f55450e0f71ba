#pragma once

#include <string>
#include <vector>

namespace comsyn {

// Sorts of the specification term language: the two builtin scalar sorts,
// uninterpreted sorts declared in a spec preamble, finite sets, and arrays.
struct Sort {
  enum class Kind { Bool, Int, Named, Set, Array };

  Kind kind = Kind::Bool;
  std::string name;          // Named only
  std::vector<Sort> params;  // Set: [element], Array: [index, value]

  static Sort boolean() { return Sort{Kind::Bool, "", {}}; }
  static Sort integer() { return Sort{Kind::Int, "", {}}; }
  static Sort named(std::string n) { return Sort{Kind::Named, std::move(n), {}}; }
  static Sort set(Sort elem) { return Sort{Kind::Set, "", {std::move(elem)}}; }
  static Sort array(Sort index, Sort value) {
    return Sort{Kind::Array, "", {std::move(index), std::move(value)}};
  }

  bool is_bool() const { return kind == Kind::Bool; }
  bool is_int() const { return kind == Kind::Int; }

  // SMT-LIB spelling: Bool, Int, E, (Set E), (Array E F).
  std::string str() const;

  int cmp(const Sort& o) const;
  bool operator==(const Sort& o) const { return cmp(o) == 0; }
  bool operator!=(const Sort& o) const { return cmp(o) != 0; }
  bool operator<(const Sort& o) const { return cmp(o) < 0; }
};

}  // namespace comsyn
