#pragma once

#include <string>

namespace wirewall {

/// A measured quantity against an upper bound; passes when
/// measured <= bound + tolerance.
struct BoundCheck {
  std::string name;
  double measured{0.0};
  double bound{0.0};
  double tolerance{0.0};

  double margin() const { return bound - measured; }
  bool pass() const { return margin() >= -tolerance; }
};

inline BoundCheck make_check(std::string name, double measured, double bound, double tolerance = 0.0) {
  return {std::move(name), measured, bound, tolerance};
}

}  // namespace wirewall
