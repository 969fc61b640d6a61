#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace lplab {

// Located roots of a scalar function on an interval, each with a bracketing
// certificate: an interval whose endpoints have opposite function signs.
struct RootSet {
  std::vector<double> roots;                    // sorted ascending
  std::vector<std::array<double, 2>> brackets;  // [lo, hi] per root
  std::vector<double> residuals;                // |f(root)| per root

  std::size_t size() const { return roots.size(); }
  bool empty() const { return roots.empty(); }
};

}  // namespace lplab
