#pragma once

#include <algorithm>
#include <iterator>

#include "semprune/error.hpp"

namespace semprune::stats {

template <typename T>
double dice(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::EmptySet, "dice coefficient needs two nonempty sets");
  }
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

}  // namespace semprune::stats
