#pragma once

#include <span>

namespace tailest {

// Pairwise (cascade) summation: O(log n) error growth instead of O(n), and a
// fixed summation tree, so the result depends only on the values and their
// indices — never on chunking or thread count.  Used everywhere a sum feeds a
// determinism or tight-tolerance contract.
double pairwise_sum(std::span<const double> v);

inline double pairwise_mean(std::span<const double> v) {
    return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

} // namespace tailest
