#pragma once

#include <cstddef>
#include <vector>

namespace tailest {

// An ascending-sorted sample of strictly positive values.  All estimators in
// the toolkit consume order statistics, so sortedness and positivity are
// enforced once here instead of in every routine.  Ties are allowed (they
// yield zero log-spacings downstream).
class SortedSample {
public:
    SortedSample() = default;

    // Sorts the input.  Throws DomainError if empty or any value is not a
    // strictly positive finite number.
    static SortedSample from_unsorted(std::vector<double> values);

    // Validates that the input is already ascending (non-strict).
    static SortedSample from_sorted(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }

    // X_{i,n}: the i-th smallest value, 1-indexed as in the usual order
    // statistic notation.  No bounds check beyond the debug assert; callers
    // validate k against n.
    double order_stat(std::size_t i) const { return values_[i - 1]; }

    const std::vector<double>& values() const noexcept { return values_; }

private:
    explicit SortedSample(std::vector<double> v) : values_(std::move(v)) {}

    std::vector<double> values_;
};

} // namespace tailest
