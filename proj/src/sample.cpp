#include "tailest/sample.hpp"

#include <algorithm>
#include <cmath>

#include "tailest/error.hpp"

namespace tailest {

namespace {

void validate_positive_finite(const std::vector<double>& values) {
    if (values.empty()) {
        throw DomainError("sample must contain at least one value");
    }
    for (double v : values) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw DomainError("sample values must be strictly positive and finite");
        }
    }
}

} // namespace

SortedSample SortedSample::from_unsorted(std::vector<double> values) {
    validate_positive_finite(values);
    std::sort(values.begin(), values.end());
    return SortedSample(std::move(values));
}

SortedSample SortedSample::from_sorted(std::vector<double> values) {
    validate_positive_finite(values);
    if (!std::is_sorted(values.begin(), values.end())) {
        throw DomainError("values passed as sorted are not ascending");
    }
    return SortedSample(std::move(values));
}

} // namespace tailest
