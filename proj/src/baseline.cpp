#include "mfrail/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "mfrail/error.hpp"

namespace mfrail {

BaselineFunction::BaselineFunction(std::vector<double> jump_times,
                                   std::vector<double> jump_sizes)
    : times_(std::move(jump_times)), sizes_(std::move(jump_sizes)) {
  if (times_.size() != sizes_.size())
    throw ParameterError("baseline: jump_times and jump_sizes differ in length");
  cumulative_.resize(times_.size());
  double acc = 0.0;
  for (std::size_t q = 0; q < times_.size(); ++q) {
    if (!(times_[q] >= 0.0) || (q > 0 && !(times_[q] > times_[q - 1])))
      throw ParameterError("baseline: jump times must be nonnegative and strictly increasing");
    if (!(sizes_[q] > 0.0) || !std::isfinite(sizes_[q]))
      throw ParameterError("baseline: jump sizes must be positive and finite");
    acc += sizes_[q];
    cumulative_[q] = acc;
  }
}

BaselineFunction BaselineFunction::from_cumulative(std::vector<double> jump_times,
                                                   const std::vector<double>& cumulative) {
  std::vector<double> sizes(cumulative.size());
  double prev = 0.0;
  for (std::size_t q = 0; q < cumulative.size(); ++q) {
    sizes[q] = cumulative[q] - prev;
    prev = cumulative[q];
  }
  return BaselineFunction(std::move(jump_times), std::move(sizes));
}

std::size_t BaselineFunction::count_le(double t) const {
  return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) -
                                  times_.begin());
}

double BaselineFunction::operator()(double t) const {
  const std::size_t k = count_le(t);
  return k == 0 ? 0.0 : cumulative_[k - 1];
}

double BaselineFunction::jump_at(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t) return 0.0;
  return sizes_[static_cast<std::size_t>(it - times_.begin())];
}

}  // namespace mfrail
