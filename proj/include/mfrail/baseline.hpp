#pragma once

#include <vector>

namespace mfrail {

// Right-continuous nondecreasing step function with Lambda(0) = 0 and jumps
// only at `jump_times`.
class BaselineFunction {
 public:
  BaselineFunction() = default;

  // Throws ParameterError unless times are strictly increasing and
  // nonnegative, and sizes are positive, finite and of matching length.
  BaselineFunction(std::vector<double> jump_times,
                   std::vector<double> jump_sizes);

  // Step function taking the value cumulative[q] from jump_times[q] on.
  static BaselineFunction from_cumulative(std::vector<double> jump_times,
                                          const std::vector<double>& cumulative);

  double operator()(double t) const;

  // Jump size at exactly `t`, zero when `t` is not a jump time.
  double jump_at(double t) const;

  // Number of jump times <= t.
  std::size_t count_le(double t) const;

  const std::vector<double>& jump_times() const { return times_; }
  const std::vector<double>& jump_sizes() const { return sizes_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  std::size_t size() const { return times_.size(); }

 private:
  std::vector<double> times_;
  std::vector<double> sizes_;
  std::vector<double> cumulative_;
};

}  // namespace mfrail
