#pragma once

namespace lesionbox::detail {

// Compensated (Kahan) accumulator; keeps reductions stable and effectively
// independent of summation order.
class KahanSum {
public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

} // namespace lesionbox::detail
