#pragma once

#include <cmath>

namespace slcomm::detail {

/// x^e for x >= 0 with shortcuts for the exponents the mirror maps hit most.
inline double fast_pow(double x, double e) noexcept {
  if (e == 1.0) return x;
  if (e == 2.0) return x * x;
  if (e == 0.5) return std::sqrt(x);
  if (e == 3.0) return x * x * x;
  if (e == 1.5) return x * std::sqrt(x);
  if (e == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  if (e == 0.0) return 1.0;
  return std::pow(x, e);
}

inline double sign_of(double x) noexcept {
  return static_cast<double>((x > 0.0) - (x < 0.0));
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace slcomm::detail
