#pragma once

#include <cmath>
#include <cstddef>

namespace longtie {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sample mean with a normal-approximation 95% confidence interval.
struct MeanCi {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1 denominator)
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool present() const { return n > 0; }
};

/// Accumulates values and produces a MeanCi. Two-pass free: keeps compensated
/// sums of x and x^2 relative to the first value to limit cancellation.
class MeanAccumulator {
 public:
  void add(double x) {
    if (n_ == 0) shift_ = x;
    ++n_;
    sum_.add(x - shift_);
    sq_.add((x - shift_) * (x - shift_));
  }
  std::size_t count() const { return n_; }
  MeanCi result() const;

 private:
  std::size_t n_ = 0;
  double shift_ = 0.0;
  CompensatedSum sum_;
  CompensatedSum sq_;
};

inline MeanCi MeanAccumulator::result() const {
  MeanCi r;
  r.n = n_;
  if (n_ == 0) return r;
  const double n = static_cast<double>(n_);
  const double d = sum_.value() / n;
  r.mean = shift_ + d;
  if (n_ > 1) {
    double var = (sq_.value() - n * d * d) / (n - 1.0);
    r.sd = var > 0 ? std::sqrt(var) : 0.0;
  }
  const double half = 1.96 * r.sd / std::sqrt(n);
  r.ci_low = r.mean - half;
  r.ci_high = r.mean + half;
  return r;
}

}  // namespace longtie
