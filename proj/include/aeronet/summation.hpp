#ifndef AERONET_SUMMATION_HPP
#define AERONET_SUMMATION_HPP

#include <algorithm>
#include <vector>

namespace aeronet {

/// Kahan compensated accumulator.
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

/// Compensated sum over a value-sorted copy of the input: the result depends
/// only on the multiset of values, never on their arrival order.
inline double canonical_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  KahanSum acc;
  for (double v : values) acc.add(v);
  return acc.sum;
}

}  // namespace aeronet

#endif
