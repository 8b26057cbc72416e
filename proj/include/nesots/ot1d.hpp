#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace nesots {

class OtError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Balanced assignment between two equally sized point lists:
/// source index i is matched to target index perm[i].
struct Assignment {
  std::vector<int> perm;
};

/// Distance on the unit-length circle, min(|a - b|, 1 - |a - b|).
double circle_distance(double a, double b);

double line_cost(std::span<const double> src, std::span<const double> dst,
                 const Assignment& a, int p);
double circle_cost(std::span<const double> src, std::span<const double> dst,
                   const Assignment& a, int p);

/// Indices that sort values ascending; ties keep their original order.
std::vector<int> stable_argsort(std::span<const double> values);

/// n values standing in for m >= n samples: the order statistics
/// floor((i + 1/2) m / n) of the sorted input.
std::vector<double> quantile_reduce(std::vector<double> values, std::size_t n);

/// Monotone matching on the real line, optimal for every p >= 1.
Assignment solve_line(std::span<const double> src, std::span<const double> dst);

/// Cyclic shift k of the sorted matching (sorted source i goes to sorted
/// target (i + k) mod n) that is optimal for p = 1, obtained from the
/// weighted median of the counting-function difference.
int circle_median_shift(std::span<const double> sorted_src,
                        std::span<const double> sorted_dst);

/// Optimal assignment on the circle [0, 1) for p in {1, 2}.
/// p = 1 uses the median cut; p = 2 scans all cyclic shifts, starting from
/// the p = 1 shift and replacing it only on a strict improvement.
Assignment solve_circle(std::span<const double> src, std::span<const double> dst, int p);

}  // namespace nesots
