#include "nesots/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace nesots {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw OtError("length mismatch");
}

void require_circle_coords(std::span<const double> v) {
  for (double t : v)
    if (!(t >= 0.0 && t < 1.0)) throw OtError("coordinate out of [0,1)");
}

void require_exponent(int p) {
  if (p != 1 && p != 2) throw OtError("exponent must be 1 or 2");
}

// Sum of squared circular distances over a contiguous block; written so the
// loop vectorizes.
double squared_block(const double* x, const double* y, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    double d = std::abs(x[i] - y[i]);
    d = std::min(d, 1.0 - d);
    acc += d * d;
  }
  return acc;
}

// Cost of matching xs[i] with ys[(i + shift) % n]; gives up and returns a
// value > bound as soon as the partial sum exceeds it.
double shifted_cost_sq(const std::vector<double>& xs, const std::vector<double>& ys,
                       std::size_t shift, double bound) {
  constexpr std::size_t kChunk = 256;
  const std::size_t n = xs.size();
  const std::size_t split = n - shift;
  double acc = 0.0;
  for (std::size_t i = 0; i < split; i += kChunk) {
    acc += squared_block(xs.data() + i, ys.data() + shift + i, std::min(kChunk, split - i));
    if (acc > bound) return acc;
  }
  for (std::size_t i = split; i < n; i += kChunk) {
    acc += squared_block(xs.data() + i, ys.data() + (i - split), std::min(kChunk, n - i));
    if (acc > bound) return acc;
  }
  return acc;
}

Assignment from_shift(const std::vector<int>& src_order, const std::vector<int>& dst_order,
                      std::size_t shift) {
  const std::size_t n = src_order.size();
  Assignment a;
  a.perm.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) a.perm[src_order[i]] = dst_order[(i + shift) % n];
  return a;
}

std::vector<double> gather(std::span<const double> v, const std::vector<int>& order) {
  std::vector<double> out(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[i] = v[order[i]];
  return out;
}

}  // namespace

double circle_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

double line_cost(std::span<const double> src, std::span<const double> dst,
                 const Assignment& a, int p) {
  require_same_length(src.size(), dst.size());
  require_same_length(src.size(), a.perm.size());
  double c = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i)
    c += std::pow(std::abs(src[i] - dst[a.perm[i]]), p);
  return c;
}

double circle_cost(std::span<const double> src, std::span<const double> dst,
                   const Assignment& a, int p) {
  require_same_length(src.size(), dst.size());
  require_same_length(src.size(), a.perm.size());
  double c = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i)
    c += std::pow(circle_distance(src[i], dst[a.perm[i]]), p);
  return c;
}

std::vector<int> stable_argsort(std::span<const double> values) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  return idx;
}

Assignment solve_line(std::span<const double> src, std::span<const double> dst) {
  require_same_length(src.size(), dst.size());
  const auto so = stable_argsort(src);
  const auto dso = stable_argsort(dst);
  return from_shift(so, dso, 0);
}

int circle_median_shift(std::span<const double> xs, std::span<const double> ys) {
  require_same_length(xs.size(), ys.size());
  const int n = static_cast<int>(xs.size());
  if (n == 0) return 0;
  // D(t) = #{x <= t} - #{y <= t} is piecewise constant in [-n, n]; the
  // optimal cut level is its median under the Lebesgue measure on [0, 1).
  std::vector<double> weight(2 * n + 1, 0.0);
  std::size_t i = 0, j = 0;
  int level = 0;
  double t = 0.0;
  while (i < xs.size() || j < ys.size()) {
    const double next = (j >= ys.size() || (i < xs.size() && xs[i] <= ys[j])) ? xs[i] : ys[j];
    weight[level + n] += next - t;
    t = next;
    while (i < xs.size() && xs[i] == t) { ++level; ++i; }
    while (j < ys.size() && ys[j] == t) { --level; ++j; }
  }
  weight[level + n] += 1.0 - t;
  double acc = 0.0;
  int median = -n;
  for (int k = 0; k <= 2 * n; ++k) {
    acc += weight[k];
    if (acc >= 0.5) { median = k - n; break; }
  }
  // Sorted source i goes to sorted target i - median.
  return ((-median) % n + n) % n;
}

Assignment solve_circle(std::span<const double> src, std::span<const double> dst, int p) {
  require_same_length(src.size(), dst.size());
  require_exponent(p);
  require_circle_coords(src);
  require_circle_coords(dst);
  const std::size_t n = src.size();
  if (n == 0) return {};
  const auto so = stable_argsort(src);
  const auto dso = stable_argsort(dst);
  const auto xs = gather(src, so);
  const auto ys = gather(dst, dso);

  const auto k1 = static_cast<std::size_t>(circle_median_shift(xs, ys));
  if (p == 1) return from_shift(so, dso, k1);

  std::size_t best_k = k1;
  double best = shifted_cost_sq(xs, ys, k1, std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < n; ++k) {
    if (k == k1) continue;
    const double c = shifted_cost_sq(xs, ys, k, best - 1e-12);
    if (c < best - 1e-12) {
      best = c;
      best_k = k;
    }
  }
  return from_shift(so, dso, best_k);
}

std::vector<double> quantile_reduce(std::vector<double> values, std::size_t n) {
  const std::size_t m = values.size();
  if (n > m) throw OtError("cannot reduce " + std::to_string(m) + " values to " + std::to_string(n));
  std::sort(values.begin(), values.end());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = values[static_cast<std::size_t>((static_cast<double>(i) + 0.5) * static_cast<double>(m) /
                                             static_cast<double>(n))];
  return out;
}

}  // namespace nesots
