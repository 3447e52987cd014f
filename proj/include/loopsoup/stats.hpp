#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

namespace loopsoup {

/// Welford accumulator.
class RunningStats {
public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double stderr_mean() const noexcept {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

RunningStats summarize(const std::vector<double> &xs);

/// (a - b) / sqrt(se_a^2 + se_b^2); zero when both standard errors vanish
/// and the means agree.
double z_score(double a, double se_a, double b, double se_b);

/// sup |F_n - F| against an exact continuous CDF.
double ks_one_sample(std::vector<double> xs, const std::function<double(double)> &cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

template <class Key, class Cmp>
std::map<Key, double, Cmp> empirical_pmf(const std::vector<Key> &xs) {
  std::map<Key, double, Cmp> pmf;
  for (const auto &x : xs)
    pmf[x] += 1.0;
  for (auto &[k, v] : pmf)
    v /= static_cast<double>(xs.size());
  return pmf;
}

template <class Key>
std::map<Key, double> empirical_pmf(const std::vector<Key> &xs) {
  return empirical_pmf<Key, std::less<Key>>(xs);
}

/// Half the l1 distance; keys missing from one side count as zero mass
/// there.
template <class Key, class Cmp>
double total_variation(const std::map<Key, double, Cmp> &p,
                       const std::map<Key, double, Cmp> &q) {
  double sum = 0.0;
  for (const auto &[k, v] : p) {
    auto it = q.find(k);
    sum += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto &[k, v] : q)
    if (p.find(k) == p.end())
      sum += std::abs(v);
  return 0.5 * sum;
}

} // namespace loopsoup
