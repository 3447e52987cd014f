#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace loopsoup {

enum class StatKind {
  ZScore,   ///< |lhs - rhs| / stderr compared to threshold
  Distance, ///< lhs is a distance (KS, TV), rhs the threshold
  Exact,    ///< |lhs - rhs| compared to an absolute tolerance
};

struct Statistic {
  std::string name;
  StatKind kind = StatKind::ZScore;
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<double> stderr_;
  std::optional<double> z;
  double threshold = 3.0;
  bool pass = false;
  /// Ungated statistics are reported for audit but do not affect passed().
  bool gated = true;
  std::string note;
};

/// Outcome of one verification: a list of statistics plus free-form
/// metadata (conventions, sample sizes, budgets).
class Report {
public:
  explicit Report(std::string check) : check_(std::move(check)) {}

  Statistic &add_z(std::string name, double lhs, double rhs, double stderr_,
                   double threshold = 3.0);
  Statistic &add_distance(std::string name, double distance, double threshold);
  Statistic &add_exact(std::string name, double lhs, double rhs, double tolerance);

  const std::string &check() const noexcept { return check_; }
  const std::vector<Statistic> &statistics() const noexcept { return stats_; }
  const Statistic &find(const std::string &name) const;
  nlohmann::json &meta() noexcept { return meta_; }
  const nlohmann::json &meta() const noexcept { return meta_; }

  bool passed() const;
  nlohmann::json to_json() const;
  /// statistic,kind,lhs,rhs,stderr,z,threshold,pass,gated rows.
  std::string to_csv() const;

private:
  std::string check_;
  std::vector<Statistic> stats_;
  nlohmann::json meta_ = nlohmann::json::object();
};

} // namespace loopsoup
