#include "loopsoup/report.hpp"

#include "loopsoup/error.hpp"
#include "loopsoup/stats.hpp"

#include <cmath>
#include <sstream>

namespace loopsoup {

namespace {

nlohmann::json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v))
    return nullptr;
  return *v;
}

nlohmann::json finite_or_string(double v) {
  if (std::isfinite(v))
    return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string kind_name(StatKind k) {
  switch (k) {
  case StatKind::ZScore: return "z";
  case StatKind::Distance: return "distance";
  case StatKind::Exact: return "exact";
  }
  return "?";
}

} // namespace

Statistic &Report::add_z(std::string name, double lhs, double rhs, double stderr_,
                         double threshold) {
  Statistic s;
  s.name = std::move(name);
  s.kind = StatKind::ZScore;
  s.lhs = lhs;
  s.rhs = rhs;
  s.stderr_ = stderr_;
  s.z = z_score(lhs, stderr_, rhs, 0.0);
  s.threshold = threshold;
  s.pass = std::abs(*s.z) < threshold;
  stats_.push_back(std::move(s));
  return stats_.back();
}

Statistic &Report::add_distance(std::string name, double distance, double threshold) {
  Statistic s;
  s.name = std::move(name);
  s.kind = StatKind::Distance;
  s.lhs = distance;
  s.rhs = threshold;
  s.threshold = threshold;
  s.pass = distance < threshold;
  stats_.push_back(std::move(s));
  return stats_.back();
}

Statistic &Report::add_exact(std::string name, double lhs, double rhs, double tolerance) {
  Statistic s;
  s.name = std::move(name);
  s.kind = StatKind::Exact;
  s.lhs = lhs;
  s.rhs = rhs;
  s.threshold = tolerance;
  s.pass = std::abs(lhs - rhs) <= tolerance;
  stats_.push_back(std::move(s));
  return stats_.back();
}

const Statistic &Report::find(const std::string &name) const {
  for (const auto &s : stats_)
    if (s.name == name)
      return s;
  throw Error(Errc::BadInput, "report '" + check_ + "' has no statistic '" + name + "'");
}

bool Report::passed() const {
  for (const auto &s : stats_)
    if (s.gated && !s.pass)
      return false;
  return true;
}

nlohmann::json Report::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &s : stats_) {
    nlohmann::json row{{"statistic", s.name},
                       {"kind", kind_name(s.kind)},
                       {"lhs", finite_or_string(s.lhs)},
                       {"rhs", finite_or_string(s.rhs)},
                       {"stderr", number_or_null(s.stderr_)},
                       {"z", number_or_null(s.z)},
                       {"threshold", s.threshold},
                       {"pass", s.pass},
                       {"gated", s.gated}};
    if (!s.note.empty())
      row["note"] = s.note;
    rows.push_back(std::move(row));
  }
  return {{"check", check_}, {"pass", passed()}, {"statistics", rows}, {"meta", meta_}};
}

std::string Report::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "check,statistic,kind,lhs,rhs,stderr,z,threshold,pass,gated\n";
  for (const auto &s : stats_) {
    out << check_ << ',' << s.name << ',' << kind_name(s.kind) << ',' << s.lhs << ','
        << s.rhs << ',';
    if (s.stderr_)
      out << *s.stderr_;
    out << ',';
    if (s.z)
      out << *s.z;
    out << ',' << s.threshold << ',' << (s.pass ? "true" : "false") << ','
        << (s.gated ? "true" : "false") << '\n';
  }
  return out.str();
}

} // namespace loopsoup
