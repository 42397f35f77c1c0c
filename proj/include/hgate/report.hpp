#pragma once

#include <string>
#include <vector>

#include "hgate/bifurcation.hpp"
#include "hgate/conditions.hpp"
#include "hgate/variational.hpp"

namespace hgate {

/// JSON serialization of a condition report (UTF-8, keys sorted).
std::string condition_report_json(const ConditionReport& rep,
                                  const VariationalFrame& frame,
                                  const std::string& config_json = "{}");

/// Human-readable table of the same report.
std::string condition_report_text(const ConditionReport& rep);

std::string scan_json(const BifurcationScan& scan);

// ---- CSV writers (RFC 4180: CRLF line ends, plain numeric fields) --------

std::string orbit_csv(const HomoclinicOrbit& orbit, double T, double dt);
std::string frame_csv(const VariationalFrame& frame);
std::string scan_csv(const BifurcationScan& scan);
struct SweepRow {
  double epsilon;
  double distance;
  bool converged;
};
std::string sweep_csv(const std::vector<SweepRow>& rows);

void write_file(const std::string& path, const std::string& content);

}  // namespace hgate
