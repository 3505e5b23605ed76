#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "maq/degeneration.hpp"
#include "maq/field2d.hpp"
#include "maq/surface_patch.hpp"

namespace maq {

// Round-trip-exact decimal rendering of a 64-bit float (17 significant digits).
std::string format_double(double v);

// Row-major CSV with a five-value header line: nx, ny, x0, y0, h. One line
// per y level, x ascending within the line.
void write_field_csv(const ScalarField2D& field, const std::string& path);
ScalarField2D read_field_csv(const std::string& path);

// JSON envelope: grid metadata plus row-major values.
nlohmann::json field_to_json(const ScalarField2D& field);
ScalarField2D field_from_json(const nlohmann::json& doc);

// Node rows: s, t, x, y, z, nx, ny, nz.
void write_patch_csv(const SurfacePatch& patch, const std::string& path);
void write_lift_csv(const LiftedPatch& lift, const std::string& path);

// Parameter-grid metadata and catalog expectations.
nlohmann::json patch_meta_json(const SurfacePatch& patch);

// Rows: parameter, C0, C1, maxII.
void write_convergence_csv(const ConvergenceReport& report, const std::string& path);
nlohmann::json convergence_to_json(const ConvergenceReport& report);

struct CheckRecord {
  std::string name;
  bool pass = false;
  double measured = 0;
  double tolerance = 0;
  std::string provenance;  // short note on where the expectation comes from
};

struct SuiteReport {
  std::string command;
  std::vector<CheckRecord> records;

  bool all_pass() const {
    for (const auto& r : records)
      if (!r.pass) return false;
    return true;
  }
  void add(const std::string& name, bool pass, double measured, double tolerance,
           const std::string& provenance) {
    records.push_back({name, pass, measured, tolerance, provenance});
  }
  // pass iff measured <= tolerance
  void add_bound(const std::string& name, double measured, double tolerance,
                 const std::string& provenance) {
    records.push_back({name, measured <= tolerance, measured, tolerance, provenance});
  }
  // pass iff measured >= threshold
  void add_floor(const std::string& name, double measured, double threshold,
                 const std::string& provenance) {
    records.push_back({name, measured >= threshold, measured, threshold, provenance});
  }
};

nlohmann::json report_to_json(const SuiteReport& report);
void write_report_json(const SuiteReport& report, const nlohmann::json& outputs,
                       const std::string& path);

}  // namespace maq
