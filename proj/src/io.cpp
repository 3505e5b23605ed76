#include "maq/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace maq {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write " + path);
  return out;
}

}  // namespace

void write_field_csv(const ScalarField2D& field, const std::string& path) {
  std::ofstream out = open_out(path);
  const GridSpec& g = field.grid();
  out << "nx,ny,x0,y0,h\n";
  out << g.nx << ',' << g.ny << ',' << format_double(g.x0) << ','
      << format_double(g.y0) << ',' << format_double(g.h) << '\n';
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) out << ',';
      out << format_double(field(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoFailure("write failed: " + path);
}

ScalarField2D read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoFailure("empty field csv");
  GridSpec g;
  if (!std::getline(in, line)) throw IoFailure("missing header values");
  {
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    g.nx = std::stoi(tok);
    std::getline(ss, tok, ',');
    g.ny = std::stoi(tok);
    std::getline(ss, tok, ',');
    g.x0 = std::stod(tok);
    std::getline(ss, tok, ',');
    g.y0 = std::stod(tok);
    std::getline(ss, tok, ',');
    g.h = std::stod(tok);
  }
  ScalarField2D field(g);
  for (int j = 0; j < g.ny; ++j) {
    if (!std::getline(in, line)) throw IoFailure("truncated field csv");
    std::stringstream ss(line);
    std::string tok;
    for (int i = 0; i < g.nx; ++i) {
      if (!std::getline(ss, tok, ',')) throw IoFailure("short row in field csv");
      field(i, j) = std::stod(tok);
    }
  }
  return field;
}

nlohmann::json field_to_json(const ScalarField2D& field) {
  const GridSpec& g = field.grid();
  std::vector<double> values;
  values.reserve(static_cast<size_t>(g.nx) * g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) values.push_back(field(i, j));
  return {{"nx", g.nx}, {"ny", g.ny}, {"x0", g.x0},
          {"y0", g.y0}, {"h", g.h},   {"values", values}};
}

ScalarField2D field_from_json(const nlohmann::json& doc) {
  GridSpec g;
  g.nx = doc.at("nx").get<int>();
  g.ny = doc.at("ny").get<int>();
  g.x0 = doc.at("x0").get<double>();
  g.y0 = doc.at("y0").get<double>();
  g.h = doc.at("h").get<double>();
  const auto values = doc.at("values").get<std::vector<double>>();
  if (values.size() != static_cast<size_t>(g.nx) * g.ny)
    throw IoFailure("field json: value count mismatch");
  ScalarField2D field(g);
  size_t k = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) field(i, j) = values[k++];
  return field;
}

void write_patch_csv(const SurfacePatch& patch, const std::string& path) {
  std::ofstream out = open_out(path);
  const PatchFrames fr = patch_frames(patch);
  const GridSpec& g = patch.param;
  out << "s,t,x,y,z,nx,ny,nz\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec3& p = patch.pos(i, j);
      const Vec3& n = fr.normal[fr.idx(i, j)];
      out << format_double(g.x(i)) << ',' << format_double(g.y(j)) << ','
          << format_double(p(0)) << ',' << format_double(p(1)) << ','
          << format_double(p(2)) << ',' << format_double(n(0)) << ','
          << format_double(n(1)) << ',' << format_double(n(2)) << '\n';
    }
  }
  if (!out) throw IoFailure("write failed: " + path);
}

void write_lift_csv(const LiftedPatch& lift, const std::string& path) {
  std::ofstream out = open_out(path);
  const GridSpec& g = lift.grid;
  out << "s,t,x,y,z,nx,ny,nz\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec3& p = lift.base[lift.idx(i, j)];
      const Vec3& n = lift.vec[lift.idx(i, j)];
      out << format_double(g.x(i)) << ',' << format_double(g.y(j)) << ','
          << format_double(p(0)) << ',' << format_double(p(1)) << ','
          << format_double(p(2)) << ',' << format_double(n(0)) << ','
          << format_double(n(1)) << ',' << format_double(n(2)) << '\n';
    }
  }
  if (!out) throw IoFailure("write failed: " + path);
}

nlohmann::json patch_meta_json(const SurfacePatch& patch) {
  const GridSpec& g = patch.param;
  nlohmann::json doc = {{"nx", g.nx},       {"ny", g.ny}, {"s0", g.x0},
                        {"t0", g.y0},       {"h", g.h},
                        {"orientation", patch.orientation}};
  if (patch.expected_extrinsic_curvature)
    doc["expected_K"] = *patch.expected_extrinsic_curvature;
  if (patch.expected_shape_eigenvalues)
    doc["expected_shape_eigenvalues"] = {(*patch.expected_shape_eigenvalues)(0),
                                         (*patch.expected_shape_eigenvalues)(1)};
  return doc;
}

nlohmann::json convergence_to_json(const ConvergenceReport& report) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : report.steps) {
    steps.push_back({{"index", s.index},
                     {"parameter", s.parameter},
                     {"C0", s.c0},
                     {"C1", s.c1},
                     {"maxII", s.max_ii},
                     {"verdict", s.verdict == Verdict::TubeLike      ? "tube-like"
                                 : s.verdict == Verdict::SurfaceLike ? "surface-like"
                                                                     : "diverged"}});
  }
  return {{"family", report.kind == FamilyKind::Equidistant
                         ? "equidistant"
                         : "translated-horospheres"},
          {"steps", steps}};
}

void write_convergence_csv(const ConvergenceReport& report,
                           const std::string& path) {
  std::ofstream out = open_out(path);
  out << "parameter,C0,C1,maxII\n";
  for (const auto& s : report.steps) {
    out << format_double(s.parameter) << ',' << format_double(s.c0) << ','
        << format_double(s.c1) << ',' << format_double(s.max_ii) << '\n';
  }
  if (!out) throw IoFailure("write failed: " + path);
}

nlohmann::json report_to_json(const SuiteReport& report) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : report.records) {
    recs.push_back({{"name", r.name},
                    {"status", r.pass ? "pass" : "fail"},
                    {"measured", r.measured},
                    {"tolerance", r.tolerance},
                    {"provenance", r.provenance}});
  }
  return {{"command", report.command},
          {"records", recs},
          {"overall", report.all_pass() ? "pass" : "fail"}};
}

void write_report_json(const SuiteReport& report, const nlohmann::json& outputs,
                       const std::string& path) {
  nlohmann::json doc = report_to_json(report);
  if (!outputs.is_null()) doc["outputs"] = outputs;
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace maq
