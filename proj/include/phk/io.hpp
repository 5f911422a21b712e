#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phk/bubble.hpp"
#include "phk/common.hpp"
#include "phk/dbar.hpp"
#include "phk/decay.hpp"
#include "phk/grid.hpp"
#include "phk/hyperbolic.hpp"
#include "phk/sample.hpp"

namespace phk {

using nlohmann::json;

namespace io {

// atomic write: stage into a sibling temp file, then rename
inline void write_file(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw io_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw io_error("rename failed: " + path + ": " + ec.message());
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- grid descriptors ------------------------------------------------------

inline json grid_descriptor(const Grid& g, int target_dim) {
  json j;
  j["kind"] = kind_name(g.kind());
  switch (g.kind()) {
    case GridKind::Disk:
    case GridKind::HalfDisk: j["params"] = {g.param0()}; break;
    default: j["params"] = {g.param0(), g.param1()}; break;
  }
  j["resolution"] = {g.n0(), g.n1()};
  j["target_dim"] = target_dim;
  return j;
}

inline std::pair<Grid, int> parse_grid_descriptor(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  std::vector<double> params = j.at("params").get<std::vector<double>>();
  std::vector<int> res = j.at("resolution").get<std::vector<int>>();
  int n = j.at("target_dim").get<int>();
  require(res.size() == 2, "resolution must list two counts");
  if (kind == "disk") {
    require(params.size() == 1, "disk takes one parameter");
    return {Grid::disk(params[0], res[0], res[1]), n};
  }
  if (kind == "halfdisk") {
    require(params.size() == 1, "halfdisk takes one parameter");
    return {Grid::half_disk(params[0], res[0], res[1]), n};
  }
  require(params.size() == 2, "two parameters expected");
  if (kind == "annulus") return {Grid::annulus(params[0], params[1], res[0], res[1]), n};
  if (kind == "cylinder") return {Grid::cylinder(params[0], params[1], res[0], res[1]), n};
  if (kind == "strip") return {Grid::strip(params[0], params[1], res[0], res[1]), n};
  throw invalid_input("unknown grid kind: " + kind);
}

// ---- map samples as CSV ----------------------------------------------------

// header t,theta,re0,im0[,re1,im1,...]; one row per node in row-major order
// (axis 0 outer). The companion grid descriptor JSON carries kind/resolution.
inline std::string map_to_csv(const MapSample& u) {
  const Grid& g = u.grid();
  const int n = u.target_dim();
  std::string out = "t,theta";
  for (int c = 0; c < n; ++c)
    out += ",re" + std::to_string(c) + ",im" + std::to_string(c);
  out += "\n";
  for (int i0 = 0; i0 < g.n0(); ++i0)
    for (int i1 = 0; i1 < g.n1(); ++i1) {
      out += fmt(g.coord0(i0)) + "," + fmt(g.coord1(i1));
      const complexd* v = u.at(g.index(i0, i1));
      for (int c = 0; c < n; ++c) out += "," + fmt(v[c].real()) + "," + fmt(v[c].imag());
      out += "\n";
    }
  return out;
}

inline void write_map(const std::string& csv_path, const std::string& descriptor_path,
                      const MapSample& u) {
  write_file(csv_path, map_to_csv(u));
  write_file(descriptor_path, grid_descriptor(u.grid(), u.target_dim()).dump(2) + "\n");
}

inline MapSample read_map(const std::string& csv_path, const std::string& descriptor_path) {
  json desc = json::parse(read_file(descriptor_path));
  auto [grid, n] = parse_grid_descriptor(desc);
  std::istringstream in(read_file(csv_path));
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty csv: " + csv_path);
  std::vector<complexd> values;
  values.reserve((std::size_t)grid.node_count() * n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(row, cell, ',')) nums.push_back(std::stod(cell));
    require((int)nums.size() == 2 + 2 * n, "csv row arity mismatch");
    for (int c = 0; c < n; ++c) values.emplace_back(nums[2 + 2 * c], nums[3 + 2 * c]);
  }
  require((int)values.size() == grid.node_count() * n, "csv row count mismatch");
  return MapSample(grid, n, std::move(values));
}

// ---- pants graphs and plumbing params --------------------------------------

inline json pants_graph_to_json(const PantsGraph& g) {
  json j;
  j["vertices"] = g.vertex_count();
  j["edges"] = json::array();
  for (const auto& e : g.edges()) j["edges"].push_back({{"v", {e.u, e.v}}, {"marked", e.marked}});
  j["tails"] = g.tails();
  j["marked_tails"] = g.marked_tails();
  return j;
}

inline PantsGraph pants_graph_from_json(const json& j) {
  std::vector<PantsGraph::Edge> edges;
  for (const auto& e : j.at("edges")) {
    auto v = e.at("v").get<std::vector<int>>();
    require(v.size() == 2, "edge endpoint pair expected");
    edges.push_back({v[0], v[1], e.value("marked", false)});
  }
  return PantsGraph(j.at("vertices").get<int>(), std::move(edges),
                    j.value("tails", std::vector<int>{}),
                    j.value("marked_tails", std::vector<int>{}));
}

inline json plumbing_to_json(const PlumbingParams& p) {
  json j;
  j["edge_lambda"] = json::array();
  for (const auto& l : p.edge_lambda) j["edge_lambda"].push_back({l.real(), l.imag()});
  j["tail_lambda"] = json::array();
  for (const auto& l : p.tail_lambda) j["tail_lambda"].push_back({l.real(), l.imag()});
  return j;
}

inline PlumbingParams plumbing_from_json(const json& j) {
  PlumbingParams p;
  for (const auto& l : j.value("edge_lambda", json::array()))
    p.edge_lambda.emplace_back(l.at(0).get<double>(), l.at(1).get<double>());
  for (const auto& l : j.value("tail_lambda", json::array()))
    p.tail_lambda.emplace_back(l.at(0).get<double>(), l.at(1).get<double>());
  return p;
}

// ---- reports ----------------------------------------------------------------

inline json family_report_to_json(const FamilyReport& r) {
  json j;
  j["valid"] = r.valid;
  j["degeneration_threshold"] = r.degeneration_threshold;
  j["edges"] = json::array();
  for (const auto& e : r.edges)
    j["edges"].push_back({{"edge", e.edge_index},
                          {"marked", e.marked},
                          {"neck_modulus", e.neck_modulus},
                          {"near_node", e.near_node}});
  j["problems"] = r.problems;
  return j;
}

inline json solve_report_to_json(const SolveReport& r) {
  return json{{"iterations", r.iterations},
              {"residual", r.residual},
              {"converged", r.converged},
              {"contraction", r.contraction}};
}

inline json decay_report_to_json(const DecayReport& r) {
  return json{{"segment_energies", r.segment_energies},
              {"fitted_rate", r.fitted_rate},
              {"tail_ok", r.tail_ok},
              {"tail_start", r.tail_start},
              {"envelope_violations", r.envelope_violations},
              {"removable", r.verdict == Removability::Removable},
              {"epsilon", r.epsilon},
              {"lambda_min", r.lambda_min}};
}

inline json strip_eigen_to_json(const StripEigenResult& r) {
  return json{{"eigenvalues", r.eigenvalues},
              {"zero_dimension", r.zero_dimension},
              {"lambda1", r.lambda1},
              {"gamma_w", r.gamma_w}};
}

inline json bubble_report_to_json(const BubbleReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back({p[0], p[1]});
  json centers = json::array();
  for (const auto& c : r.centers) centers.push_back({c[0], c[1]});
  return json{{"points", pts},      {"radii", r.radii},
              {"centers", centers}, {"subcase", r.subcase},
              {"profile_energy", r.profile_energy}, {"eps", r.eps}};
}

// ---- sequence families ------------------------------------------------------

// manifest: {"grid": "grid.json", "samples": ["u0.csv", ...]}
inline SequenceFamily read_family(const std::string& manifest_path) {
  json man = json::parse(read_file(manifest_path));
  std::filesystem::path dir = std::filesystem::path(manifest_path).parent_path();
  std::string grid_file = (dir / man.at("grid").get<std::string>()).string();
  std::vector<MapSample> members;
  for (const auto& s : man.at("samples"))
    members.push_back(read_map((dir / s.get<std::string>()).string(), grid_file));
  return SequenceFamily(std::move(members));
}

inline void write_family(const std::string& dir, const SequenceFamily& fam) {
  std::filesystem::create_directories(dir);
  json man;
  man["grid"] = "grid.json";
  man["samples"] = json::array();
  write_file((std::filesystem::path(dir) / "grid.json").string(),
             grid_descriptor(fam.grid(), fam.member(0).target_dim()).dump(2) + "\n");
  for (int i = 0; i < fam.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "u_%03d.csv", i);
    write_file((std::filesystem::path(dir) / name).string(), map_to_csv(fam.member(i)));
    man["samples"].push_back(name);
  }
  write_file((std::filesystem::path(dir) / "manifest.json").string(), man.dump(2) + "\n");
}

}  // namespace io
}  // namespace phk
