// phk: desk-scale analyses of pseudoholomorphic-curve machinery.
//
// Subcommands mirror the library modules: hyperbolic collar tables, plumbing
// validation, the Cauchy-Green transform diagnostics, the dbar solver,
// cylinder decay analysis, the strip eigenproblem, the three-strips scan,
// bubble detection over sample families, and corner integrability tables.
//
// Every run writes report.json (with the resolved config and library version
// embedded) plus CSV tables into --out; --svg adds deterministic line plots.
// Exit codes: 0 success, 1 invalid configuration, 2 numerical failure,
// 3 I/O failure.

#include <clocale>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phk/bubble.hpp"
#include "phk/calculus.hpp"
#include "phk/dbar.hpp"
#include "phk/decay.hpp"
#include "phk/hyperbolic.hpp"
#include "phk/io.hpp"
#include "phk/svg.hpp"
#include "phk/version.hpp"

using namespace phk;
using nlohmann::json;

namespace {

struct RunContext {
  json config;
  std::string out_dir;
  bool emit_svg = false;
  std::uint64_t seed = 1;

  std::string path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }

  void finish(json report) const {
    report["config"] = config;
    report["version"] = PHK_VERSION;
    report["seed"] = seed;
    io::write_file(path("report.json"), report.dump(2) + "\n");
  }
};

json load_config(const std::string& config_path) {
  if (config_path.empty()) return json::object();
  json j = json::parse(io::read_file(config_path));  // parse errors -> exit 1
  require(j.is_object(), "config must be a JSON object");
  return j;
}

std::string csv_row(const std::vector<double>& vals) {
  std::string out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ",";
    out += io::fmt(vals[i]);
  }
  return out + "\n";
}

// ---- collar ---------------------------------------------------------------

int run_collar(RunContext& ctx) {
  std::vector<double> lengths = ctx.config.value("lengths", std::vector<double>{0.25, 0.5, 1.0});
  double a_star = ctx.config.value("a_star", 2.0);
  std::string csv = "length,log_radius_upper,geodesic_bound,width,lower_bound\n";
  json rows = json::array();
  std::vector<SvgSeries> series(2);
  series[0].label = "log R upper";
  series[1].label = "collar width";
  for (double l : lengths) {
    double upper = collar_log_radius_upper(l);
    double geo = geodesic_annulus_log_radius_bound(l);
    json row{{"length", l}, {"log_radius_upper", upper}, {"geodesic_bound", geo}};
    std::vector<double> cells{l, upper, geo};
    if (l <= 1.0) {
      CollarSpec spec(l, a_star);
      double w = collar_width(spec);
      row["width"] = w;
      row["lower_bound"] = pi * pi / l - 2 * pi / a_star;
      cells.push_back(w);
      cells.push_back(pi * pi / l - 2 * pi / a_star);
      series[1].points.push_back({l, w});
    }
    series[0].points.push_back({l, upper});
    csv += csv_row(cells);
    rows.push_back(row);
  }
  io::write_file(ctx.path("collar.csv"), csv);
  if (ctx.emit_svg) io::emit_svg(series, ctx.path("collar.svg"));
  ctx.finish(json{{"rows", rows}, {"a_star", a_star}});
  return 0;
}

// ---- plumb ------------------------------------------------------------------

int run_plumb(RunContext& ctx) {
  json jgraph = ctx.config.value("graph", json());
  json jparams = ctx.config.value("params", json());
  PantsGraph graph = jgraph.is_null()
                         ? PantsGraph(2, {{0, 1, false}, {0, 1, false}, {0, 1, false}}, {}, {})
                         : io::pants_graph_from_json(jgraph);
  PlumbingParams params;
  if (jparams.is_null()) {
    double lam = std::exp(-1.0);
    params.edge_lambda.assign(graph.edges().size(), complexd(lam, 0));
    params.tail_lambda.assign(graph.boundary_count(), complexd(1, 0));
  } else {
    params = io::plumbing_from_json(jparams);
  }
  FamilyReport rep = validate_family(graph, params, ctx.config.value("degeneration_threshold", 10.0));
  json out = io::family_report_to_json(rep);
  out["teich_dimension"] = teich_dimension(graph);
  out["graph"] = io::pants_graph_to_json(graph);
  ctx.finish(out);
  return rep.valid ? 0 : 1;
}

// ---- cauchy ------------------------------------------------------------------

int run_cauchy(RunContext& ctx) {
  int res = ctx.config.value("resolution", 65);
  require(res >= 17 && res % 2 == 1, "resolution must be odd and >= 17");
  json out;
  std::string csv = "resolution,max_error_vs_zbar,l2_residual_bump\n";
  for (int r : {res, 2 * res - 1}) {
    Grid g = Grid::disk(1.0, r, r);
    MapSample one = MapSample::from_function(g, [](double, double) { return complexd(1, 0); });
    MapSample t1 = cauchy_transform(one);
    double worst = 0;
    for (int i0 = 0; i0 < g.n0(); ++i0)
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        double x = g.coord0(i0), y = g.coord1(i1);
        if (x * x + y * y >= 1.0) continue;
        worst = std::max(worst, std::abs(t1.value(g.index(i0, i1)) - complexd(x, -y)));
      }
    MapSample f = MapSample::from_function(g, [](double x, double y) {
      double d2 = x * x + (y - 0.1) * (y - 0.1);
      return complexd(1.0, 0.4) * std::exp(-d2 / (2 * 0.25 * 0.25));
    });
    MapSample rres = dbar_std(cauchy_transform(f));
    std::vector<complexd> diff(rres.values().size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = rres.values()[i] - f.values()[i];
    double resid = lp_norm_values(MapSample(g, 1, std::move(diff)), 2.0, Region::disk(g, 0, 0, 0.9));
    csv += csv_row({(double)r, worst, resid});
    out["levels"].push_back(json{{"resolution", r}, {"max_error_vs_zbar", worst},
                                 {"l2_residual_bump", resid}});
  }
  io::write_file(ctx.path("cauchy.csv"), csv);
  ctx.finish(out);
  return 0;
}

// ---- dbar-solve ---------------------------------------------------------------

int run_dbar_solve(RunContext& ctx) {
  int res = ctx.config.value("resolution", 65);
  double deviation = ctx.config.value("deviation", 0.1);
  double tol = ctx.config.value("tol", 1e-8);
  int max_iter = ctx.config.value("max_iter", 50);
  bool require_convergence = ctx.config.value("require_convergence", true);

  Grid g = Grid::disk(1.0, res, res);
  StructureField J = deviation == 0 ? StructureField::standard(g, 1)
                                    : structure_with_deviation(g, deviation);
  // manufactured problem: u_exact = T g_exact for a smooth source
  MapSample g_exact = MapSample::from_function(g, [](double x, double y) {
    complexd z(x, y);
    return std::conj(z) + 0.3 * z * std::conj(z) + complexd(0.2, 0.1);
  });
  MapSample u_exact = cauchy_transform(g_exact);
  MapSample bd = dbar_J(u_exact, J);
  MapSample bs = dbar_std(u_exact);
  std::vector<complexd> rhs_v(g_exact.values().size());
  for (std::size_t i = 0; i < rhs_v.size(); ++i)
    rhs_v[i] = g_exact.values()[i] + bd.values()[i] - bs.values()[i];
  MapSample rhs(g, 1, std::move(rhs_v));

  auto [u, rep] = neumann_solve(rhs, J, tol, max_iter);
  json out = io::solve_report_to_json(rep);
  out["deviation"] = J.max_deviation_from_standard();
  out["epsilon_p_at_c1"] = epsilon_p(1.0);
  ctx.finish(out);
  if (!rep.converged && require_convergence)
    throw numerical_error("dbar solve did not converge");
  return 0;
}

// ---- decay ---------------------------------------------------------------------

int run_decay(RunContext& ctx) {
  MapSample u = [&]() {
    if (ctx.config.contains("input")) {
      std::string csv = ctx.config.at("input").get<std::string>();
      std::string desc = ctx.config.at("descriptor").get<std::string>();
      return io::read_map(csv, desc);
    }
    int l = ctx.config.value("length", 8);
    std::vector<int> res = ctx.config.value("resolution", std::vector<int>{50 * l + 1, 64});
    require(res.size() == 2, "resolution must list two counts");
    json modes = ctx.config.value("modes", json::array({json::array({-1, 1.0, 0.0})}));
    Grid g = Grid::cylinder(0, l, res[0], res[1]);
    return MapSample::from_axis_function(g, 1, [&](double t, double th, complexd* out) {
      complexd s(0, 0);
      for (const auto& m : modes) {
        int k = m.at(0).get<int>();
        complexd c(m.at(1).get<double>(), m.at(2).get<double>());
        s += c * std::exp((double)k * complexd(t, th));
      }
      out[0] = s;
    });
  }();
  double eps = ctx.config.value("epsilon", 1.0);
  DecayConfig cfg;
  cfg.lambda_min = ctx.config.value("lambda_min", 0.0);
  DecayReport rep = removability_diagnostic(u, eps, cfg);

  json out = io::decay_report_to_json(rep);
  int l = (int)rep.segment_energies.size();
  if (l >= 4) {
    json ratios = json::array();
    for (int k = 2; k <= l - 1; ++k)
      ratios.push_back(three_segment_ratio(rep.segment_energies[k - 2],
                                           rep.segment_energies[k - 1],
                                           rep.segment_energies[k]));
    out["three_segment_ratios"] = ratios;
    out["gamma1"] = three_annuli_gamma();
  }

  std::string csv = "segment,energy\n";
  std::vector<SvgSeries> series(1);
  series[0].label = "log10 E_i";
  for (int i = 1; i <= l; ++i) {
    csv += csv_row({(double)i, rep.segment_energies[i - 1]});
    if (rep.segment_energies[i - 1] > 0)
      series[0].points.push_back({(double)i, std::log10(rep.segment_energies[i - 1])});
  }
  io::write_file(ctx.path("decay.csv"), csv);
  if (ctx.emit_svg && !series[0].points.empty()) io::emit_svg(series, ctx.path("decay.svg"));
  ctx.finish(out);
  return 0;
}

// ---- strip-eigen ------------------------------------------------------------------

int run_strip_eigen(RunContext& ctx) {
  std::vector<double> betas =
      ctx.config.value("betas", std::vector<double>{pi / 6, pi / 4, pi / 3, pi / 2});
  int N = ctx.config.value("N", 1000);
  TotallyRealSubspace w0 = TotallyRealSubspace::real_subspace(1);
  std::string csv = "beta,lambda1,gamma_w,zero_dimension\n";
  json rows = json::array();
  std::vector<SvgSeries> series(1);
  series[0].label = "lambda1(beta)";
  for (double beta : betas) {
    StripEigenResult res = strip_eigs(w0, TotallyRealSubspace::line(beta), N);
    csv += csv_row({beta, res.lambda1, res.gamma_w, (double)res.zero_dimension});
    json row = io::strip_eigen_to_json(res);
    row["beta"] = beta;
    rows.push_back(row);
    series[0].points.push_back({beta, res.lambda1});
  }
  io::write_file(ctx.path("strip_eigen.csv"), csv);
  if (ctx.emit_svg) io::emit_svg(series, ctx.path("strip_eigen.svg"));
  ctx.finish(json{{"rows", rows}, {"N", N}});
  return 0;
}

// ---- three-strips -------------------------------------------------------------------

int run_three_strips(RunContext& ctx) {
  std::vector<double> alphas =
      ctx.config.value("alphas", std::vector<double>{0.1, 0.5, 1.0, 1.5, 2.0});
  int grid = ctx.config.value("grid", 20);
  require(grid >= 2, "grid must be >= 2");
  std::string csv = "alpha,worst_ratio,bound,gap\n";
  json rows = json::array();
  bool all_hold = true;
  for (double alpha : alphas) {
    double worst = 0;
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        double a = -1.0 + 2.0 * i / (grid - 1);
        double b = -1.0 + 2.0 * j / (grid - 1);
        if (a == 0 && b == 0) continue;
        ThreeStripsResult r = three_strips_check(a, b, alpha);
        all_hold = all_hold && r.holds;
        worst = std::max(worst, r.ratio);
      }
    double bound = 2.0 / (1.0 + std::cosh(2 * alpha));
    csv += csv_row({alpha, worst, bound, bound - worst});
    rows.push_back(json{{"alpha", alpha}, {"worst_ratio", worst}, {"bound", bound}});
  }
  io::write_file(ctx.path("three_strips.csv"), csv);
  ctx.finish(json{{"rows", rows}, {"all_hold", all_hold}});
  if (!all_hold) throw numerical_error("three-strips bound violated");
  return 0;
}

// ---- bubble-scan ---------------------------------------------------------------------

int run_bubble_scan(RunContext& ctx) {
  SequenceFamily fam = [&]() {
    if (ctx.config.contains("manifest"))
      return io::read_family(ctx.config.at("manifest").get<std::string>());
    int res = ctx.config.value("resolution", 257);
    int members = ctx.config.value("members", 5);
    require(members >= 3, "synthetic family needs >= 3 members");
    Grid g = Grid::disk(1.0, res, res);
    std::vector<MapSample> ms;
    for (int n = 0; n < members; ++n) {
      double rn = std::pow(2.0, -n);
      ms.push_back(MapSample::from_function(g, [rn](double x, double y) {
        complexd z = complexd(x, y) / rn;
        double u = std::norm(z) / (1.5 * 1.5);
        if (u >= 1.0) return complexd(0, 0);
        double w = u * u * (1 - u) * (1 - u) * (1 - u);
        return 9.0 * z * w;
      }));
    }
    return SequenceFamily(std::move(ms));
  }();
  double eps = ctx.config.contains("epsilon") ? ctx.config.at("epsilon").get<double>()
                                              : energy(fam.member(std::min(1, fam.size() - 1))) / 5.0;
  double cap = ctx.config.value("cap", 0.9);
  BubbleReport rep = analyze_family(fam, eps, cap);
  std::string csv = "member,radius,center_x,center_y\n";
  for (std::size_t i = 0; i < rep.radii.size(); ++i)
    csv += csv_row({(double)i, rep.radii[i], rep.centers[i][0], rep.centers[i][1]});
  io::write_file(ctx.path("bubble.csv"), csv);
  if (ctx.emit_svg && !rep.radii.empty()) {
    std::vector<SvgSeries> series(1);
    series[0].label = "log2 radius";
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
      series[0].points.push_back({(double)i, std::log2(rep.radii[i])});
    io::emit_svg(series, ctx.path("bubble.svg"));
  }
  ctx.finish(io::bubble_report_to_json(rep));
  return 0;
}

// ---- corner --------------------------------------------------------------------------

int run_corner(RunContext& ctx) {
  double alpha = ctx.config.value("alpha", 0.5);
  std::vector<double> ps = ctx.config.value("ps", std::vector<double>{3.0, 5.0});
  int levels = ctx.config.value("levels", 6);
  require(levels >= 2 && levels <= 8, "levels must lie in [2,8]");
  double pstar = corner_sobolev_exponent(alpha);

  std::string csv = "level,inner_radius,p,lp_norm_du\n";
  json rows = json::array();
  for (int k = 1; k <= levels; ++k) {
    double inner = std::pow(4.0, -k);
    int nr = std::min(12000, (int)std::ceil(2.5 / inner)) + 1;
    Grid g = Grid::annulus(inner, 1.0, nr, 65);
    MapSample u = MapSample::from_axis_function(g, 1, [&](double r, double phi, complexd* out) {
      out[0] = std::pow(r, alpha) * std::polar(1.0, alpha * phi);
    });
    Region half = Region::rect(g, 0, g.n0() - 1, 0, 32);  // phi in [0, pi]
    for (double p : ps) {
      double norm = lp_norm_du(u, p, half);
      csv += csv_row({(double)k, inner, p, norm});
      rows.push_back(json{{"level", k}, {"inner_radius", inner}, {"p", p}, {"norm", norm}});
    }
  }
  io::write_file(ctx.path("corner.csv"), csv);
  ctx.finish(json{{"rows", rows},
                  {"alpha", alpha},
                  {"p_star", pstar},
                  {"boundary_decay_exponent_at_e_pi", boundary_decay_exponent(std::exp(pi))}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"desk-scale pseudoholomorphic curve analyses"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  bool svg = false;
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--svg", svg, "emit SVG plots");
  app.add_option("--seed", seed, "seed for randomized analyses");

  const char* names[] = {"collar",      "plumb",        "cauchy",      "dbar-solve", "decay",
                         "strip-eigen", "three-strips", "bubble-scan", "corner"};
  for (const char* n : names) app.add_subcommand(n)->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    RunContext ctx;
    ctx.config = load_config(config_path);
    ctx.out_dir = out_dir;
    ctx.emit_svg = svg;
    ctx.seed = seed;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
      throw io_error("cannot create output directory: " + out_dir);

    std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "collar") return run_collar(ctx);
    if (sub == "plumb") return run_plumb(ctx);
    if (sub == "cauchy") return run_cauchy(ctx);
    if (sub == "dbar-solve") return run_dbar_solve(ctx);
    if (sub == "decay") return run_decay(ctx);
    if (sub == "strip-eigen") return run_strip_eigen(ctx);
    if (sub == "three-strips") return run_three_strips(ctx);
    if (sub == "bubble-scan") return run_bubble_scan(ctx);
    if (sub == "corner") return run_corner(ctx);
    std::fprintf(stderr, "unknown subcommand\n");
    return 1;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const io_error& e) {
    std::fprintf(stderr, "i/o failure: %s\n", e.what());
    return 3;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 1;
  }
}
