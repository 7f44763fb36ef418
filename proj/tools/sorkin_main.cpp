// sorkin — triple-slit Sorkin-parameter calculator.
//
// Subcommands:
//   profile   kappa versus detector angle (analytic | fraunhofer | fresnel)
//   scan-d    |kappa| at the central maximum versus screen distance (fresnel)
//   compare   overlay two or more methods on a shared grid, report deviations
//   bound     the closed-form magnitude bound, optionally verified by sweep
//   presets   list the built-in experiment parameter sets
//
// Output: two-column CSV (plotter clean) plus a JSON sidecar carrying the
// run manifest, or a single JSON file with --format json.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sorkin/sorkin.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sorkin;

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

struct Range {
  double lo = 0, hi = 0;
  int count = 0;
};

Range parse_range(const std::string& text, const char* flag) {
  Range r;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.count) || c1 != ':' || c2 != ':' || !in.eof())
    throw ValidationError(flag, "expected min:max:count, got '" + text + "'");
  return r;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Reads a flat key=value config file (comments with '#', blank lines ok)
/// and returns the entries as --key=value tokens.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("--config", "cannot read '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("--config", "expected key=value, got '" + line + "'");
    std::string key = line.substr(start, eq - start);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    tokens.push_back("--" + key + "=" + line.substr(eq + 1));
  }
  return tokens;
}

/// Splices config-file tokens in right after the subcommand name, so that
/// flags given on the command line take precedence (options use take-last).
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;
  const std::vector<std::string> extra = config_tokens(config_path);
  std::size_t after = 0;  // first token after the subcommand name
  while (after < args.size() && !args[after].empty() && args[after][0] == '-') ++after;
  if (after < args.size()) ++after;
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(after), extra.begin(), extra.end());
  return args;
}

/// Write bytes atomically: temp file in the target directory, then rename.
void write_atomic(const fs::path& path, const std::string& contents) {
  fs::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Shared option block
// ---------------------------------------------------------------------------

struct CommonOptions {
  std::string preset_name;
  std::optional<double> w_um, d_um, lambda_nm, L_m, D_m, t_lambda, height_um;
  std::vector<std::string> methods;
  std::string out_path;
  std::string format = "csv";
  int quad_samples = 24;
  double quad_tolerance = 1e-4;
  long quad_max_panels = 1 << 20;
  int grid_ny = 0, grid_nz = 0;

  void add_geometry_flags(CLI::App* cmd) {
    cmd->add_option("--preset", preset_name, "photon | electron | fdtd");
    auto opt = [&](const char* name, std::optional<double>& slot, const char* help) {
      cmd->add_option_function<double>(name, [&slot](double v) { slot = v; }, help);
    };
    opt("--w-um", w_um, "slit width in micrometers");
    opt("--d-um", d_um, "slit separation (centre to centre) in micrometers");
    opt("--lambda-nm", lambda_nm, "wavelength in nanometers");
    opt("--L-m,--L", L_m, "source to slit-plane distance in meters");
    opt("--D-m,--D", D_m, "slit-plane to screen distance in meters");
    opt("--t-lambda", t_lambda, "slit-plane thickness in units of lambda");
    opt("--height-um", height_um, "slit height in micrometers");
  }

  void add_output_flags(CLI::App* cmd, const char* default_out) {
    out_path = default_out;
    cmd->add_option("--out", out_path, "output path");
    cmd->add_option("--format", format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  void add_numeric_flags(CLI::App* cmd) {
    cmd->add_option("--quad-samples", quad_samples, "quadrature nodes per phase oscillation");
    cmd->add_option("--quad-tolerance", quad_tolerance, "relative panel-doubling tolerance");
    cmd->add_option("--quad-max-panels", quad_max_panels, "panel budget per 1D integral");
    cmd->add_option("--grid-ny", grid_ny, "riemann cells per slit width (fresnel)");
    cmd->add_option("--grid-nz", grid_nz, "riemann cells per slit height (fresnel)");
  }

  Geometry geometry() const {
    Geometry g;
    if (!preset_name.empty()) {
      g = preset(preset_name,
                 preset_name == "fdtd" && lambda_nm ? *lambda_nm * 1e-9 : 1.0);
    } else {
      if (!(w_um && d_um && lambda_nm && L_m && D_m))
        throw ValidationError("geometry",
                              "need --preset or all of --w-um --d-um --lambda-nm --L-m --D-m");
      g.slit_height = 300e-6;
    }
    if (w_um) g.slit_width = *w_um * 1e-6;
    if (d_um) g.slit_separation = *d_um * 1e-6;
    if (lambda_nm) g.wavelength = *lambda_nm * 1e-9;
    if (L_m) g.source_distance = *L_m;
    if (D_m) g.screen_distance = *D_m;
    if (height_um) g.slit_height = *height_um * 1e-6;
    if (t_lambda) g.thickness = *t_lambda * g.wavelength;
    return validate_geometry(g).geometry;
  }

  QuadratureSpec quadrature() const {
    QuadratureSpec q;
    q.samples_per_oscillation = quad_samples;
    q.tolerance = quad_tolerance;
    q.max_panels = quad_max_panels;
    q.check();
    return q;
  }

  fresnel::RiemannGrid riemann_grid(const Geometry& g) const {
    fresnel::RiemannGrid grid = fresnel::RiemannGrid::for_geometry(g);
    if (grid_ny > 0) grid.n_y = grid_ny;
    if (grid_nz > 0) grid.n_z = grid_nz;
    grid.check(g);
    return grid;
  }
};

json geometry_json(const Geometry& g) {
  return {{"slit_width_m", g.slit_width},
          {"slit_separation_m", g.slit_separation},
          {"source_distance_m", g.source_distance},
          {"screen_distance_m", g.screen_distance},
          {"thickness_m", g.thickness},
          {"slit_height_m", g.slit_height},
          {"wavelength_m", g.wavelength},
          {"fresnel_number", fresnel_number(g)}};
}

/// Everything needed to reproduce a run, serialized into every artifact.
json make_manifest(const std::string& command, const Geometry& g,
                   const std::vector<std::string>& methods, const CommonOptions& opts,
                   double wall_seconds, const std::vector<std::string>& notes) {
  json m;
  m["command"] = command;
  m["geometry"] = geometry_json(g);
  m["methods"] = methods;
  m["quadrature"] = {{"samples_per_oscillation", opts.quad_samples},
                     {"tolerance", opts.quad_tolerance},
                     {"max_panels", opts.quad_max_panels}};
  if (opts.grid_ny > 0 || opts.grid_nz > 0 ||
      std::find(methods.begin(), methods.end(), "fresnel") != methods.end()) {
    const fresnel::RiemannGrid grid = opts.riemann_grid(g);
    m["grid"] = {{"n_y", grid.n_y}, {"n_z", grid.n_z}};
  }
  m["tool_version"] = kVersion;
  m["wall_time_s"] = wall_seconds;
  m["notes"] = notes;
  return m;
}

void emit(const CommonOptions& opts, const std::string& csv_header,
          const std::vector<std::vector<double>>& columns, const json& manifest) {
  std::ostringstream csv;
  csv << csv_header << "\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) csv << ",";
      csv << format_double(columns[c][r]);
    }
    csv << "\n";
  }

  if (opts.format == "json") {
    json doc = manifest;
    doc["csv_header"] = csv_header;
    std::istringstream header(csv_header);
    std::vector<std::string> names;
    for (std::string name; std::getline(header, name, ',');) names.push_back(name);
    json data;
    for (std::size_t c = 0; c < columns.size(); ++c) data[names[c]] = columns[c];
    doc["data"] = data;
    write_atomic(opts.out_path, doc.dump(2) + "\n");
    std::cout << "wrote " << opts.out_path << "\n";
    return;
  }

  write_atomic(opts.out_path, csv.str());
  const std::string sidecar = opts.out_path + ".json";
  write_atomic(sidecar, manifest.dump(2) + "\n");
  std::cout << "wrote " << opts.out_path << " (+ " << sidecar << ")\n";
}

// ---------------------------------------------------------------------------
// Method evaluation
// ---------------------------------------------------------------------------

KappaProfile evaluate_method(Method method, const Geometry& g, const DetectorGrid& grid,
                             const CommonOptions& opts) {
  switch (method) {
    case Method::analytic: return analytic::kappa_analytic(g, grid);
    case Method::fraunhofer:
      return fraunhofer::kappa_numeric_profile(g, grid, opts.quadrature());
    case Method::fresnel: {
      fresnel::SlitFields fields(g, opts.riemann_grid(g));
      KappaProfile out;
      out.abscissa = grid.theta;
      out.kappa.resize(grid.theta.size());
      out.method = Method::fresnel;
      out.geometry = g;
      const double delta =
          fields.intensities(0.0, g.screen_distance).I_ABC;
      for (std::size_t i = 0; i < grid.theta.size(); ++i)
        out.kappa[i] =
            fields.epsilon(grid.theta[i] * g.screen_distance, g.screen_distance) / delta;
      out.notes.emplace_back("grid: " + std::to_string(fields.grid().n_y) + " x " +
                             std::to_string(fields.grid().n_z));
      return out;
    }
  }
  throw ValidationError("method", "unknown method");
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_profile(const CommonOptions& opts, const std::string& theta_spec, int points,
                bool points_given, bool thick, double n_imag, double n_real, double attenuation,
                double factor) {
  const auto t0 = std::chrono::steady_clock::now();
  const Geometry g = opts.geometry();

  Range r = parse_range(theta_spec, "--theta-deg");
  if (points_given) {
    if (points < 1) throw ValidationError("--points", "grid needs at least one point");
    r.count = points;
  }
  const DetectorGrid grid = DetectorGrid::uniform_degrees(r.lo, r.hi, r.count);

  if (opts.methods.size() != 1)
    throw ValidationError("method", "profile needs exactly one --method");
  const Method method = method_from_name(opts.methods.front());

  KappaProfile profile;
  if (thick) {
    if (method != Method::analytic)
      throw ValidationError("method", "--thick applies to the analytic method only");
    analytic::ThickSlitModel model;
    model.refractive_index_imag = n_imag;
    model.refractive_index_real = n_real;
    model.attenuation_threshold = attenuation;
    model.amplitude_factor = factor;
    profile = analytic::thick_slit_profile(g, model, grid);
  } else {
    profile = evaluate_method(method, g, grid, opts);
  }

  std::vector<double> theta_deg(profile.abscissa.size());
  for (std::size_t i = 0; i < theta_deg.size(); ++i) theta_deg[i] = profile.abscissa[i] / kDegree;

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest = make_manifest("profile", g, {std::string(method_name(method))}, opts, wall,
                                profile.notes);
  if (thick) manifest["thick_slit"] = {{"n_imag", n_imag}, {"attenuation", attenuation},
                                       {"amplitude_factor", factor}};
  emit(opts, "theta_deg,kappa", {theta_deg, profile.kappa}, manifest);
  return 0;
}

int cmd_scan_d(const CommonOptions& opts, const std::string& d_range) {
  const auto t0 = std::chrono::steady_clock::now();
  const Geometry g = opts.geometry();
  const Range r = parse_range(d_range, "--d-range");
  if (r.count < 1) throw ValidationError("--d-range", "needs at least one distance");
  if (!(r.lo > 0) || !(r.hi >= r.lo))
    throw ValidationError("--d-range", "distances must be positive and increasing");
  std::vector<double> D(static_cast<std::size_t>(r.count));
  for (int i = 0; i < r.count; ++i)
    D[static_cast<std::size_t>(i)] =
        r.count == 1 ? r.lo : r.lo + (r.hi - r.lo) * static_cast<double>(i) / (r.count - 1);

  const KappaProfile scan = fresnel::kappa_central_vs_D(g, D, opts.riemann_grid(g));

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json manifest = make_manifest("scan-d", g, {"fresnel"}, opts, wall, scan.notes);
  emit(opts, "D_m,abs_kappa", {scan.abscissa, scan.kappa}, manifest);
  return 0;
}

int cmd_compare(const CommonOptions& opts, const std::string& theta_spec) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opts.methods.size() < 2)
    throw ValidationError("method", "compare needs at least two --method flags");
  const Geometry g = opts.geometry();
  const Range r = parse_range(theta_spec, "--theta-deg");
  const DetectorGrid grid = DetectorGrid::uniform_degrees(r.lo, r.hi, r.count);

  std::vector<KappaProfile> profiles;
  std::vector<std::string> names;
  std::vector<std::string> notes;
  for (const std::string& name : opts.methods) {
    profiles.push_back(evaluate_method(method_from_name(name), g, grid, opts));
    names.push_back(name);
    for (const auto& n : profiles.back().notes) notes.push_back(name + ": " + n);
  }

  // deviation summary against the first method, over the central region
  // |theta| <= lambda / w (the main diffraction lobe)
  const std::vector<double>& ref = profiles.front().kappa;
  const double central = g.wavelength / g.slit_width;
  double ref_peak = 0;
  for (std::size_t i = 0; i < grid.theta.size(); ++i)
    if (std::abs(grid.theta[i]) <= central) ref_peak = std::max(ref_peak, std::abs(ref[i]));

  std::size_t i0 = 0;
  for (std::size_t i = 0; i < grid.theta.size(); ++i)
    if (std::abs(grid.theta[i]) < std::abs(grid.theta[i0])) i0 = i;

  std::cout << "fresnel_number " << format_double(fresnel_number(g)) << "\n";
  for (std::size_t m = 1; m < profiles.size(); ++m) {
    const std::vector<double>& cur = profiles[m].kappa;
    double max_rel = 0;
    for (std::size_t i = 0; i < grid.theta.size(); ++i) {
      if (std::abs(grid.theta[i]) > central) continue;
      if (std::abs(ref[i]) < 0.1 * ref_peak) continue;  // off-zero points only
      max_rel = std::max(max_rel, std::abs(cur[i] - ref[i]) / std::abs(ref[i]));
    }
    const double central_dev = std::abs(cur[i0] - ref[i0]) / std::abs(ref[i0]);
    std::cout << names[m] << " vs " << names[0] << ": central_deviation "
              << format_double(central_dev) << ", max_central_region_deviation "
              << format_double(max_rel) << "\n";
  }

  std::vector<std::vector<double>> columns;
  std::vector<double> theta_deg(grid.theta.size());
  for (std::size_t i = 0; i < theta_deg.size(); ++i) theta_deg[i] = grid.theta[i] / kDegree;
  columns.push_back(theta_deg);
  std::string header = "theta_deg";
  for (std::size_t m = 0; m < profiles.size(); ++m) {
    header += ",kappa_" + names[m];
    columns.push_back(profiles[m].kappa);
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(opts, header, columns, make_manifest("compare", g, names, opts, wall, notes));
  return 0;
}

int cmd_bound(const CommonOptions& opts, bool verify) {
  const Geometry g = opts.geometry();
  const double bound = analytic::kappa_bound(g);
  std::cout << "kappa_bound " << format_double(bound) << "\n";
  if (verify) {
    const DetectorGrid grid = DetectorGrid::uniform(-kThetaMax, kThetaMax, 2001);
    const KappaProfile p = analytic::kappa_analytic(g, grid);
    double peak = 0;
    for (double v : p.kappa) peak = std::max(peak, std::abs(v));
    std::cout << "max_abs_kappa " << format_double(peak) << "\n";
    const bool pass = peak <= bound;
    std::cout << "bound_dominance " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
  }
  return 0;
}

int cmd_presets() {
  for (const char* name : {"photon", "electron", "fdtd"}) {
    const Geometry g = preset(name);
    std::cout << name << ": w=" << g.slit_width << " m, d=" << g.slit_separation
              << " m, L=" << g.source_distance << " m, D=" << g.screen_distance
              << " m, t=" << g.thickness << " m, h=" << g.slit_height
              << " m, lambda=" << g.wavelength << " m, F=" << format_double(fresnel_number(g))
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"triple-slit Sorkin parameter calculator"};
  app.require_subcommand(1);

  CommonOptions po, so, co, bo;
  std::string theta_spec = "-3:3:601";
  int points = 0;
  bool thick = false;
  double n_imag = 2.61, n_real = 2.29, attenuation = 0.30, factor = 4.0;

  CLI::App* profile = app.add_subcommand("profile", "kappa versus detector angle");
  po.add_geometry_flags(profile);
  po.add_output_flags(profile, "kappa_profile.csv");
  po.add_numeric_flags(profile);
  profile->add_option("--method", po.methods, "analytic | fraunhofer | fresnel");
  profile->add_option("--theta-deg", theta_spec, "angle grid min:max:count in degrees");
  CLI::Option* points_opt =
      profile->add_option("--points", points, "override the grid point count");
  profile->add_flag("--thick", thick, "apply the thick-slit adjustment (analytic)");
  profile->add_option("--n-imag", n_imag, "imaginary refractive index of the slit material");
  profile->add_option("--n-real", n_real, "real refractive index (recorded only)");
  profile->add_option("--attenuation", attenuation, "penetration attenuation threshold");
  profile->add_option("--factor", factor, "thick-slit amplitude factor");

  std::string d_range = "0.02:1.0:40";
  CLI::App* scan = app.add_subcommand("scan-d", "central |kappa| versus screen distance");
  so.add_geometry_flags(scan);
  so.add_output_flags(scan, "kappa_scan_d.csv");
  so.add_numeric_flags(scan);
  scan->add_option("--d-range", d_range, "screen distances min:max:count in meters");

  std::string cmp_theta = "-3:3:241";
  CLI::App* compare = app.add_subcommand("compare", "overlay methods on one grid");
  co.add_geometry_flags(compare);
  co.add_output_flags(compare, "kappa_compare.csv");
  co.add_numeric_flags(compare);
  compare->add_option("--method", co.methods, "methods to overlay (repeat the flag)");
  compare->add_option("--theta-deg", cmp_theta, "angle grid min:max:count in degrees");

  bool verify = false;
  CLI::App* bound = app.add_subcommand("bound", "closed-form |kappa| bound");
  bo.add_geometry_flags(bound);
  bound->add_flag("--verify", verify, "sweep 2001 angles and check dominance");

  CLI::App* presets_cmd = app.add_subcommand("presets", "list built-in parameter sets");

  // a flat key=value config file is spliced into the argument list up front,
  // so later command-line flags override it (take-last policy)
  std::string config_doc;
  for (CLI::App* sub : {profile, scan, compare, bound}) {
    sub->add_option("--config", config_doc, "flat key=value file mirroring the flags");
    for (CLI::Option* opt : sub->get_options())
      if (opt->get_expected_max() == 1)  // keep repeatable options (e.g. --method) intact
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    args = apply_config(std::move(args));
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (profile->parsed())
      return cmd_profile(po, theta_spec, points, points_opt->count() > 0, thick, n_imag, n_real,
                         attenuation, factor);
    if (scan->parsed()) return cmd_scan_d(so, d_range);
    if (compare->parsed()) return cmd_compare(co, cmp_theta);
    if (bound->parsed()) return cmd_bound(bo, verify);
    if (presets_cmd->parsed()) return cmd_presets();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
