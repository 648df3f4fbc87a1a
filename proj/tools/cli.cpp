#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "atomfringe/bounds.hpp"
#include "atomfringe/errors.hpp"
#include "atomfringe/measures.hpp"
#include "atomfringe/photon_sim.hpp"
#include "atomfringe/states.hpp"
#include "atomfringe/three_atom.hpp"
#include "atomfringe/tomography.hpp"
#include "atomfringe/two_atom.hpp"

namespace atomfringe::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string state_file;
  std::vector<double> u;
  double omega = 0.0;
  int grid = 0;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string format = "csv";
  std::string mode = "formal";

  double omega_span = 0.0;
  int omega_points = 1;
  std::vector<double> s_values{0.0, 0.1, 0.5, 1.0};
  double u_min = 0.5;
  double u_max = 10.0 * kPi + 0.5;
  double step = 0.05;
  int samples = 20;
  std::string input;
  bool simulate = false;
  bool noiseless = false;
  std::size_t photons = 0;
  int bins = 0;
  std::string design = "grid";
  std::string omega_mode = "filtered";
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string cell(const json& v) {
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Sink for every file a command writes; stamps each with the config hash.
struct Output {
  fs::path dir;
  std::string format;
  std::string command;
  json config;
  std::string hash;
  std::ostream& log;

  void write_file(const std::string& name, const std::string& text) const {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw InputError("cannot write " + (dir / name).string());
    f << text;
    log << "wrote " << (dir / name).string() << "\n";
  }

  void table(const std::string& name, const std::vector<std::string>& columns,
             const std::vector<json>& rows, const std::string& plot = "") const {
    if (format == "json") {
      json j{{"command", command}, {"config", config}, {"config_hash", hash},
             {"columns", columns}, {"rows", rows}};
      write_file(name + ".json", j.dump(2) + "\n");
      return;
    }
    std::string s = "# atomfringe " + command + " config_hash=" + hash + " config=" + config.dump() + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
    s += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + cell(r[i]);
      s += "\n";
    }
    write_file(name + ".csv", s);
    if (!plot.empty()) write_file(name + ".gp", plot);
  }

  void document(const std::string& name, json body) const {
    body["command"] = command;
    body["config"] = config;
    body["config_hash"] = hash;
    write_file(name + ".json", body.dump(2) + "\n");
  }
};

std::string plot_header(const std::string& xlabel, const std::string& ylabel) {
  return "set datafile separator ','\nset key autotitle columnhead\nset xlabel '" + xlabel +
         "'\nset ylabel '" + ylabel + "'\n";
}

AtomicState load_state(const std::string& path) {
  if (path.empty()) throw InputError("--state FILE is required");
  std::ifstream f(path);
  if (!f) throw InputError("cannot open state file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw InputError("malformed state file " + path + ": " + e.what());
  }
  return state_from_json(j);
}

double single_u(const Options& o) {
  if (o.u.size() != 1) throw InputError("this command needs exactly one --u");
  if (!(o.u[0] > 0.0) || !std::isfinite(o.u[0])) throw InputError("--u must be positive");
  return o.u[0];
}

VisibilityMode parse_mode(const std::string& m) {
  return m == "physical" ? VisibilityMode::physical : VisibilityMode::formal;
}

std::vector<double> omega_grid(const Options& o) {
  if (o.omega_points < 1) throw InputError("--omega-points must be at least 1");
  if (o.omega_points == 1) return {o.omega};
  std::vector<double> w;
  for (int i = 0; i < o.omega_points; ++i)
    w.push_back(o.omega - o.omega_span + 2.0 * o.omega_span * i / (o.omega_points - 1));
  return w;
}

int cmd_spectrum(const Options& o, const AtomicState& st, const Output& out) {
  const double u = single_u(o);
  const auto omegas = omega_grid(o);
  std::vector<json> rows;
  if (const auto* two = std::get_if<TwoQubitBlochState>(&st)) {
    const int n = o.grid > 0 ? o.grid : 256;
    if (n < 2) throw InputError("--grid must be at least 2");
    const double span = o.mode == "physical" ? u : kPi;
    for (double w : omegas)
      for (int i = 0; i < n; ++i) {
        const double chi = -span + 2.0 * span * i / (n - 1);
        const auto b = spectrum_weights_two(*two, u, chi);
        rows.push_back({chi, w, emission_spectrum_two(*two, u, w, chi), b.b_plus, b.b_minus});
      }
    out.table("spectrum", {"chi", "omega", "intensity", "b_plus", "b_minus"}, rows,
              plot_header("chi", "intensity") +
                  "plot 'spectrum.csv' using 1:3 with points pointtype 7 pointsize 0.3\n");
  } else {
    const auto& three = std::get<WLikeState>(st);
    const int n = o.grid > 0 ? o.grid : 48;
    if (n < 2) throw InputError("--grid must be at least 2");
    const TriangleGeometry geom(u);
    for (double w : omegas)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double pol = kPi * i / (n - 1), az = 2.0 * kPi * j / n;
          const Eigen::Vector3d k(std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az),
                                  std::cos(pol));
          const auto d = spectrum_weights_three(three, geom, k);
          rows.push_back({pol, az, w, emission_spectrum_three(three, geom, w, k), d.d_plus, d.d_minus});
        }
    out.table("spectrum", {"polar", "azimuth", "omega", "intensity", "d_plus", "d_minus"}, rows,
              plot_header("polar", "azimuth") + "set zlabel 'intensity'\n" +
                  "splot 'spectrum.csv' using 1:2:4 with points pointtype 7 pointsize 0.3\n");
  }
  return ok;
}

int cmd_visibility(const Options& o, const AtomicState& st, const Output& out) {
  if (const auto* two = std::get_if<TwoQubitBlochState>(&st)) {
    if (o.u.empty()) throw InputError("--u is required for a two-atom state");
    std::vector<json> rows;
    for (double u : o.u) {
      const auto p = fringe_params_two(*two, u, o.omega);
      const double v = visibility_two(*two, u, o.omega, parse_mode(o.mode));
      const double c = concurrence_bloch(*two);
      rows.push_back({u, o.omega, v, visibility_two(*two, u, o.omega, VisibilityMode::formal),
                      visibility_two(*two, u, o.omega, VisibilityMode::physical), c, std::abs(v - c),
                      p.theta0});
      out.log << "u = " << num(u) << "  V = " << num(v) << "  C = " << num(c) << "\n";
    }
    out.table("visibility",
              {"u", "omega", "visibility", "visibility_formal", "visibility_physical", "concurrence",
               "deviation", "theta0"},
              rows);
    return ok;
  }
  const auto& three = std::get<WLikeState>(st);
  if (three.has_phases())
    out.log << "note: phases only shift the far-field pattern; V uses the phase-free amplitudes\n";
  const WLikeState plain(three.c(0), three.c(1), three.c(2));
  const auto ex = fringe_extrema_three(plain);
  const double v = visibility_three(plain);
  std::vector<json> rows;
  for (Measure m : {Measure::mixedness, Measure::geometric, Measure::negativity_max, Measure::three_pi}) {
    const auto b = bounds_for(m, v);
    const double x = measure_value(m, plain);
    rows.push_back({v, to_string(m), x, b.lower, b.upper, b.lower_closed, b.upper_closed, b.contains(x)});
  }
  out.log << "V = " << num(v) << "  Imax = " << num(ex.imax) << "  Imin = " << num(ex.imin) << "\n";
  out.table("visibility",
            {"visibility", "measure", "value", "lower", "upper", "lower_closed", "upper_closed", "inside"},
            rows);
  return ok;
}

int cmd_deviation_scan(const Options& o, const Output& out) {
  if (!(o.step > 0.0)) throw InputError("--step must be positive");
  if (!(o.u_min > 0.0) || !(o.u_max >= o.u_min)) throw InputError("need 0 < --u-min <= --u-max");
  if (o.s_values.empty()) throw InputError("--s needs at least one purity");
  std::vector<double> us;
  const auto count = static_cast<long>(std::floor((o.u_max - o.u_min) / o.step + 1e-9));
  for (long k = 0; k <= count; ++k) us.push_back(o.u_min + o.step * static_cast<double>(k));
  DeviationOptions d;
  d.mode = parse_mode(o.mode);
  if (o.grid > 0) d.grid = o.grid;
  const auto rs = deviation_scan(o.s_values, us, o.omega, d);
  std::vector<json> rows;
  for (const auto& r : rs)
    rows.push_back({r.u, r.s, r.result.max_dev, r.result.theta_star, r.result.phi_star, r.s0_analytic});
  std::string plot = plot_header("u = k0 r", "max |V - C|") + "plot ";
  for (std::size_t i = 0; i < o.s_values.size(); ++i)
    plot += std::string(i ? ", " : "") + "'deviation_scan.csv' using ($2 == " + num(o.s_values[i]) +
            " ? $1 : 1/0):3 with lines title 's = " + num(o.s_values[i]) + "'";
  plot += ", 'deviation_scan.csv' using 1:6 with lines dashtype 2 title 's = 0 analytic'\n";
  out.table("deviation_scan", {"u", "s", "max_dev", "theta_star", "phi_star", "s0_analytic"}, rows, plot);
  return ok;
}

int cmd_bounds(const Options& o, const Output& out) {
  const int n = o.grid > 0 ? o.grid : 100;
  if (o.samples < 0) throw InputError("--samples must be non-negative");
  out.log << "warning: V = 0 row excluded (upsilon = 1, degenerate family)\n";
  json endpoints = json::object();
  for (Measure m : {Measure::mixedness, Measure::geometric, Measure::negativity_max, Measure::three_pi}) {
    const std::string name = to_string(m);
    std::vector<json> rows, scatter;
    for (int k = 1; k <= n; ++k) {
      const double v = static_cast<double>(k) / n;
      const auto b = bounds_for(m, v);
      rows.push_back({v, name, b.lower, b.upper, b.lower_closed, b.upper_closed});
      if (o.samples > 0)
        for (const auto& s : sample_states_at_visibility(v, static_cast<std::size_t>(o.samples),
                                                         o.seed + static_cast<std::uint64_t>(k)))
          scatter.push_back({v, name, measure_value(m, s)});
    }
    out.table("bounds_" + name, {"V", "measure", "lower", "upper", "lower_closed", "upper_closed"}, rows,
              plot_header("V", name) + "plot 'bounds_" + name + ".csv' using 1:3 with lines title 'lower', '' " +
                  "using 1:4 with lines title 'upper', 'scatter_" + name +
                  ".csv' using 1:3 with dots title 'states'\n");
    if (o.samples > 0) out.table("scatter_" + name, {"V", "measure", "value"}, scatter);
    const auto at1 = bounds_for(m, 1.0);
    const auto lim = left_limit_at_unit_visibility(m);
    endpoints[name] = {{"at_unit_visibility", {at1.lower, at1.upper}},
                       {"limit_from_below", {lim.lower, lim.upper}}};
  }
  out.document("bounds_endpoints", {{"endpoints", endpoints}});
  return ok;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t\r");
    const auto b = item.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : item.substr(a, b - a + 1));
  }
  return out;
}

// Header row plus numeric rows; '#' lines are comments.
std::pair<std::map<std::string, std::size_t>, std::vector<std::vector<double>>> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open input file " + path);
  std::map<std::string, std::size_t> cols;
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split(line);
    if (cols.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) cols[fields[i]] = i;
      continue;
    }
    if (fields.size() != cols.size())
      throw InputError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols.size()) +
                       " fields");
    std::vector<double> r;
    for (const auto& x : fields) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(x, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != x.size() || x.empty())
        throw InputError(path + ":" + std::to_string(lineno) + ": not a number: '" + x + "'");
      r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  if (cols.empty()) throw InputError(path + ": missing header row");
  return {cols, rows};
}

json matrix_json(const Eigen::Matrix3d& m) {
  json j = json::array();
  for (int i = 0; i < 3; ++i) j.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return j;
}

json two_report(const TwoAtomReconstruction& r, const std::optional<TwoQubitBlochState>& truth) {
  json j{{"state", to_json(r.state)},
         {"raw_vector", {r.raw_vector(0), r.raw_vector(1), r.raw_vector(2)}},
         {"covariance", matrix_json(r.covariance)},
         {"sigma", {std::sqrt(r.covariance(0, 0)), std::sqrt(r.covariance(1, 1)), std::sqrt(r.covariance(2, 2))}},
         {"scale", r.scale},
         {"residual", r.residual},
         {"projected", r.projected}};
  if (truth) {
    const Eigen::Vector3d e = r.raw_vector - truth->bloch_vector();
    json z = json::array();
    for (int i = 0; i < 3; ++i) {
      const double s = std::sqrt(r.covariance(i, i));
      z.push_back(s > 0.0 ? e(i) / s : 0.0);
    }
    j["truth"] = to_json(*truth);
    j["error"] = {e(0), e(1), e(2)};
    j["max_abs_error"] = e.cwiseAbs().maxCoeff();
    j["z_scores"] = z;
  }
  return j;
}

json fit_report(const FringeFit& f) {
  return {{"u", f.u},
          {"scale", f.scale},
          {"sx", f.sx},
          {"sy_minus_g_sz", f.q},
          {"sigma_sx", std::sqrt(f.covariance(1, 1))},
          {"sigma_sy_minus_g_sz", std::sqrt(f.covariance(2, 2))},
          {"residual", f.residual}};
}

json three_report(const ThreeAtomReconstruction& r, const std::optional<WLikeState>& truth) {
  json j{{"state", to_json(r.result.state)},
         {"permutation", r.result.permutation},
         {"c_atom_order", r.c_atom_order},
         {"phi2", r.phi2},
         {"phi3", r.phi3},
         {"scale", r.scale},
         {"residual", r.residual},
         {"normalization_error", r.normalization_error},
         {"warnings", r.warnings}};
  if (truth) {
    double e = 0.0;
    for (std::size_t k = 0; k < 3; ++k) e = std::max(e, std::abs(r.c_atom_order[k] - truth->c(k)));
    e = std::max(e, std::abs(std::remainder(r.phi2 - truth->phi2(), 2.0 * kPi)));
    e = std::max(e, std::abs(std::remainder(r.phi3 - truth->phi3(), 2.0 * kPi)));
    j["truth"] = to_json(*truth);
    j["max_abs_error"] = e;
  }
  return j;
}

std::vector<std::array<double, 2>> design_points(const std::string& d) {
  if (d == "five")
    return {{0.0, 0.0}, {kPi, 0.0}, {0.0, kPi}, {kPi / 2, kPi / 2}, {kPi / 2, -kPi / 2}};
  return default_torus_design();
}

// Writes the diagnostic document for an ill-posed two-atom design and reports the failure.
int two_ill_posed(const Output& out, const std::vector<FringeFit>& fits, const std::string& why) {
  json per = json::array();
  for (const auto& f : fits) per.push_back(fit_report(f));
  out.document("tomography", {{"error", why}, {"fringe_fits", per}});
  out.log << "error: " << why << "\n";
  return numerical_failure;
}

std::vector<FringeFit> fits_by_u(const std::vector<FringeSample>& samples) {
  std::map<double, std::vector<FringeSample>> by_u;
  for (const auto& s : samples) by_u[s.u].push_back(s);
  std::vector<FringeFit> fits;
  for (const auto& [u, v] : by_u) {
    try {
      fits.push_back(fit_fringe_two(v));
    } catch (const IllPosed&) {
    }
  }
  return fits;
}

int cmd_tomography(const Options& o, const Output& out) {
  if (o.simulate == !o.input.empty()) throw InputError("give exactly one of --input FILE and --simulate");
  if (!o.input.empty()) {
    const auto [cols, rows] = read_csv(o.input);
    auto col = [&](const std::string& c) -> std::optional<std::size_t> {
      const auto it = cols.find(c);
      return it == cols.end() ? std::nullopt : std::optional(it->second);
    };
    const auto sig = col("sigma");
    if (col("theta1")) {
      const auto t2 = col("theta2"), in = col("intensity");
      if (!t2 || !in) throw InputError("three-atom input needs columns theta1, theta2, intensity");
      std::vector<TorusSample> s;
      for (const auto& r : rows) s.push_back({r[*col("theta1")], r[*t2], r[*in], sig ? r[*sig] : 0.0});
      out.document("tomography", {{"reconstruction", three_report(tomography_three(s), std::nullopt)}});
      return ok;
    }
    const auto chi = col("chi"), u = col("u"), in = col("intensity"), w = col("omega");
    if (!chi || !u || !in) throw InputError("two-atom input needs columns chi, u, intensity (omega optional)");
    std::vector<FringeSample> s;
    for (const auto& r : rows) s.push_back({r[*chi], w ? r[*w] : 0.0, r[*u], r[*in], sig ? r[*sig] : 0.0});
    try {
      out.document("tomography", {{"reconstruction", two_report(tomography_two_exact(s), std::nullopt)}});
    } catch (const IllPosed& e) {
      return two_ill_posed(out, fits_by_u(s), e.what());
    }
    return ok;
  }

  const auto st = load_state(o.state_file);
  if (const auto* three = std::get_if<WLikeState>(&st)) {
    std::vector<TorusSample> s;
    for (const auto& p : design_points(o.design)) s.push_back({p[0], p[1], farfield_intensity(*three, p[0], p[1])});
    out.document("tomography", {{"design", o.design},
                                {"noiseless", true},
                                {"reconstruction", three_report(tomography_three(s), *three)}});
    return ok;
  }
  const auto& two = std::get<TwoQubitBlochState>(st);
  if (o.u.empty()) throw InputError("--u is required (repeat it for several separations)");
  if (o.noiseless) {
    std::vector<FringeSample> s;
    for (double u : o.u)
      for (int k = 0; k < 16; ++k) {
        const double chi = -kPi + 2.0 * kPi * k / 16.0;
        s.push_back({chi, o.omega, u, emission_spectrum_two(two, u, o.omega, chi)});
      }
    try {
      out.document("tomography", {{"noiseless", true}, {"reconstruction", two_report(tomography_two_exact(s), two)}});
    } catch (const IllPosed& e) {
      return two_ill_posed(out, fits_by_u(s), e.what());
    }
    return ok;
  }
  const std::size_t n = o.photons > 0 ? o.photons : 1000000;
  const std::size_t bins = o.bins > 0 ? static_cast<std::size_t>(o.bins) : 512;
  std::vector<FringeFit> fits;
  SimOptions sim;
  sim.omega = o.omega;
  for (std::size_t i = 0; i < o.u.size(); ++i) {
    const double u = o.u[i];
    const auto h = simulate_fringe_two(two, u, n, o.seed + i, bins, sim);
    std::vector<FringeSample> s;
    for (std::size_t b = 0; b < h.bins(); ++b) {
      const double floor_err = 1.0 / (static_cast<double>(h.total) * h.width(b));
      s.push_back({0.5 * (h.edges[b] + h.edges[b + 1]), o.omega, u, h.intensity(b),
                   std::max(h.stderr_of(b), floor_err)});
    }
    fits.push_back(fit_fringe_two(s));
  }
  try {
    json per = json::array();
    for (const auto& f : fits) per.push_back(fit_report(f));
    out.document("tomography", {{"photons_per_separation", n},
                                {"bins", bins},
                                {"fringe_fits", per},
                                {"reconstruction", two_report(combine_fringe_fits(fits), two)}});
  } catch (const IllPosed& e) {
    return two_ill_posed(out, fits, e.what());
  }
  return ok;
}

int cmd_simulate(const Options& o, const AtomicState& st, const Output& out) {
  const double u = single_u(o);
  const std::size_t n = o.photons > 0 ? o.photons : 100000;
  SimOptions sim;
  sim.omega = o.omega;
  sim.mode = o.omega_mode == "spectral" ? OmegaMode::spectral : OmegaMode::filtered;
  std::vector<PhotonSample> photons;
  json summary{{"photons", n}, {"omega_mode", o.omega_mode}};
  if (const auto* two = std::get_if<TwoQubitBlochState>(&st)) {
    photons = sample_photons_two(*two, u, n, o.seed, sim);
    const std::size_t bins = o.bins > 0 ? static_cast<std::size_t>(o.bins) : 128;
    auto h = make_histogram(-u, u, bins);
    for (const auto& p : photons) fill(h, u * p.direction.z());
    std::vector<json> rows;
    for (std::size_t b = 0; b < h.bins(); ++b)
      rows.push_back({h.edges[b], h.edges[b + 1], h.counts[b], h.intensity(b), h.stderr_of(b)});
    out.table("histogram", {"bin_lo", "bin_hi", "count", "intensity", "stderr"}, rows,
              plot_header("chi", "density") + "plot 'histogram.csv' using (($1+$2)/2):4:5 with errorbars\n");
    if (bins >= 32 && n >= 100) {
      const auto e = estimate_visibility(h, EstimateOptions{200, o.seed});
      summary["visibility_estimate"] = e.value;
      summary["visibility_sigma"] = e.sigma;
      if (sim.mode == OmegaMode::filtered) {
        const double v = visibility_two(*two, u, o.omega, VisibilityMode::physical);
        summary["visibility_analytic"] = v;
        summary["z"] = e.sigma > 0.0 ? (e.value - v) / e.sigma : 0.0;
      }
    }
  } else {
    photons = sample_photons_three(std::get<WLikeState>(st), TriangleGeometry(u), n, o.seed, sim);
  }
  std::vector<json> rows;
  rows.reserve(photons.size());
  for (const auto& p : photons) rows.push_back({p.omega, p.direction.x(), p.direction.y(), p.direction.z()});
  out.table("samples", {"omega", "dx", "dy", "dz"}, rows);
  out.document("simulate_summary", summary);
  return ok;
}

json config_json(const std::string& command, const Options& o, const std::optional<AtomicState>& st) {
  json j{{"command", command}, {"u", o.u},       {"omega", o.omega}, {"grid", o.grid},
         {"seed", o.seed},     {"format", o.format}, {"mode", o.mode}};
  if (st) j["state"] = to_json(*st);
  if (command == "spectrum") {
    j["omega_span"] = o.omega_span;
    j["omega_points"] = o.omega_points;
  } else if (command == "deviation-scan") {
    j["s"] = o.s_values;
    j["u_min"] = o.u_min;
    j["u_max"] = o.u_max;
    j["step"] = o.step;
  } else if (command == "bounds") {
    j["samples"] = o.samples;
  } else if (command == "tomography") {
    j["input"] = o.input;
    j["simulate"] = o.simulate;
    j["noiseless"] = o.noiseless;
    j["photons"] = o.photons;
    j["bins"] = o.bins;
    j["design"] = o.design;
  } else if (command == "simulate") {
    j["photons"] = o.photons;
    j["bins"] = o.bins;
    j["omega_mode"] = o.omega_mode;
  }
  return j;
}

}  // namespace

std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fringe visibility, entanglement bounds and tomography for pinned two-level emitters",
               "atomfringe-cli"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s) {
    s->add_option("--u", o.u, "Separation k0 r (repeatable where several are allowed)");
    s->add_option("--omega", o.omega, "Detuning from the bare transition, units of Gamma");
    s->add_option("--grid", o.grid, "Grid size (command specific)");
    s->add_option("--seed", o.seed, "Random seed");
    s->add_option("--out", o.out, "Output directory");
    s->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--mode", o.mode, "Visibility definition")->check(CLI::IsMember({"formal", "physical"}));
  };
  auto state_opt = [&](CLI::App* s) { s->add_option("--state", o.state_file, "JSON state file"); };

  auto* spectrum = app.add_subcommand("spectrum", "Emission spectrum over phases or directions");
  common(spectrum);
  state_opt(spectrum);
  spectrum->add_option("--omega-span", o.omega_span, "Half width of the detuning grid");
  spectrum->add_option("--omega-points", o.omega_points, "Number of detunings");

  auto* visibility = app.add_subcommand("visibility", "Fringe visibility and related measures");
  common(visibility);
  state_opt(visibility);

  auto* scan = app.add_subcommand("deviation-scan", "max |V - C| over states of fixed purity versus u");
  common(scan);
  scan->add_option("--s", o.s_values, "Purities")->delimiter(',');
  scan->add_option("--u-min", o.u_min, "First separation");
  scan->add_option("--u-max", o.u_max, "Last separation");
  scan->add_option("--step", o.step, "Separation step");

  auto* bounds = app.add_subcommand("bounds", "Entanglement bounds as functions of visibility");
  common(bounds);
  bounds->add_option("--samples", o.samples, "Sampled states per visibility for the scatter overlay");

  auto* tomo = app.add_subcommand("tomography", "Reconstruct a state from fringe data");
  common(tomo);
  state_opt(tomo);
  tomo->add_option("--input", o.input, "CSV with chi,u,intensity[,omega,sigma] or theta1,theta2,intensity[,sigma]");
  tomo->add_flag("--simulate", o.simulate, "Generate the data from --state");
  tomo->add_flag("--noiseless", o.noiseless, "Exact two-atom intensities instead of photon histograms");
  tomo->add_option("--photons", o.photons, "Photons per separation");
  tomo->add_option("--bins", o.bins, "Histogram bins");
  tomo->add_option("--design", o.design, "Three-atom torus design")->check(CLI::IsMember({"grid", "five"}));

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo photon detections");
  common(simulate);
  state_opt(simulate);
  simulate->add_option("--photons", o.photons, "Number of photons");
  simulate->add_option("--bins", o.bins, "Histogram bins (two atoms)");
  simulate->add_option("--omega-mode", o.omega_mode, "Detuning model")
      ->check(CLI::IsMember({"filtered", "spectral"}));

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const bool needs_state = command == "spectrum" || command == "visibility" || command == "simulate";
    std::optional<AtomicState> st;
    if (needs_state || (command == "tomography" && o.simulate)) st = load_state(o.state_file);
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw InputError("cannot create output directory " + o.out + ": " + ec.message());
    const json cfg = config_json(command, o, st);
    const Output sink{o.out, o.format, command, cfg, config_hash(cfg.dump()), out};
    if (command == "spectrum") return cmd_spectrum(o, *st, sink);
    if (command == "visibility") return cmd_visibility(o, *st, sink);
    if (command == "deviation-scan") return cmd_deviation_scan(o, sink);
    if (command == "bounds") return cmd_bounds(o, sink);
    if (command == "tomography") return cmd_tomography(o, sink);
    return cmd_simulate(o, *st, sink);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  } catch (const InvalidState& e) {
    err << "invalid state: " << e.what() << "\n";
    return input_error;
  } catch (const DomainError& e) {
    err << "invalid parameter: " << e.what() << "\n";
    return input_error;
  } catch (const InsufficientData& e) {
    err << "insufficient data: " << e.what() << "\n";
    return input_error;
  } catch (const json::exception& e) {
    err << "malformed JSON: " << e.what() << "\n";
    return input_error;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return numerical_failure;
  }
}

}  // namespace atomfringe::cli
