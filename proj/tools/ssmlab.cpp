#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssm/arith.hpp"
#include "ssm/error.hpp"
#include "ssm/ifs.hpp"
#include "ssm/io.hpp"
#include "ssm/regularity.hpp"
#include "ssm/spectral.hpp"
#include "ssm/walk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kMalformedInput = 3,
  kBadParameter = 4,
  kComputation = 5,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Run {
  std::string spec_path;
  fs::path out_dir = ".";
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string command;
  json parameters = json::object();
  std::vector<std::pair<std::string, std::string>> summary;

  ssm::McConfig mc() const { return {seed, workers}; }
  std::string manifest_name() const { return command + ".manifest.json"; }

  ssm::IfsSpec load_spec() const {
    if (spec_path.empty()) throw UsageError("--spec is required for " + command);
    if (!fs::is_regular_file(spec_path)) throw UsageError("spec file not found: " + spec_path);
    return ssm::read_ifs_file(spec_path, true);
  }

  fs::path output(const std::string& name) const {
    fs::create_directories(out_dir);
    return out_dir / name;
  }

  void write_json(const std::string& name, json body) const {
    body["manifest"] = manifest_name();
    std::ofstream(output(name)) << body.dump(2) << '\n';
  }

  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) const {
    std::ofstream out(output(name));
    out << "# manifest: " << manifest_name() << '\n';
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << ssm::format_double(row[k]);
      out << '\n';
    }
  }

  void note(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
  void note(const std::string& key, double value) { note(key, ssm::format_double(value)); }
};

unsigned default_workers() {
  if (const char* env = std::getenv("SSMLAB_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

void cmd_validate(Run& run) {
  const ssm::IfsSpec spec = run.load_spec();
  const ssm::Interval hull = ssm::attractor_hull(spec);
  json report{{"status", "ok"},
              {"spec", ssm::to_json(spec)},
              {"hull", {hull.low, hull.high}},
              {"similarity_exponent", ssm::similarity_exponent(spec)}};
  std::cout << report.dump(2) << '\n';
}

void cmd_moments(Run& run, int k) {
  const ssm::IfsSpec spec = run.load_spec();
  const auto m = ssm::moments(spec, static_cast<std::size_t>(k));
  run.write_json("moments.json", {{"k", k}, {"moments", m}});
  for (std::size_t j = 0; j < m.size() && j <= 4; ++j) run.note("m_" + std::to_string(j), m[j]);
}

void cmd_fourier(Run& run, double xi, double tol) {
  const ssm::IfsSpec spec = run.load_spec();
  const ssm::FourierEvaluator mu(spec, tol);
  const ssm::FourierEvaluation e = mu(xi);
  run.write_json("fourier.json", {{"xi", xi},
                                  {"re", e.value.real()},
                                  {"im", e.value.imag()},
                                  {"error_bound", e.error_bound},
                                  {"taylor_order", mu.taylor_order()}});
  run.note("xi", xi);
  run.note("re", e.value.real());
  run.note("im", e.value.imag());
  run.note("abs", std::abs(e.value));
  run.note("error_bound", e.error_bound);
}

void cmd_scan(Run& run, const ssm::ScanOptions& options) {
  const ssm::IfsSpec spec = run.load_spec();
  const ssm::SpectrumScan scan = ssm::spectrum_scan(spec, options, run.mc());
  std::vector<std::vector<double>> rows;
  for (const auto& b : scan.bands) {
    rows.push_back({b.xi_low, b.xi_high, b.sup_abs, static_cast<double>(b.samples)});
  }
  run.write_csv("scan.csv", {"xi_low", "xi_high", "sup_abs_mu_hat", "n_samples"}, rows);
  run.note("bands", std::to_string(scan.bands.size()));
  if (!scan.bands.empty()) run.note("last_band_sup", scan.bands.back().sup_abs);
}

ssm::SpectrumScan read_scan_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open scan file " + path.string());
  ssm::SpectrumScan scan;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "xi_low,xi_high,sup_abs_mu_hat,n_samples") {
        throw InputFormatError(path.string() + ":" + std::to_string(line_no) + ": unexpected header");
      }
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    std::string cell;
    std::vector<double> v;
    try {
      while (std::getline(fields, cell, ',')) v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      v.clear();
    }
    if (v.size() != 4) {
      throw InputFormatError(path.string() + ":" + std::to_string(line_no) + ": expected 4 numbers");
    }
    scan.bands.push_back({v[0], v[1], v[2], static_cast<std::size_t>(v[3])});
  }
  return scan;
}

void cmd_fit(Run& run, const fs::path& scan_path) {
  const ssm::DecayFit fit = ssm::fit_log_decay(read_scan_csv(scan_path));
  run.write_json("fit.json", {{"beta", fit.beta},
                              {"intercept", fit.intercept},
                              {"residual", fit.residual},
                              {"bands_used", fit.bands_used},
                              {"scan", scan_path.string()}});
  run.note("beta", fit.beta);
  run.note("intercept", fit.intercept);
  run.note("residual", fit.residual);
  run.note("bands_used", std::to_string(fit.bands_used));
}

void cmd_renewal(Run& run, double t, std::size_t n, std::size_t bins) {
  const ssm::IfsSpec spec = run.load_spec();
  const ssm::StepDistribution dist = ssm::step_distribution(spec);
  const ssm::LimitOvershootLaw law(dist);
  const auto overshoots = ssm::sample_overshoots(dist, t, n, run.mc());
  const auto histogram = ssm::overshoot_histogram(overshoots, law, bins);
  std::vector<std::vector<double>> rows;
  for (const auto& b : histogram) rows.push_back({b.left, b.right, b.empirical_mass, b.limit_mass});
  run.write_csv("renewal_histogram.csv", {"bin_left", "bin_right", "empirical_mass", "limit_mass"},
                rows);
  ssm::MomentAccumulator mean;
  for (const double y : overshoots) mean.add(y);
  const double ks = ssm::ks_statistic(overshoots, [&](double x) { return law.cdf(x); });
  run.write_json("renewal_ks.json", {{"t", t},
                                     {"n", n},
                                     {"ks", ks},
                                     {"mean_overshoot", mean.mean()},
                                     {"mean_overshoot_se", mean.standard_error()},
                                     {"limit_mean_overshoot", law.mean_overshoot()}});
  run.note("ks", ks);
  run.note("mean_overshoot", mean.mean());
  run.note("limit_mean_overshoot", law.mean_overshoot());
}

void cmd_identity(Run& run, double s, double t, double x, double y, std::optional<double> xi,
                  std::size_t pairs) {
  const ssm::IfsSpec spec = run.load_spec();
  const ssm::IdentityResidual r = ssm::stopping_sum_identity(spec, s, t, x, y);
  json body{{"s", s},
            {"t", t},
            {"x", x},
            {"y", y},
            {"lhs", {r.lhs.real(), r.lhs.imag()}},
            {"rhs", {r.rhs.real(), r.rhs.imag()}},
            {"residual", r.residual}};
  run.note("residual", r.residual);
  if (xi) {
    const ssm::DoubleSumEstimate d = ssm::double_sum_bound(spec, *xi, t, pairs, run.mc());
    body["double_sum"] = {{"xi", *xi},
                          {"pairs", pairs},
                          {"estimate", d.estimate},
                          {"standard_error", d.standard_error},
                          {"imaginary", d.imaginary},
                          {"imaginary_standard_error", d.imaginary_standard_error}};
    run.note("double_sum", d.estimate);
    run.note("double_sum_se", d.standard_error);
  }
  run.write_json("identity.json", body);
}

void cmd_dioph(Run& run, int depth, double l, double b_max, double grid_step) {
  const ssm::IfsSpec spec = run.load_spec();
  const ssm::StepDistribution dist = ssm::step_distribution(spec);
  const ssm::GroupClassification g = ssm::classify_group(spec, depth);

  json report{{"verdict", ssm::to_string(g.verdict)}, {"depth", depth}};
  report["witness"] = g.witness ? json::array({g.witness->first, g.witness->second}) : json(nullptr);
  report["generator"] = g.generator ? json(*g.generator) : json(nullptr);
  report["convergents"] = json::array();
  report["l_estimate"] = nullptr;

  std::optional<double> ratio;
  if (g.witness) {
    ratio = std::log(spec.map(g.witness->second).ratio) / std::log(spec.map(g.witness->first).ratio);
  } else if (dist.size() > 1) {
    ratio = dist.atoms()[1].step / dist.atoms()[0].step;
  }
  if (ratio) {
    report["log_ratio"] = *ratio;
    for (const auto& c : ssm::continued_fraction(*ratio, depth).convergents) {
      report["convergents"].push_back({c.p, c.q});
    }
    try {
      const ssm::DiophantineEstimate e = ssm::diophantine_exponent_estimate(*ratio, depth);
      report["l_estimate"] = e.l_estimate;
      report["local_exponents"] = e.exponents;
    } catch (const ssm::Error& e) {
      if (e.code() != ssm::ErrorCode::kRationalInput) throw;
    }
  }

  std::vector<std::vector<double>> rows;
  const ssm::DiophantineScan scan = ssm::weakly_dioph_scan(
      dist, l, b_max, grid_step, [&](double b, double gap, double w) { rows.push_back({b, gap, w}); });
  run.write_csv("dioph_scan.csv", {"b", "abs_one_minus_laplace", "weighted"}, rows);
  report["scan"] = {{"l", l},
                    {"b_max", b_max},
                    {"grid_step", grid_step},
                    {"minimum", scan.minimum},
                    {"argmin", scan.argmin}};
  run.write_json("dioph_report.json", report);

  run.note("verdict", ssm::to_string(g.verdict));
  if (g.generator) run.note("generator", *g.generator);
  if (report["l_estimate"].is_number()) run.note("l_estimate", report["l_estimate"].get<double>());
  run.note("scan_minimum", scan.minimum);
  run.note("scan_argmin", scan.argmin);
}

std::vector<double> geometric_radii(double r_max, double r_min, int count) {
  std::vector<double> radii;
  for (int k = 0; k < count; ++k) {
    const double f = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
    radii.push_back(r_max * std::pow(r_min / r_max, f));
  }
  return radii;
}

void cmd_holder(Run& run, std::vector<double> radii, std::size_t n) {
  const ssm::IfsSpec spec = run.load_spec();
  const ssm::HolderFit fit = ssm::holder_exponent_fit(spec, radii, n, run.mc());
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < fit.radii.size(); ++k) {
    rows.push_back({fit.radii[k], fit.masses[k].estimate, fit.masses[k].standard_error});
  }
  run.write_csv("holder.csv", {"radius", "mass_estimate", "se"}, rows);
  const auto [lo, hi] = std::minmax_element(fit.radii.begin(), fit.radii.end());
  run.write_json("holder.json", {{"alpha", fit.alpha},
                                 {"C", fit.c_constant},
                                 {"intercept", fit.intercept},
                                 {"residual", fit.residual},
                                 {"radii_range", {*lo, *hi}}});
  run.note("alpha", fit.alpha);
  run.note("C", fit.c_constant);
  run.note("residual", fit.residual);
}

void cmd_corr(Run& run, const std::vector<double>& deltas, std::size_t n) {
  const ssm::IfsSpec spec = run.load_spec();
  std::vector<std::vector<double>> rows;
  for (const double delta : deltas) {
    const ssm::McEstimate e = ssm::correlation_mass(spec, delta, n, run.mc());
    rows.push_back({delta, e.estimate, e.standard_error});
    run.note("mass(" + ssm::format_double(delta) + ")", e.estimate);
  }
  run.write_csv("corr.csv", {"radius", "mass_estimate", "se"}, rows);
}

void print_summary(const Run& run) {
  if (run.summary.empty()) return;
  std::size_t width = 0;
  for (const auto& [k, v] : run.summary) width = std::max(width, k.size());
  std::cout << run.command << '\n';
  for (const auto& [k, v] : run.summary) {
    std::cout << "  " << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << '\n';
  }
}

void write_manifest(const Run& run, double wall_seconds) {
  json manifest{{"spec", run.spec_path.empty() ? json(nullptr) : json(run.spec_path)},
                {"command", run.command},
                {"parameters", run.parameters},
                {"seed", run.seed},
                {"workers", run.workers},
                {"version", SSMLAB_VERSION},
                {"wall_time_seconds", wall_seconds}};
  std::ofstream(run.output(run.manifest_name())) << manifest.dump(2) << '\n';
}

int report_error(const std::string& name, const std::string& message, int code,
                 std::optional<std::pair<std::size_t, std::size_t>> position = std::nullopt) {
  json err{{"status", "error"}, {"error", name}, {"message", message}, {"exit_code", code}};
  if (position) {
    err["line"] = position->first;
    err["column"] = position->second;
  }
  std::cout << err.dump(2) << '\n';
  std::cerr << "ssmlab: " << name << ": " << message << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier, renewal and regularity experiments on self-similar measures"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", SSMLAB_VERSION);

  Run run;
  run.workers = default_workers();
  app.add_option("--spec", run.spec_path, "IFS spec file (JSON)");
  app.add_option("--out", run.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", run.seed, "Master seed")->capture_default_str();
  app.add_option("--workers", run.workers, "Worker threads (default $SSMLAB_WORKERS or 1)")
      ->check(CLI::Range(1u, 1024u));

  auto* validate = app.add_subcommand("validate", "Validate and normalize a spec");

  int moments_k = 10;
  auto* moments = app.add_subcommand("moments", "Moments of mu");
  moments->add_option("--k", moments_k, "Highest order")->check(CLI::Range(0, 200))->capture_default_str();

  double xi = 0.0;
  double fourier_tol = 1e-10;
  auto* fourier = app.add_subcommand("fourier", "Certified evaluation of mu^(xi)");
  fourier->add_option("--xi", xi, "Frequency")->required();
  fourier->add_option("--tol", fourier_tol, "Error tolerance")->check(CLI::PositiveNumber)->capture_default_str();

  ssm::ScanOptions scan_options;
  auto* scan = app.add_subcommand("scan", "Banded sup |mu^| scan");
  scan->add_option("--xi-min", scan_options.xi_min)->check(CLI::PositiveNumber)->capture_default_str();
  scan->add_option("--xi-max", scan_options.xi_max)->check(CLI::PositiveNumber)->capture_default_str();
  scan->add_option("--bands-per-decade", scan_options.bands_per_decade)
      ->check(CLI::PositiveNumber)->capture_default_str();
  scan->add_option("--samples", scan_options.samples_per_band)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  scan->add_option("--tol", scan_options.tolerance)->check(CLI::PositiveNumber)->capture_default_str();

  std::string fit_scan;
  auto* fit = app.add_subcommand("fit", "Fit sup |mu^| ~ C (log xi)^-beta to a scan");
  fit->add_option("--scan", fit_scan, "Scan CSV (default <out>/scan.csv)");

  double renewal_t = 0.0;
  std::size_t renewal_n = 1'000'000;
  std::size_t renewal_bins = 40;
  auto* renewal = app.add_subcommand("renewal", "Overshoot law at level t");
  renewal->add_option("--t", renewal_t, "Level")->required()->check(CLI::PositiveNumber);
  renewal->add_option("--n", renewal_n, "Trajectories")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 34))->capture_default_str();
  renewal->add_option("--bins", renewal_bins)->check(CLI::Range(1, 100000))->capture_default_str();

  double id_s = 10.0;
  double id_t = 3.0;
  double id_x = 0.25;
  double id_y = 0.75;
  std::optional<double> id_xi;
  std::size_t id_pairs = 100000;
  auto* identity = app.add_subcommand("identity", "Stopping-sum identity and double sum");
  identity->add_option("--s", id_s)->capture_default_str();
  identity->add_option("--t", id_t)->check(CLI::PositiveNumber)->capture_default_str();
  identity->add_option("--x", id_x)->capture_default_str();
  identity->add_option("--y", id_y)->capture_default_str();
  identity->add_option("--xi", id_xi, "Also estimate the double sum at this frequency");
  identity->add_option("--pairs", id_pairs)->check(CLI::Range(std::size_t{1}, std::size_t{1} << 34))->capture_default_str();

  int dioph_depth = 40;
  double dioph_l = 2.0;
  double dioph_b_max = 100.0;
  double dioph_step = 0.01;
  auto* dioph = app.add_subcommand("dioph", "Lattice and diophantine diagnostics");
  dioph->add_option("--depth", dioph_depth)->check(CLI::Range(1, ssm::kMaxContinuedFractionTerms))->capture_default_str();
  dioph->add_option("--l", dioph_l)->check(CLI::PositiveNumber)->capture_default_str();
  dioph->add_option("--b-max", dioph_b_max)->capture_default_str();
  dioph->add_option("--grid-step", dioph_step)->check(CLI::PositiveNumber)->capture_default_str();

  std::vector<double> holder_radii;
  double holder_r_max = 0.1;
  double holder_r_min = 1e-4;
  int holder_count = 10;
  std::size_t holder_n = 100000;
  auto* holder = app.add_subcommand("holder", "Correlation exponent fit");
  holder->add_option("--radii", holder_radii, "Explicit radii (overrides the geometric grid)");
  holder->add_option("--r-max", holder_r_max)->check(CLI::PositiveNumber)->capture_default_str();
  holder->add_option("--r-min", holder_r_min)->check(CLI::PositiveNumber)->capture_default_str();
  holder->add_option("--count", holder_count)->check(CLI::Range(2, 1000))->capture_default_str();
  holder->add_option("--n", holder_n, "Sample points")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30))->capture_default_str();

  std::vector<double> corr_deltas;
  std::size_t corr_n = 1'000'000;
  auto* corr = app.add_subcommand("corr", "Correlation mass (mu x mu)(|x - y| <= delta)");
  corr->add_option("--delta", corr_deltas)->required();
  corr->add_option("--n", corr_n, "Independent pairs")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 34))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("ParameterError", e.what(), kBadParameter);
  }

  const auto start = std::chrono::steady_clock::now();
  const bool is_validate = validate->parsed();
  try {
    if (is_validate) {
      run.command = "validate";
      cmd_validate(run);
      return kOk;
    }
    if (moments->parsed()) {
      run.command = "moments";
      run.parameters = {{"k", moments_k}};
      cmd_moments(run, moments_k);
    } else if (fourier->parsed()) {
      run.command = "fourier";
      run.parameters = {{"xi", xi}, {"tol", fourier_tol}};
      cmd_fourier(run, xi, fourier_tol);
    } else if (scan->parsed()) {
      run.command = "scan";
      run.parameters = {{"xi_min", scan_options.xi_min},
                        {"xi_max", scan_options.xi_max},
                        {"bands_per_decade", scan_options.bands_per_decade},
                        {"samples", scan_options.samples_per_band},
                        {"tol", scan_options.tolerance}};
      if (scan_options.xi_max <= scan_options.xi_min) throw UsageError("--xi-max must exceed --xi-min");
      cmd_scan(run, scan_options);
    } else if (fit->parsed()) {
      run.command = "fit";
      const fs::path path = fit_scan.empty() ? run.out_dir / "scan.csv" : fs::path(fit_scan);
      run.parameters = {{"scan", path.string()}};
      cmd_fit(run, path);
    } else if (renewal->parsed()) {
      run.command = "renewal";
      run.parameters = {{"t", renewal_t}, {"n", renewal_n}, {"bins", renewal_bins}};
      cmd_renewal(run, renewal_t, renewal_n, renewal_bins);
    } else if (identity->parsed()) {
      run.command = "identity";
      run.parameters = {{"s", id_s}, {"t", id_t}, {"x", id_x}, {"y", id_y}, {"pairs", id_pairs}};
      run.parameters["xi"] = id_xi ? json(*id_xi) : json(nullptr);
      cmd_identity(run, id_s, id_t, id_x, id_y, id_xi, id_pairs);
    } else if (dioph->parsed()) {
      run.command = "dioph";
      run.parameters = {{"depth", dioph_depth}, {"l", dioph_l}, {"b_max", dioph_b_max}, {"grid_step", dioph_step}};
      cmd_dioph(run, dioph_depth, dioph_l, dioph_b_max, dioph_step);
    } else if (holder->parsed()) {
      run.command = "holder";
      if (holder_radii.empty()) {
        if (holder_r_min >= holder_r_max) throw UsageError("--r-min must be below --r-max");
        holder_radii = geometric_radii(holder_r_max, holder_r_min, holder_count);
      }
      run.parameters = {{"radii", holder_radii}, {"n", holder_n}};
      cmd_holder(run, holder_radii, holder_n);
    } else if (corr->parsed()) {
      run.command = "corr";
      run.parameters = {{"delta", corr_deltas}, {"n", corr_n}};
      cmd_corr(run, corr_deltas, corr_n);
    }
  } catch (const UsageError& e) {
    return report_error("ParameterError", e.what(), kBadParameter);
  } catch (const InputFormatError& e) {
    return report_error("InputFormatError", e.what(), kMalformedInput);
  } catch (const ssm::SpecFileError& e) {
    std::optional<std::pair<std::size_t, std::size_t>> position;
    if (e.line() > 0) position = std::make_pair(e.line(), e.column());
    return report_error("SpecFileError", e.what(), kMalformedInput, position);
  } catch (const ssm::ExplosionError& e) {
    json err{{"status", "error"},
             {"error", e.name()},
             {"message", e.what()},
             {"estimated_count", e.estimated_count()},
             {"exit_code", kComputation}};
    std::cout << err.dump(2) << '\n';
    std::cerr << "ssmlab: " << e.name() << ": " << e.what() << '\n';
    return kComputation;
  } catch (const ssm::Error& e) {
    int code = kComputation;
    if (ssm::is_validation_error(e.code())) {
      code = kValidation;
    } else if (e.code() == ssm::ErrorCode::kInvalidArgument) {
      code = kBadParameter;
    }
    return report_error(std::string(e.name()), e.what(), code);
  } catch (const fs::filesystem_error& e) {
    return report_error("OutputError", e.what(), kComputation);
  } catch (const std::exception& e) {
    return report_error("ComputationError", e.what(), kComputation);
  }

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  write_manifest(run, elapsed.count());
  print_summary(run);
  return kOk;
}
