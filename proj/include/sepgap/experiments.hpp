#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sepgap/entanglement.hpp"
#include "sepgap/hamiltonians.hpp"
#include "sepgap/io.hpp"
#include "sepgap/parallel.hpp"
#include "sepgap/product_opt.hpp"
#include "sepgap/tensor.hpp"
#include "sepgap/version.hpp"

namespace sepgap {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string command;

  int l = 0;     // first (or only) qubit count; 0 = command default
  int lmax = 0;  // end of the L range; 0 = command default

  double h = 0.0;  // field (fig1a, gap) or grid start (fig1b)
  double hmax = 5.0;
  double hstep = 0.1;

  int samples = 100;
  std::uint64_t seed = 1;
  int restarts = 12;
  int dirs = 64;  // direction budget for certified bounds
  int refine = 48;
  double tol = 1e-10;
  bool full_recursion = false;  // peel to single qubits instead of the 16-dim block

  std::string out;  // output stem; files are <out>.csv / <out>.manifest.json / <out>.svg
  bool emit_svg = false;
  std::string convention = "auto";  // paper | rescaled | auto
  int threads = 1;

  int n_pure = 10;      // fig3 random pure states
  int n_prod = 10;      // fig3 random product states
  int scatter = 10000;  // fig3 dense random-state scatter

  // gap command model selection
  std::string model;
  double a = 0.0;
  std::vector<double> a_list;
  std::string instance_path;
};

struct CommandOutputs {
  std::string csv_path;
  std::string manifest_path;
  std::string svg_path;  // empty unless emitted
  json manifest;
};

// conventional name used to hand the validated LDEC choice to later commands
inline std::string convention_store_path(const std::string& out_stem) {
  const std::filesystem::path p(out_stem);
  return (p.has_parent_path() ? p.parent_path() / "ldec_convention.json"
                              : std::filesystem::path("ldec_convention.json"))
      .string();
}

namespace detail {

inline json config_echo(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["l"] = c.l;
  j["lmax"] = c.lmax;
  j["h"] = c.h;
  j["hmax"] = c.hmax;
  j["hstep"] = c.hstep;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["restarts"] = c.restarts;
  j["dirs"] = c.dirs;
  j["refine"] = c.refine;
  j["tol"] = c.tol;
  j["full_recursion"] = c.full_recursion;
  j["out"] = c.out;
  j["emit_svg"] = c.emit_svg;
  j["convention"] = c.convention;
  j["threads"] = c.threads;
  j["n_pure"] = c.n_pure;
  j["n_prod"] = c.n_prod;
  j["scatter"] = c.scatter;
  if (!c.model.empty()) {
    j["model"] = c.model;
    j["a"] = c.a;
    j["a_list"] = c.a_list;
    j["instance_path"] = c.instance_path;
  }
  return j;
}

inline std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline CommandOutputs finalize(const RunConfig& cfg, const CsvBuilder& csv, json manifest,
                               const Stopwatch& watch, const std::string& svg = "") {
  if (cfg.out.empty()) throw std::invalid_argument("output stem is empty");
  CommandOutputs out;
  manifest["command"] = cfg.command;
  manifest["config"] = config_echo(cfg);
  manifest["library_version"] = version;
  manifest["seed"] = cfg.seed;
  manifest["rows"] = csv.rows();
  manifest["generated_at"] = timestamp_utc();  // only non-reproducible field
  manifest["wall_time_s"] = watch.seconds();
  out.csv_path = cfg.out + ".csv";
  out.manifest_path = cfg.out + ".manifest.json";
  write_text_file(out.csv_path, csv.str());
  if (!svg.empty() && cfg.emit_svg) {
    out.svg_path = cfg.out + ".svg";
    write_text_file(out.svg_path, svg);
  }
  out.manifest = std::move(manifest);
  write_text_file(out.manifest_path, out.manifest.dump(2) + "\n");
  return out;
}

inline SeesawParams seesaw_params(const RunConfig& cfg, std::uint64_t seed) {
  SeesawParams p;
  p.restarts = cfg.restarts;
  p.tol = cfg.tol;
  p.seed = seed;
  p.threads = 1;  // callers parallelize over samples/grid points
  return p;
}

inline CertifiedParams certified_params(const RunConfig& cfg, std::uint64_t seed) {
  CertifiedParams p;
  p.direction_budget = cfg.dirs;
  p.refine_rounds = cfg.refine;
  p.terminal_dim = cfg.full_recursion ? 2 : 16;
  p.seesaw = seesaw_params(cfg, seed);
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ordinary least squares with standard errors
// ---------------------------------------------------------------------------

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double stderr_intercept = 0.0;
};

inline FitResult fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  if (n != ys.size() || n < 3) throw std::invalid_argument("fit_linear: need at least 3 points");
  double xm = 0, ym = 0;
  for (size_t i = 0; i < n; ++i) {
    xm += xs[i];
    ym += ys[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
  }
  if (sxx <= 1e-30) throw std::invalid_argument("fit_linear: degenerate x values");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  double ssr = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    ssr += r * r;
  }
  const double s2 = ssr / static_cast<double>(n - 2);
  fit.stderr_slope = std::sqrt(s2 / sxx);
  fit.stderr_intercept = std::sqrt(s2 * (1.0 / n + xm * xm / sxx));
  return fit;
}

// ---------------------------------------------------------------------------
// fig1a: E0 and product minimum per site versus chain length
// ---------------------------------------------------------------------------

inline CommandOutputs cmd_fig1a(RunConfig cfg) {
  detail::Stopwatch watch;
  cfg.command = "fig1a";
  if (cfg.l == 0) cfg.l = 2;
  if (cfg.lmax == 0) cfg.lmax = 10;
  if (cfg.l < 2 || cfg.lmax < cfg.l || cfg.lmax > 12)
    throw std::invalid_argument("fig1a: L range must satisfy 2 <= l <= lmax <= 12");

  const int count = cfg.lmax - cfg.l + 1;
  struct Row {
    int l;
    double e0, lambda, gap;
  };
  std::vector<Row> rows(count);
  parallel_for(count, cfg.threads, [&](int i) {
    const int l = cfg.l + i;
    const Operator h = heisenberg_xz(l, cfg.h);
    const double e0 = min_eig(h).value;
    const double lambda = seesaw(h, l, detail::seesaw_params(cfg, derive_seed(cfg.seed, l))).value;
    rows[i] = {l, e0 / l, lambda / l, (lambda - e0) / l};
  });

  CsvBuilder csv({"L", "E0_per_site", "lambda_sep_per_site", "gap_per_site"});
  for (const auto& r : rows)
    csv.add_row({std::to_string(r.l), fmt_g17(r.e0), fmt_g17(r.lambda), fmt_g17(r.gap)});

  json manifest;
  std::vector<double> inv_l, e0_per_site;
  for (const auto& r : rows)
    if (r.l >= 6) {
      inv_l.push_back(1.0 / r.l);
      e0_per_site.push_back(r.e0);
    }
  if (inv_l.size() >= 3) {
    const auto fit = fit_linear(inv_l, e0_per_site);
    manifest["fit"] = {{"model", "E0/L = b/L + c"},
                       {"b", fit.slope},
                       {"c", fit.intercept},
                       {"stderr_b", fit.stderr_slope},
                       {"stderr_c", fit.stderr_intercept},
                       {"points_used_l_min", 6}};
  }
  manifest["analytic"] = {{"lambda_per_site", "1/L - 1"},
                          {"gap_slope_asymptotic", analytic::gap_slope()}};

  std::string svg;
  if (cfg.emit_svg) {
    double ymin = 0, ymax = 0;
    std::vector<std::pair<double, double>> e0_pts, lam_pts;
    for (const auto& r : rows) {
      e0_pts.push_back({double(r.l), r.e0});
      lam_pts.push_back({double(r.l), r.lambda});
      ymin = std::min({ymin, r.e0, r.lambda});
      ymax = std::max({ymax, r.e0, r.lambda});
    }
    SvgPlot plot(cfg.l, cfg.lmax, ymin, ymax, "ground vs product minimum per site", "L",
                 "energy / L");
    plot.polyline(e0_pts, "#1f77b4");
    plot.scatter(e0_pts, "#1f77b4");
    plot.polyline(lam_pts, "#d62728");
    plot.scatter(lam_pts, "#d62728");
    svg = plot.str();
  }
  return detail::finalize(cfg, csv, std::move(manifest), watch, svg);
}

// ---------------------------------------------------------------------------
// fig1b: separability gap per site versus the field
// ---------------------------------------------------------------------------

inline CommandOutputs cmd_fig1b(RunConfig cfg) {
  detail::Stopwatch watch;
  cfg.command = "fig1b";
  if (cfg.l == 0) cfg.l = 8;
  if (cfg.l < 2 || cfg.l > 12) throw std::invalid_argument("fig1b: L out of dense budget");
  if (cfg.hstep <= 0 || cfg.hmax < cfg.h) throw std::invalid_argument("fig1b: bad field grid");

  std::vector<double> grid;
  for (double x = cfg.h; x <= cfg.hmax + 1e-12; x += cfg.hstep) grid.push_back(x);
  // include the analytic product-point candidate so the dip is resolvable
  const double neel = analytic::neel_minimum_field();
  if (neel > cfg.h && neel < cfg.hmax) grid.push_back(neel);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             grid.end());

  const int l = cfg.l;
  std::vector<double> gap(grid.size());
  parallel_for(static_cast<int>(grid.size()), cfg.threads, [&](int i) {
    const Operator h = heisenberg_xz(l, grid[i]);
    const double e0 = min_eig(h).value;
    const double lambda = seesaw(h, l, detail::seesaw_params(cfg, derive_seed(cfg.seed, i))).value;
    gap[i] = (lambda - e0) / l;
  });

  CsvBuilder csv({"h", "gap_per_site"});
  for (size_t i = 0; i < grid.size(); ++i) csv.add_row({fmt_g17(grid[i]), fmt_g17(gap[i])});

  // interior minimum of the sampled curve
  json manifest;
  if (grid.size() >= 3) {
    size_t arg = 1;
    for (size_t i = 1; i + 1 < grid.size(); ++i)
      if (gap[i] < gap[arg]) arg = i;
    manifest["interior_minimum"] = {{"h", grid[arg]}, {"gap_per_site", gap[arg]}};
  }
  manifest["analytic"] = {{"neel_field", neel}};

  std::string svg;
  if (cfg.emit_svg) {
    std::vector<std::pair<double, double>> pts;
    double ymax = 0;
    for (size_t i = 0; i < grid.size(); ++i) {
      pts.push_back({grid[i], gap[i]});
      ymax = std::max(ymax, gap[i]);
    }
    SvgPlot plot(cfg.h, cfg.hmax, 0, ymax, "separability gap per site", "h", "gap / L");
    plot.polyline(pts, "#2ca02c");
    plot.vline(neel, "#888888");
    svg = plot.str();
  }
  return detail::finalize(cfg, csv, std::move(manifest), watch, svg);
}

// ---------------------------------------------------------------------------
// fig2: distribution of the product minimum for GOE Hamiltonians
// ---------------------------------------------------------------------------

inline CommandOutputs cmd_fig2(RunConfig cfg) {
  detail::Stopwatch watch;
  cfg.command = "fig2";
  if (cfg.l == 0) cfg.l = 3;
  if (cfg.lmax == 0) cfg.lmax = 8;
  if (cfg.l < 2 || cfg.lmax < cfg.l || cfg.lmax > 8)
    throw std::invalid_argument("fig2: GOE L range must satisfy 2 <= l <= lmax <= 8");
  if (cfg.samples < 1) throw std::invalid_argument("fig2: samples must be positive");

  struct Row {
    int l, sample;
    double upper, lower, e0;
  };
  const int l_count = cfg.lmax - cfg.l + 1;
  std::vector<Row> rows(static_cast<size_t>(l_count) * cfg.samples);
  parallel_for(static_cast<int>(rows.size()), cfg.threads, [&](int idx) {
    const int l = cfg.l + idx / cfg.samples;
    const int s = idx % cfg.samples;
    const std::uint64_t tag = (static_cast<std::uint64_t>(l) << 32) | static_cast<std::uint64_t>(s);
    const Operator h = goe_sample({Eigen::Index{1} << l, derive_seed(cfg.seed, 2 * tag)});
    auto params = detail::certified_params(cfg, derive_seed(cfg.seed, 2 * tag + 1));
    const auto bounds = certified_lambda_min(h, l, params);
    rows[idx] = {l, s, bounds.upper, bounds.lower, eigenvalues_sym(h)(0)};
  });

  CsvBuilder csv({"L", "sample_id", "lambda_sep_upper", "lambda_cert_lower", "E0"});
  for (const auto& r : rows)
    csv.add_row({std::to_string(r.l), std::to_string(r.sample), fmt_g17(r.upper),
                 fmt_g17(r.lower), fmt_g17(r.e0)});

  json manifest;
  json histograms = json::object();
  for (int l = cfg.l; l <= cfg.lmax; ++l) {
    std::vector<double> vals;
    double mean_e0 = 0;
    for (const auto& r : rows)
      if (r.l == l) {
        vals.push_back(r.upper);
        mean_e0 += r.e0;
      }
    mean_e0 /= static_cast<double>(vals.size());
    const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
    const int bins = 24;
    const double lo = *mn, hi = std::max(*mx, *mn + 1e-12);
    std::vector<int> counts(bins, 0);
    for (double v : vals) {
      int b = static_cast<int>((v - lo) / (hi - lo) * bins);
      counts[std::clamp(b, 0, bins - 1)]++;
    }
    std::vector<double> edges(bins + 1);
    for (int b = 0; b <= bins; ++b) edges[b] = lo + (hi - lo) * b / bins;
    const auto marks = goe_bounds(std::pow(2.0, l), l / 2.0);  // fixed M = 4
    histograms["L=" + std::to_string(l)] = {{"edges", edges},
                                            {"counts", counts},
                                            {"goe_lower", marks.lower},
                                            {"goe_upper", marks.upper},
                                            {"mean_E0", mean_e0}};
  }
  manifest["histograms"] = histograms;
  manifest["partition"] = "M=4, J=L/2";

  std::string svg;
  if (cfg.emit_svg) {
    std::vector<std::pair<double, double>> upper_pts, lower_pts, e0_pts;
    for (const auto& r : rows) {
      upper_pts.push_back({double(r.l), r.upper});
      lower_pts.push_back({double(r.l), r.lower});
      e0_pts.push_back({double(r.l), r.e0});
    }
    SvgPlot plot(cfg.l - 0.5, cfg.lmax + 0.5, -2.6, 0.4, "product minimum distribution", "L",
                 "energy");
    plot.scatter(upper_pts, "#1f77b4", 2);
    plot.scatter(lower_pts, "#ff7f0e", 2);
    plot.scatter(e0_pts, "#2ca02c", 2);
    svg = plot.str();
  }
  return detail::finalize(cfg, csv, std::move(manifest), watch, svg);
}

// ---------------------------------------------------------------------------
// fig3: expectation value versus Meyer-Wallach Q2 for one GOE observable
// ---------------------------------------------------------------------------

namespace detail {

inline LdecConvention resolve_convention(const RunConfig& cfg, json& manifest) {
  if (cfg.convention == "paper" || cfg.convention == "rescaled") {
    manifest["ldec_convention"] = cfg.convention;
    manifest["ldec_convention_source"] = "explicit";
    return ldec_convention_from_string(cfg.convention);
  }
  if (cfg.convention != "auto")
    throw std::invalid_argument("unknown convention: " + cfg.convention);
  const std::string store = convention_store_path(cfg.out);
  std::ifstream in(store);
  if (in) {
    json j;
    in >> j;
    const std::string name = j.at("convention").get<std::string>();
    manifest["ldec_convention"] = name;
    manifest["ldec_convention_source"] = store;
    return ldec_convention_from_string(name);
  }
  manifest["ldec_convention"] = "rescaled";
  manifest["ldec_convention_source"] = "default (no validation record found)";
  return LdecConvention::rescaled;
}

}  // namespace detail

inline CommandOutputs cmd_fig3(RunConfig cfg) {
  detail::Stopwatch watch;
  cfg.command = "fig3";
  if (cfg.l == 0) cfg.l = 7;
  if (cfg.l < 2 || cfg.l > 8) throw std::invalid_argument("fig3: GOE L out of budget");
  if (cfg.n_pure < 0 || cfg.n_prod < 0 || cfg.scatter < 0)
    throw std::invalid_argument("fig3: negative sample count");

  const int l = cfg.l;
  const Eigen::Index n = Eigen::Index{1} << l;
  const Operator a = goe_sample({n, derive_seed(cfg.seed, 0)});
  const double mean = std::real(a.trace()) / static_cast<double>(n);

  json manifest;
  const LdecConvention conv = detail::resolve_convention(cfg, manifest);
  const double threshold = ldec_threshold(a, l / 2.0, conv);

  struct Row {
    std::string kind;
    double expectation, q2;
  };
  const auto sys = eigen_sym(a);
  std::vector<Row> rows(n);
  parallel_for(static_cast<int>(n), cfg.threads, [&](int k) {
    rows[k] = {"eigenstate", sys.values(k), meyer_wallach_qk(sys.vectors.col(k), l, 2)};
  });

  auto append_random = [&](const std::string& kind, int count, std::uint64_t salt) {
    const size_t base = rows.size();
    rows.resize(base + count);
    parallel_for(count, cfg.threads, [&](int i) {
      if (kind == "product") {
        const PureState psi = materialize(random_product_state(l, derive_seed(cfg.seed, salt + i)));
        rows[base + i] = {kind, std::real(psi.dot(a * psi)), meyer_wallach_qk(psi, l, 2)};
      } else {
        const PureState psi = random_haar_state(n, derive_seed(cfg.seed, salt + i));
        rows[base + i] = {kind, std::real(psi.dot(a * psi)), meyer_wallach_qk(psi, l, 2)};
      }
    });
  };
  append_random("pure", cfg.n_pure, 1u << 20);
  append_random("product", cfg.n_prod, 2u << 20);
  append_random("scatter", cfg.scatter, 3u << 20);

  CsvBuilder csv({"state_kind", "expectation", "Q2"});
  for (const auto& r : rows) csv.add_row({r.kind, fmt_g17(r.expectation), fmt_g17(r.q2)});

  manifest["barycenter"] = mean;
  manifest["ldec_threshold"] = threshold;
  manifest["bound_band"] = {mean - threshold, mean + threshold};
  manifest["spectrum_range"] = {sys.values(0), sys.values(n - 1)};

  std::string svg;
  if (cfg.emit_svg) {
    SvgPlot plot(sys.values(0) - 0.2, sys.values(n - 1) + 0.2, -0.05, 1.05,
                 "expectation vs Meyer-Wallach Q2", "<A>", "Q2");
    std::vector<std::pair<double, double>> eig, pure, prod, scat;
    for (const auto& r : rows) {
      if (r.kind == "eigenstate") eig.push_back({r.expectation, r.q2});
      if (r.kind == "pure") pure.push_back({r.expectation, r.q2});
      if (r.kind == "product") prod.push_back({r.expectation, r.q2});
      if (r.kind == "scatter") scat.push_back({r.expectation, r.q2});
    }
    plot.scatter(scat, "#ffdddd", 1.5);
    plot.scatter(eig, "#000000", 2.5);
    plot.scatter(pure, "#e6b800", 3.5);
    plot.scatter(prod, "#2ca02c", 3.5);
    plot.vline(mean - threshold, "#1f77b4");
    plot.vline(mean + threshold, "#1f77b4");
    svg = plot.str();
  }
  return detail::finalize(cfg, csv, std::move(manifest), watch, svg);
}

// ---------------------------------------------------------------------------
// gap: certified separability-gap report for one Hamiltonian
// ---------------------------------------------------------------------------

namespace detail {

struct ModelBuild {
  Operator h;
  int l = 0;
  json notes = json::object();
};

inline ModelBuild build_model(const RunConfig& cfg) {
  ModelBuild mb;
  if (cfg.model == "heisenberg") {
    mb.l = cfg.l ? cfg.l : 8;
    mb.h = heisenberg_xz(mb.l, cfg.h);
  } else if (cfg.model == "antidiag2") {
    mb.l = 2;
    mb.h = antidiag_two_qubit(cfg.a);
    if (cfg.a < 0.0 || cfg.a > 1.0) mb.notes["warning"] = "a outside the reference regime [0, 1]";
  } else if (cfg.model == "alltoall") {
    mb.l = cfg.l ? cfg.l : 4;
    mb.h = all_to_all(mb.l);
  } else if (cfg.model == "antidiagfam") {
    if (cfg.a_list.empty()) throw std::invalid_argument("antidiagfam: missing coefficient list");
    mb.l = static_cast<int>(cfg.a_list.size());
    mb.h = antidiag_family(cfg.a_list);
  } else if (cfg.model == "ising") {
    if (cfg.instance_path.empty()) throw std::invalid_argument("ising: missing instance file");
    const IsingInstance inst = load_ising(cfg.instance_path);
    mb.l = inst.sites;
    mb.h = ising_chain(inst);
  } else if (cfg.model == "goe") {
    mb.l = cfg.l ? cfg.l : 6;
    mb.h = goe_sample({Eigen::Index{1} << mb.l, cfg.seed});
  } else {
    throw std::invalid_argument("unknown model: " + cfg.model);
  }
  if (mb.l > 12) throw std::invalid_argument("model exceeds the dense budget L <= 12");
  return mb;
}

}  // namespace detail

inline CommandOutputs cmd_gap(RunConfig cfg) {
  detail::Stopwatch watch;
  cfg.command = "gap";
  auto mb = detail::build_model(cfg);

  const double e0 = min_eig(mb.h).value;
  auto params = detail::certified_params(cfg, derive_seed(cfg.seed, 42));
  params.threads = cfg.threads;
  params.seesaw.threads = cfg.threads;
  const auto bounds = certified_lambda_min(mb.h, mb.l, params);

  CsvBuilder csv({"model", "L", "E0", "lambda_lower", "lambda_upper", "gap_lower", "gap_upper"});
  csv.add_row({cfg.model, std::to_string(mb.l), fmt_g17(e0), fmt_g17(bounds.lower),
               fmt_g17(bounds.upper), fmt_g17(bounds.lower - e0), fmt_g17(bounds.upper - e0)});

  json manifest;
  manifest["model"] = cfg.model;
  manifest["L"] = mb.l;
  manifest["E0"] = e0;
  manifest["lambda_min_product"] = {{"lower", bounds.lower},
                                    {"upper", bounds.upper},
                                    {"direction_budget", bounds.direction_budget},
                                    {"depth", bounds.depth}};
  manifest["gap_interval"] = {bounds.lower - e0, bounds.upper - e0};
  json witness = json::array();
  for (const auto& ang : bounds.witness.angles)
    witness.push_back({{"theta", ang.theta}, {"phi", ang.phi}});
  manifest["witness_angles"] = witness;
  if (!mb.notes.empty()) manifest["notes"] = mb.notes;
  return detail::finalize(cfg, csv, std::move(manifest), watch);
}

// ---------------------------------------------------------------------------
// validate-ldec: empirical selection of the sound threshold convention
// ---------------------------------------------------------------------------

inline CommandOutputs cmd_validate_ldec(RunConfig cfg) {
  detail::Stopwatch watch;
  cfg.command = "validate-ldec";
  if (cfg.l == 0) cfg.l = 5;
  if (cfg.lmax == 0) cfg.lmax = 7;
  if (cfg.l < 3 || cfg.lmax < cfg.l || cfg.lmax > 8)
    throw std::invalid_argument("validate-ldec: L range must satisfy 3 <= l <= lmax <= 8");
  if (cfg.samples < 1) throw std::invalid_argument("validate-ldec: samples must be positive");
  const int goe_per_l = 10;                 // observables per system size
  const int product_samples = cfg.samples;  // product states tested per observable

  CsvBuilder csv({"L", "convention", "max_ratio", "sound", "ground_flag_rate"});
  json manifest;
  json per_l = json::object();
  bool paper_sound_all = true, rescaled_sound_all = true;

  for (int l = cfg.l; l <= cfg.lmax; ++l) {
    const Eigen::Index n = Eigen::Index{1} << l;
    const double j = l / 2.0;  // fixed M = 4 partition
    double max_ratio_paper = 0, max_ratio_rescaled = 0;
    int ground_flagged_paper = 0, ground_flagged_rescaled = 0;

    std::vector<double> ratios_paper(goe_per_l), ratios_rescaled(goe_per_l);
    std::vector<int> flags_paper(goe_per_l), flags_rescaled(goe_per_l);
    parallel_for(goe_per_l, cfg.threads, [&](int g) {
      const std::uint64_t tag = (static_cast<std::uint64_t>(l) << 32) | static_cast<std::uint64_t>(g);
      const Operator a = goe_sample({n, derive_seed(cfg.seed, tag)});
      const double thr_paper = ldec_threshold(a, j, LdecConvention::paper);
      const double thr_rescaled = ldec_threshold(a, j, LdecConvention::rescaled);
      const double mean = std::real(a.trace()) / static_cast<double>(n);
      double max_dev = 0;
      for (int s = 0; s < product_samples; ++s) {
        const PureState psi =
            materialize(random_product_state(l, derive_seed(cfg.seed ^ 0xABCDEF, tag * 100003 + s)));
        max_dev = std::max(max_dev, std::abs(std::real(psi.dot(a * psi)) - mean));
      }
      ratios_paper[g] = max_dev / thr_paper;
      ratios_rescaled[g] = max_dev / thr_rescaled;
      const PureState ground = eigen_sym(a).vectors.col(0);
      flags_paper[g] = ldec_check(ground, a, j, LdecConvention::paper).entangled_flag ? 1 : 0;
      flags_rescaled[g] = ldec_check(ground, a, j, LdecConvention::rescaled).entangled_flag ? 1 : 0;
    });
    for (int g = 0; g < goe_per_l; ++g) {
      max_ratio_paper = std::max(max_ratio_paper, ratios_paper[g]);
      max_ratio_rescaled = std::max(max_ratio_rescaled, ratios_rescaled[g]);
      ground_flagged_paper += flags_paper[g];
      ground_flagged_rescaled += flags_rescaled[g];
    }

    const bool paper_sound = max_ratio_paper <= 1.0;
    const bool rescaled_sound = max_ratio_rescaled <= 1.0;
    paper_sound_all = paper_sound_all && paper_sound;
    rescaled_sound_all = rescaled_sound_all && rescaled_sound;
    csv.add_row({std::to_string(l), "paper", fmt_g17(max_ratio_paper),
                 paper_sound ? "1" : "0",
                 fmt_g17(double(ground_flagged_paper) / goe_per_l)});
    csv.add_row({std::to_string(l), "rescaled", fmt_g17(max_ratio_rescaled),
                 rescaled_sound ? "1" : "0",
                 fmt_g17(double(ground_flagged_rescaled) / goe_per_l)});
    per_l["L=" + std::to_string(l)] = {
        {"max_ratio_paper", max_ratio_paper},
        {"max_ratio_rescaled", max_ratio_rescaled},
        {"ground_flag_rate_paper", double(ground_flagged_paper) / goe_per_l},
        {"ground_flag_rate_rescaled", double(ground_flagged_rescaled) / goe_per_l}};
  }

  // tightest (smallest-threshold) convention with zero violations
  std::string selected = "none";
  if (paper_sound_all)
    selected = "paper";
  else if (rescaled_sound_all)
    selected = "rescaled";
  manifest["per_l"] = per_l;
  manifest["paper_sound"] = paper_sound_all;
  manifest["rescaled_sound"] = rescaled_sound_all;
  manifest["selected_convention"] = selected;
  manifest["goe_samples_per_l"] = goe_per_l;
  manifest["product_samples_per_goe"] = product_samples;

  if (selected != "none") {
    json store;
    store["convention"] = selected;
    store["validated_by"] = {{"seed", cfg.seed},
                             {"l", cfg.l},
                             {"lmax", cfg.lmax},
                             {"product_samples", product_samples}};
    write_text_file(convention_store_path(cfg.out), store.dump(2) + "\n");
    manifest["persisted_to"] = convention_store_path(cfg.out);
  }
  return detail::finalize(cfg, csv, std::move(manifest), watch);
}

// ---------------------------------------------------------------------------

inline CommandOutputs run_command(const RunConfig& cfg) {
  if (cfg.command == "fig1a") return cmd_fig1a(cfg);
  if (cfg.command == "fig1b") return cmd_fig1b(cfg);
  if (cfg.command == "fig2") return cmd_fig2(cfg);
  if (cfg.command == "fig3") return cmd_fig3(cfg);
  if (cfg.command == "gap") return cmd_gap(cfg);
  if (cfg.command == "validate-ldec") return cmd_validate_ldec(cfg);
  throw std::invalid_argument("unknown command: " + cfg.command);
}

}  // namespace sepgap
