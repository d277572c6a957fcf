#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sepgap/experiments.hpp"

using namespace sepgap;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path out_dir() {
  const fs::path dir = fs::temp_directory_path() / "sepgap_cmd_tests";
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("fit_linear basics") {
  const auto exact = fit_linear({1, 2, 3, 4}, {3, 5, 7, 9});  // y = 2x + 1
  REQUIRE_THAT(exact.slope, Catch::Matchers::WithinAbs(2.0, 1e-12));
  REQUIRE_THAT(exact.intercept, Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(exact.stderr_slope, Catch::Matchers::WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(exact.stderr_intercept, Catch::Matchers::WithinAbs(0.0, 1e-12));

  const auto flat = fit_linear({1, 2, 3}, {4, 4, 4});
  REQUIRE_THAT(flat.slope, Catch::Matchers::WithinAbs(0.0, 1e-12));

  REQUIRE_THROWS_AS(fit_linear({1, 1, 1}, {1, 2, 3}), std::invalid_argument);
  REQUIRE_THROWS_AS(fit_linear({1, 2}, {1, 2}), std::invalid_argument);
}

TEST_CASE("fig1a reproduces the analytic product minimum per site") {
  RunConfig cfg;
  cfg.l = 2;
  cfg.lmax = 6;
  cfg.restarts = 6;
  cfg.seed = 11;
  cfg.threads = 2;
  cfg.out = (out_dir() / "fig1a_small").string();
  const auto out = cmd_fig1a(cfg);

  const auto rows = parse_csv(slurp(out.csv_path));
  REQUIRE(rows.size() == 1 + 5);  // header + L = 2..6
  for (size_t i = 1; i < rows.size(); ++i) {
    const int l = std::stoi(rows[i][0]);
    const double lambda_per_site = std::stod(rows[i][2]);
    REQUIRE_THAT(lambda_per_site, Catch::Matchers::WithinAbs(1.0 / l - 1.0, 1e-6));
    const double gap = std::stod(rows[i][3]);
    REQUIRE(gap >= -1e-9);
  }
}

TEST_CASE("fig1a is byte-deterministic across thread counts") {
  RunConfig cfg;
  cfg.l = 2;
  cfg.lmax = 5;
  cfg.restarts = 4;
  cfg.seed = 21;
  cfg.out = (out_dir() / "fig1a_t1").string();
  cfg.threads = 1;
  cmd_fig1a(cfg);
  RunConfig cfg2 = cfg;
  cfg2.out = (out_dir() / "fig1a_t2").string();
  cfg2.threads = 2;
  cmd_fig1a(cfg2);
  REQUIRE(slurp(cfg.out + ".csv") == slurp(cfg2.out + ".csv"));
}

TEST_CASE("fig1b grid contains the analytic dip candidate") {
  RunConfig cfg;
  cfg.l = 4;
  cfg.h = 0.0;
  cfg.hmax = 4.0;
  cfg.hstep = 0.5;
  cfg.restarts = 6;
  cfg.threads = 2;
  cfg.out = (out_dir() / "fig1b_small").string();
  const auto out = cmd_fig1b(cfg);
  const auto rows = parse_csv(slurp(out.csv_path));
  bool has_neel = false;
  for (size_t i = 1; i < rows.size(); ++i)
    if (std::abs(std::stod(rows[i][0]) - analytic::neel_minimum_field()) < 1e-9) has_neel = true;
  REQUIRE(has_neel);
  REQUIRE(out.manifest.contains("interior_minimum"));
  for (size_t i = 1; i < rows.size(); ++i) REQUIRE(std::stod(rows[i][1]) >= -1e-9);
}

TEST_CASE("fig2 rows honor the certified chain and match the sample count") {
  RunConfig cfg;
  cfg.l = 3;
  cfg.lmax = 4;
  cfg.samples = 6;
  cfg.restarts = 6;
  cfg.dirs = 32;
  cfg.refine = 16;
  cfg.seed = 33;
  cfg.threads = 2;
  cfg.out = (out_dir() / "fig2_small").string();
  const auto out = cmd_fig2(cfg);
  const auto rows = parse_csv(slurp(out.csv_path));
  REQUIRE(rows.size() == 1 + 2 * 6);
  for (size_t i = 1; i < rows.size(); ++i) {
    const double upper = std::stod(rows[i][2]);
    const double lower = std::stod(rows[i][3]);
    const double e0 = std::stod(rows[i][4]);
    REQUIRE(lower <= upper + 1e-9);
    REQUIRE(e0 <= upper + 1e-9);
  }
  REQUIRE(out.manifest["histograms"].contains("L=3"));
  REQUIRE(out.manifest["histograms"].contains("L=4"));

  // determinism across thread counts
  RunConfig cfg2 = cfg;
  cfg2.out = (out_dir() / "fig2_small_t1").string();
  cfg2.threads = 1;
  cmd_fig2(cfg2);
  REQUIRE(slurp(cfg.out + ".csv") == slurp(cfg2.out + ".csv"));
}

TEST_CASE("fig3 emits all state kinds with sound product rows") {
  RunConfig cfg;
  cfg.l = 4;
  cfg.scatter = 40;
  cfg.seed = 44;
  cfg.threads = 2;
  cfg.convention = "rescaled";
  cfg.out = (out_dir() / "fig3_small").string();
  const auto out = cmd_fig3(cfg);
  const auto rows = parse_csv(slurp(out.csv_path));
  REQUIRE(rows.size() == 1 + 16 + 10 + 10 + 40);
  int eig = 0, pure = 0, prod = 0, scat = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& kind = rows[i][0];
    const double q2 = std::stod(rows[i][2]);
    REQUIRE(q2 >= -1e-12);
    REQUIRE(q2 <= 1.0 + 1e-12);
    if (kind == "eigenstate") ++eig;
    if (kind == "pure") ++pure;
    if (kind == "product") {
      ++prod;
      REQUIRE(q2 <= 1e-10);
    }
    if (kind == "scatter") ++scat;
  }
  REQUIRE(eig == 16);
  REQUIRE(pure == 10);
  REQUIRE(prod == 10);
  REQUIRE(scat == 40);
  REQUIRE(out.manifest["ldec_threshold"].get<double>() > 0.0);
}

TEST_CASE("validate-ldec selects the rescaled convention and persists it") {
  RunConfig cfg;
  cfg.l = 5;
  cfg.lmax = 5;
  cfg.samples = 400;
  cfg.seed = 55;
  cfg.threads = 2;
  const fs::path dir = out_dir() / "ldec";
  fs::create_directories(dir);
  cfg.out = (dir / "validate").string();
  const auto out = cmd_validate_ldec(cfg);
  REQUIRE(out.manifest["selected_convention"] == "rescaled");
  REQUIRE(out.manifest["paper_sound"] == false);
  REQUIRE(fs::exists(convention_store_path(cfg.out)));

  // a later command in the same directory picks the persisted convention
  RunConfig fig3cfg;
  fig3cfg.l = 4;
  fig3cfg.scatter = 5;
  fig3cfg.seed = 56;
  fig3cfg.threads = 1;
  fig3cfg.convention = "auto";
  fig3cfg.out = (dir / "fig3_auto").string();
  const auto fig3out = cmd_fig3(fig3cfg);
  REQUIRE(fig3out.manifest["ldec_convention"] == "rescaled");
  REQUIRE(fig3out.manifest["ldec_convention_source"].get<std::string>() !=
          "default (no validation record found)");
}

TEST_CASE("gap command on the toy models") {
  RunConfig cfg;
  cfg.model = "antidiag2";
  cfg.a = 0.0;
  cfg.dirs = 120;
  cfg.restarts = 8;
  cfg.seed = 66;
  cfg.threads = 2;
  cfg.out = (out_dir() / "gap_antidiag").string();
  const auto out = cmd_gap(cfg);
  const auto gap_lo = out.manifest["gap_interval"][0].get<double>();
  const auto gap_hi = out.manifest["gap_interval"][1].get<double>();
  REQUIRE(gap_lo <= 0.5 + 1e-9);
  REQUIRE(gap_hi >= 0.5 - 1e-9);
  REQUIRE(out.manifest["witness_angles"].size() == 2);

  RunConfig cfg2 = cfg;
  cfg2.model = "alltoall";
  cfg2.l = 4;
  cfg2.out = (out_dir() / "gap_alltoall").string();
  const auto out2 = cmd_gap(cfg2);
  REQUIRE(out2.manifest["gap_interval"][0].get<double>() <= 1.0 - 0.125 + 1e-9);
  REQUIRE(out2.manifest["gap_interval"][1].get<double>() >= 1.0 - 0.125 - 1e-9);

  RunConfig bad = cfg;
  bad.model = "nosuch";
  REQUIRE_THROWS_AS(cmd_gap(bad), std::invalid_argument);
}

TEST_CASE("gap command reads ising instance files") {
  const fs::path path = out_dir() / "toy_instance.txt";
  write_text_file(path.string(),
                  "# triangle with a field\n0 1 1.0\n1 2 1.0\n0 2 1.0\n0 0.5\n");
  RunConfig cfg;
  cfg.model = "ising";
  cfg.instance_path = path.string();
  cfg.restarts = 6;
  cfg.dirs = 32;
  cfg.seed = 77;
  cfg.threads = 2;
  cfg.out = (out_dir() / "gap_ising").string();
  const auto out = cmd_gap(cfg);
  REQUIRE(out.manifest["L"] == 3);
  // classical Hamiltonian: a basis product state reaches E0, gap contains 0
  REQUIRE(out.manifest["gap_interval"][0].get<double>() <= 1e-9);
  REQUIRE(out.manifest["gap_interval"][1].get<double>() >= -1e-9);
}

TEST_CASE("unknown command is rejected") {
  RunConfig cfg;
  cfg.command = "nope";
  cfg.out = (out_dir() / "nope").string();
  REQUIRE_THROWS_AS(run_command(cfg), std::invalid_argument);
}
