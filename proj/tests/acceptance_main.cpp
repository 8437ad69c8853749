// Acceptance gate: one criterion per invocation (argv[1] in 1..10), one
// summary line per criterion. Criteria 1-9 run the library checks at full
// scale; criterion 10 exercises the installed CLI end to end.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fpaudit/calibration.hpp"
#include "fpaudit/checks.hpp"
#include "fpaudit/parallel.hpp"
#include "fpaudit/report.hpp"
#include "fpaudit/rng.hpp"

using namespace fpaudit;

namespace {

bool report(int criterion, const std::string& what,
            const std::vector<CheckResult>& results,
            const std::string& caveat = "") {
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    std::cout << "  " << (r.pass ? "[ok]   " : "[FAIL] ") << r.name
              << " estimate=" << format_double(r.estimate)
              << " target=" << format_double(r.target)
              << " se=" << format_double(r.se) << "\n";
    if (!r.pass && !r.note.empty()) std::cout << "         " << r.note << "\n";
  }
  std::cout << (all ? "[PASS] " : "[FAIL] ") << "criterion " << criterion
            << ": " << what;
  if (!all && !caveat.empty()) std::cout << " -- " << caveat;
  std::cout << "\n";
  return all;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool run_cli_determinism() {
  namespace fs = std::filesystem;
  const std::string base =
      (fs::temp_directory_path() / "fpaudit-acceptance").string();
  fs::remove_all(base);
  struct RunSpec {
    std::string dir;
    int workers;
  };
  const std::vector<RunSpec> runs = {
      {base + "/a", 4}, {base + "/b", 4}, {base + "/c", 1}};
  for (const auto& r : runs) {
    fs::create_directories(r.dir);
    std::string cmd = std::string(FP_AUDIT_BIN) + " --seed 42 --workers " +
                      std::to_string(r.workers) + " --out " + r.dir +
                      " validate > " + r.dir + "/stdout.txt 2>&1";
    int rc = std::system(cmd.c_str());  // exit status not asserted here; the
    (void)rc;                           // suite's verdict is covered elsewhere
  }
  bool repeat_stdout = slurp(runs[0].dir + "/stdout.txt") ==
                       slurp(runs[1].dir + "/stdout.txt");
  bool repeat_json = slurp(runs[0].dir + "/validate.json") ==
                     slurp(runs[1].dir + "/validate.json");
  bool workers_stdout = slurp(runs[0].dir + "/stdout.txt") ==
                        slurp(runs[2].dir + "/stdout.txt");
  bool workers_json = slurp(runs[0].dir + "/validate.json") ==
                      slurp(runs[2].dir + "/validate.json");
  bool nonempty = !slurp(runs[0].dir + "/validate.json").empty();
  auto line = [](const char* name, bool ok) {
    std::cout << "  " << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    return ok;
  };
  bool all = true;
  all &= line("validate-output-nonempty", nonempty);
  all &= line("same-seed-stdout-identical", repeat_stdout);
  all &= line("same-seed-json-identical", repeat_json);
  all &= line("worker-count-stdout-invariant", workers_stdout);
  all &= line("worker-count-json-invariant", workers_json);
  std::cout << (all ? "[PASS] " : "[FAIL] ")
            << "criterion 10: seed-42 reruns and 1-vs-4 workers produce "
               "byte-identical numeric output\n";
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <criterion 1..10>\n";
    return 2;
  }
  const int criterion = std::atoi(argv[1]);
  const int workers = default_workers();
  const std::uint64_t seed =
      Rng(42).child(static_cast<std::uint64_t>(criterion)).seed();
  Calibration cal = load_calibration(default_calibration_path());

  bool ok = false;
  switch (criterion) {
    case 1:
      ok = report(1, "per-trial decomposition identity, residual <= 1e-9",
                  check_decomposition(seed, 10000, workers));
      break;
    case 2:
      ok = report(2, "swapped statistic is mean zero for all three mechanisms",
                  check_zprime_unbiased(seed, 10000, workers));
      break;
    case 3:
      ok = report(3, "variance closed form and operator-norm bound",
                  check_variance_oracle(seed, 20, 1000000, workers));
      break;
    case 4:
      ok = report(4,
                  "posterior quadrature match, tower property, gap slope in n",
                  check_conjugacy(seed, 100000, 10000, workers));
      break;
    case 5:
      ok = report(
          5, "matrix-law means and prior operator-norm tail constants",
          check_matrix_distribution_facts(seed, 50000, workers),
          "the simplified tail constant is refuted by simulation; the "
          "unsimplified bound passes (see README, known discrepancies)");
      break;
    case 6:
      ok = report(6, "empirical covariance mse matches the exact formula",
                  check_empirical_mse(seed, 20000, workers));
      break;
    case 7:
      ok = report(7, "heavy-tailed mixture moments and padding reduction",
                  check_heavy_tailed(seed, workers));
      break;
    case 8:
      ok = report(8, "coupled sensitivity and the expectation-gap inequality",
                  check_privacy_structure(seed, 1000, 10000));
      break;
    case 9:
      ok = report(9,
                  "baseline at the mse floor; calibrated dp release below it "
                  "and monotone in epsilon",
                  check_tension(cal, seed, 30000, workers));
      break;
    case 10:
      ok = run_cli_determinism();
      break;
    default:
      std::cerr << "unknown criterion " << criterion << "\n";
      return 2;
  }
  return ok ? 0 : 1;
}
