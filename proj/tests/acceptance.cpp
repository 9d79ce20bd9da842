#include <chrono>
#include <iostream>
#include <string>

#include "property_checks.hpp"
#include "singlab/experiments.hpp"

using namespace singlab;

namespace {

struct Criterion {
  int id;
  std::string experiment;
  double time_limit;  // seconds, 0 for none
};

bool report(int id, const std::string& title, bool passed, const std::vector<std::string>& lines) {
  std::cout << "C" << id << " " << title << ": " << (passed ? "PASS" : "FAIL") << '\n';
  for (const auto& l : lines) std::cout << "    " << l << '\n';
  std::cout.flush();
  return passed;
}

bool run_one(const Criterion& c) {
  const auto dir = output_root() / "acceptance" / c.experiment;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto res = run_experiment(c.experiment, find_experiment(c.experiment).defaults(), dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto lines = res.judgement.lines;
    bool ok = res.judgement.passed;
    if (c.time_limit > 0.0) {
      const bool fast = secs <= c.time_limit;
      lines.push_back("runtime " + std::to_string(secs) + " s (limit " + std::to_string(c.time_limit) + " s)");
      ok = ok && fast;
    }
    return report(c.id, c.experiment, ok, lines);
  } catch (const std::exception& e) {
    return report(c.id, c.experiment, false, {std::string("error: ") + e.what()});
  }
}

bool run_properties() {
  struct Named {
    const char* name;
    props::Outcome outcome;
  };
  const Named checks[] = {{"maximum principle", props::maximum_principle()},
                          {"T_k + G_k identity", props::truncation_identity()},
                          {"envelope sandwich", props::envelope_sandwich()},
                          {"monotone in n", props::monotone_in_n()},
                          {"eigenpair residual", props::eigen_residual()},
                          {"Hopf constants", props::hopf_stability()}};
  bool ok = true;
  std::vector<std::string> lines;
  for (const auto& c : checks) {
    lines.push_back(std::string(c.name) + ": " + std::to_string(c.outcome.cases) + " cases, " +
                    (c.outcome.ok ? "ok" : "violated: " + c.outcome.detail));
    ok = ok && c.outcome.ok;
  }
  return report(10, "property suites", ok, lines);
}

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "manufactured_solution", 10.0},
      {2, "threshold_scan_sharp", 60.0},
      {3, "energy_always_L1", 0.0},
      {4, "strong_singularity_counterexample", 0.0},
      {5, "L1_lower_order", 0.0},
      {6, "weighted_bound", 0.0},
      {7, "boundary_bd", 0.0},
      {8, "uniqueness_suite", 0.0},
      {9, "concentration", 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria)
    if (!run_one(c)) ++failed;
  if (!run_properties()) ++failed;
  std::cout << (10 - failed) << " of 10 criteria pass\n";
  return failed == 0 ? 0 : 1;
}
