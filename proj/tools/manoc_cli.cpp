// Command-line front end: run experiment suites from a spec file, list the
// built-in catalogs, or run the full certification suite with the numbered
// acceptance verdicts. Exit code 0 only when everything passes.
#include "CLI11.hpp"

#include "manoc/bench.hpp"
#include "manoc/problems.hpp"

#include <cstdio>
#include <string>
#include <vector>

using namespace manoc;

namespace {

void print_report(const RunReport& rep) {
  std::printf("[%s]%s%s  (seed %llu, %.2f s)\n", rep.spec.name.c_str(),
              rep.spec.problem.empty() ? "" : " problem=",
              rep.spec.problem.c_str(),
              static_cast<unsigned long long>(rep.seed), rep.wall_seconds);
  for (const auto& row : rep.criteria)
    std::printf("  %-34s %s  %s\n", row.id.c_str(),
                row.pass ? "PASS" : "FAIL", row.detail.c_str());
}

int run_reports(std::vector<ExperimentSpec> specs, bool certify) {
  std::vector<RunReport> reports;
  reports.reserve(specs.size());
  for (const auto& spec : specs) {
    reports.push_back(run_experiment(spec));
    print_report(reports.back());
  }
  bool ok = true;
  if (certify) {
    const auto lines = acceptance_summary(reports);
    std::printf("\n==== certification summary ====\n");
    for (const auto& line : lines) {
      std::printf("criterion %2d  %-46s %s\n", line.number,
                  line.label.c_str(), line.pass ? "PASS" : "FAIL");
      if (!line.pass) std::printf("              %s\n", line.detail.c_str());
      ok = ok && line.pass;
    }
  } else {
    for (const auto& rep : reports) ok = ok && rep.all_pass();
  }
  std::printf("\n%s\n", ok ? "ALL PASS" : "FAILURES PRESENT");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic optimal control on compact manifolds"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir;
  std::uint64_t seed = 2026;
  bool svg = false;

  CLI::App* run = app.add_subcommand("run", "run experiments from a spec file");
  run->add_option("spec-file", spec_path, "experiment spec file")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* run_seed =
      run->add_option("--seed", seed, "override every experiment seed");
  run->add_option("--out", out_dir, "write artifacts under this directory");
  run->add_flag("--svg", svg, "also write SVG plots with the artifacts");

  CLI::App* list =
      app.add_subcommand("list", "list built-in problems and experiments");

  CLI::App* cert = app.add_subcommand(
      "certify-all", "run the full suite and print the acceptance verdicts");
  cert->add_option("--seed", seed, "suite base seed (default 2026)");
  cert->add_option("--out", out_dir, "write artifacts under this directory");
  cert->add_flag("--svg", svg, "also write SVG plots with the artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      std::printf("problems:\n");
      for (const auto& p : list_problems())
        std::printf("  %-20s %s\n", p.name.c_str(), p.description.c_str());
      std::printf("experiments:\n");
      for (const auto& name : experiment_names())
        std::printf("  %s\n", name.c_str());
      return 0;
    }

    std::vector<ExperimentSpec> specs;
    if (run->parsed()) {
      specs = parse_spec_file(spec_path);
      if (run_seed->count() > 0)
        for (auto& s : specs) s.seed = seed;
    } else {
      specs = certification_suite(seed);
    }
    for (auto& s : specs) {
      if (!out_dir.empty()) s.out_dir = out_dir;
      if (svg) s.svg = true;
    }
    return run_reports(std::move(specs), cert->parsed());
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
