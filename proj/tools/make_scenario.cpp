#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "support/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the 36-month drought scenario and its manifest"};
  std::string out = "scenario";
  std::uint64_t seed = 2023;
  bool no_ik = false;
  app.add_option("--out", out, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_flag("--no-ik", no_ik, "Leave out the IK reports");
  CLI11_PARSE(app, argc, argv);

  semdrought::testing::ScenarioOptions opt;
  opt.seed = seed;
  opt.ik = !no_ik;
  const auto sc = semdrought::testing::make_drought_scenario(opt);
  std::filesystem::create_directories(out);
  std::ofstream(std::filesystem::path(out) / "dataset.txt") << sc.dataset;
  std::ofstream(std::filesystem::path(out) / "manifest.json") << sc.manifest.to_json().dump(2) << '\n';
  std::cout << sc.manifest.to_json().dump() << '\n';
  return 0;
}
