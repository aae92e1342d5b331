#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "decay2d/decay2d.hpp"

namespace {

std::string preset_list() {
  std::string s;
  for (auto n : decay2d::kPresetNames) s += (s.empty() ? "" : ", ") + std::string(n);
  return s;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"decay2d: semilinear wave decay lab"};
  std::string command, config, out;
  std::uint64_t seed = 0;
  app.add_option("command", command, "simulate or one of: " + preset_list())->required();
  app.add_option("--config", config, "INI run configuration")->required()->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out, "output directory (overrides output.dir)");
  auto* seed_opt = app.add_option("--seed", seed, "global seed for randomized sweeps");
  CLI11_PARSE(app, argc, argv);

  if (command != "simulate" && !decay2d::is_preset(command)) {
    std::cerr << "decay2d: unknown command '" << command << "'; expected simulate or one of: " << preset_list()
              << '\n';
    return 2;
  }
  try {
    auto cfg = decay2d::parse_config(config);
    if (*out_opt) cfg.run.out_dir = out;
    if (*seed_opt) cfg.run.seed = seed;

    if (command == "simulate") {
      const auto res = decay2d::simulate(cfg);
      std::cout << "simulate: " << res.steps << " steps, dt = " << res.dt << ", " << res.series.records.size()
                << " samples -> " << cfg.run.out_dir << '\n';
      return 0;
    }
    bool ok = true;
    for (const auto& r : decay2d::run_preset(command, cfg)) {
      std::cout << r.name << " (" << r.seconds << " s)\n";
      for (const auto& h : r.header) std::cout << "  # " << h << '\n';
      for (const auto& v : r.verdicts)
        std::cout << "  " << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.measured << ' ' << v.relation << ' '
                  << v.threshold << '\n';
      ok = ok && r.pass();
    }
    std::cout << (ok ? "all checks passed" : "some checks FAILED") << '\n';
    return ok ? 0 : 1;
  } catch (const decay2d::ConfigError& e) {
    std::cerr << "decay2d: " << e.what() << '\n';
    return 2;
  } catch (const decay2d::ConeViolation& e) {
    std::cerr << "decay2d: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "decay2d: " << e.what() << '\n';
    return 3;
  }
}
