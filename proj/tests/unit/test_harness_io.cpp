#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "decay2d/config.hpp"
#include "decay2d/io.hpp"

using namespace decay2d;
using Catch::Approx;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("decay2d_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kMinimal = R"(
[grid]
L = 40
n = 129

[scheme]
p = 3
t_final = 10
)";

} // namespace

TEST_CASE("format_real: 17 significant digits, round trip") {
  CHECK(format_real(1.0) == "1.0000000000000000e+00");
  CHECK(format_real(-0.1) == "-1.0000000000000001e-01");
  CHECK(format_real(NAN) == "nan");
  CHECK(format_real(-INFINITY) == "-inf");
  for (double v : {M_PI, 1e-300, 6.02214076e23, -2.5e-7}) CHECK(std::stod(format_real(v)) == v);
}

TEST_CASE("config: minimal file takes defaults") {
  const auto c = parse_config_text(kMinimal).run;
  CHECK(c.cfl == 0.4);
  CHECK(c.scheme == SchemeKind::explicit_leapfrog);
  CHECK(c.nonlinear);
  CHECK(c.grid.n == 129);
  CHECK(c.grid.half_width == 40.0);
  CHECK(c.data.phi0.family == DataFamily::zero);
  CHECK(c.sample_times == std::vector<double>{0.0, 10.0});
  CHECK(c.out_dir == "out");
}

TEST_CASE("config: full file") {
  const auto c = parse_config_text(R"(
[grid]
L = 20
n = 257
boundary = dirichlet
[data]
phi0 = smooth_bump
phi0_amplitude = 0.5
phi0_radius = 2
phi0_center = 0.5, -1
phi1 = gaussian
phi1_radius = 0.7
[scheme]
p = 4.5
t_final = 6
kind = conservative
cfl = 0.3
nonlinear = no
[diagnostics]
sample_spacing = 1.5
profile = true
h2 = off
seed = 99
[output]
dir = results/a
snapshot_times = 3, 6
)").run;
  CHECK(c.data.phi0.family == DataFamily::smooth_bump);
  CHECK(c.data.phi0.amplitude == 0.5);
  CHECK(c.data.phi0.center[1] == -1.0);
  CHECK(c.data.phi1.family == DataFamily::gaussian);
  CHECK(c.data.phi1.amplitude == 1.0);
  CHECK(c.scheme == SchemeKind::conservative);
  CHECK_FALSE(c.nonlinear);
  CHECK(c.sample_times == std::vector<double>{0.0, 1.5, 3.0, 4.5, 6.0});
  CHECK(c.toggles.profile);
  CHECK_FALSE(c.toggles.h2);
  CHECK(c.seed == 99);
  CHECK(c.snapshot_times == std::vector<double>{3.0, 6.0});
  CHECK(c.out_dir == "results/a");
}

TEST_CASE("config: errors") {
  auto err = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK_THAT(err(std::string(kMinimal) + "[gird]\nL = 3\n"), Catch::Matchers::ContainsSubstring("gird.L"));
  CHECK_THAT(err(std::string(kMinimal) + "[output]\nfolder = x\n"), Catch::Matchers::ContainsSubstring("output.folder"));
  CHECK_THAT(err("[grid]\nL = 40\n[scheme]\np = 3\nt_final = 1\n"), Catch::Matchers::ContainsSubstring("grid.n"));
  CHECK_THAT(err("[grid]\nL = 40\nn = 12x\n[scheme]\np = 3\nt_final = 1\n"), Catch::Matchers::ContainsSubstring("grid.n"));
  CHECK_THAT(err("[grid]\nL = 40\nn = 129\n[scheme]\np = 0.5\nt_final = 1\n"), Catch::Matchers::ContainsSubstring("p > 1"));
  CHECK_THAT(err("[grid]\nL = 40\nn = 129\n[scheme]\np = 3\nt_final = 1\nnonlinear = maybe\n"),
             Catch::Matchers::ContainsSubstring("scheme.nonlinear"));
  CHECK_THAT(err(std::string(kMinimal) + "[diagnostics]\nsample_times = 0, 20\n"),
             Catch::Matchers::ContainsSubstring("sample_times"));
  CHECK_THAT(err(std::string(kMinimal) + "[data]\nphi0 = square\n"), Catch::Matchers::ContainsSubstring("square"));
  // Cone containment is decided at parse time.
  CHECK_THROWS_AS(parse_config_text("[grid]\nL = 10\nn = 129\n[data]\nphi0 = smooth_bump\nphi0_radius = 2\n"
                                    "[scheme]\np = 3\nt_final = 30\n"),
                  ConeViolation);
  CHECK_THROWS_AS(parse_config("/nonexistent/decay2d.ini"), ConfigError);
}

TEST_CASE("csv and verdict output") {
  const auto dir = scratch_dir("csv");
  write_csv(dir / "a.csv", {"x", "y"}, {{1.0, 2.0}, {0.5, NAN}}, {"seed = 3"});
  CHECK(slurp(dir / "a.csv") ==
        "# seed = 3\nx,y\n1.0000000000000000e+00,2.0000000000000000e+00\n5.0000000000000000e-01,nan\n");
  CHECK_THROWS_AS(write_csv(dir / "b.csv", {"x"}, {{1.0, 2.0}}), InvalidArgument);
  const std::vector<Verdict> v{check_le("drift", "energy is conserved", 1e-12, 1e-10),
                               check_ge("ratio", "second order", 2.0, 3.0)};
  CHECK_FALSE(all_pass(v));
  write_verdicts(dir / "v.jsonl", v);
  std::ifstream f(dir / "v.jsonl");
  std::string line;
  std::getline(f, line);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["name"] == "drift");
  CHECK(j["pass"] == true);
  CHECK(j["measured"].get<double>() == 1e-12);
  std::getline(f, line);
  CHECK(nlohmann::json::parse(line)["pass"] == false);
}

TEST_CASE("snapshot round trip") {
  const auto dir = scratch_dir("snap");
  const auto g = make_grid(3.0, 17);
  WaveState s = zero_state(g, 4.5, 1.25);
  for (std::size_t k = 0; k < g.size(); ++k) {
    s.phi.data()[k] = std::sin(0.37 * static_cast<double>(k));
    s.pi.data()[k] = -1e-300 * static_cast<double>(k);
  }
  write_snapshot(dir / "s.bin", s, g);
  CHECK(std::filesystem::file_size(dir / "s.bin") == 32 + 16 * g.size());
  const auto head = slurp(dir / "s.bin").substr(0, 8);
  CHECK(head.substr(0, 4) == "W2D1");
  CHECK(static_cast<unsigned char>(head[4]) == 17);
  const auto back = read_snapshot(dir / "s.bin");
  CHECK(back.n == 17);
  CHECK(back.half_width == 3.0);
  CHECK(back.state.t == 1.25);
  CHECK(back.state.p == 4.5);
  CHECK(back.state.phi == s.phi);
  CHECK(back.state.pi == s.pi);
  CHECK_THAT(slurp(manifest_path(dir / "s.bin")), Catch::Matchers::ContainsSubstring("format = W2D1"));
  std::ofstream(dir / "bad.bin") << "W2D0xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx";
  CHECK_THROWS_AS(read_snapshot(dir / "bad.bin"), IoError);
}
