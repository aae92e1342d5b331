// Runs every acceptance criterion at desk scale and prints one PASS/FAIL
// line each. Outputs (reports, verdict JSONL, CSVs) go to the directory
// given as the first argument, default "acceptance_out".

#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "decay2d/experiments.hpp"

using namespace decay2d;

namespace {

std::string summary(const Report& r) {
  std::ostringstream s;
  s.precision(4);
  for (std::size_t k = 0; k < r.verdicts.size(); ++k) {
    const auto& v = r.verdicts[k];
    s << (k ? "; " : "") << v.name << " = " << v.measured << ' ' << v.relation << ' ' << v.threshold
      << (v.pass ? "" : " [fail]");
  }
  return s.str();
}

} // namespace

int main(int argc, char** argv) {
  ExperimentOptions o;
  o.out_dir = argc > 1 ? argv[1] : "acceptance_out";

  const RunResult p3 = p3_decay_run(o, o.n);
  const RunResult p4 = p4_decay_run(o);

  const std::vector<std::pair<std::string, std::function<Report()>>> criteria = {
      {"solver vs propagator", [&] { return solver_vs_oracle(o); }},
      {"energy conservation", [&] { return conservation(o); }},
      {"conformal energy identity", [&] { return conformal_identity(o); }},
      {"potential energy decay", [&] { return potential_decay(o, &p3); }},
      {"pointwise decay", [&] { return pointwise_decay(o, &p4); }},
      {"null-flux inequality", [&] { return null_flux(o, &p3); }},
      {"radial maximal function", [&] { return phi_star_bounds(o, &p4); }},
      {"F(A) bound", [&] { return F_lemma(o); }},
      {"logarithmic integral bound", [&] { return log_integral_lemma(o); }},
      {"log-Sobolev suite", [&] { return bgw_lab(o); }},
      {"scattering trend", [&] { return scattering_trend(o, &p4); }},
      {"propagator trivial cases", [] { return kernel_trivial_cases(); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    std::string line;
    bool pass = false;
    try {
      const Report r = criteria[k].second();
      write_report(r, o);
      pass = r.pass();
      line = summary(r);
    } catch (const std::exception& e) {
      line = std::string("error: ") + e.what();
    }
    failed += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << k + 1 << " (" << criteria[k].first << "): " << line
              << std::endl;
  }
  std::cout << criteria.size() - failed << '/' << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
