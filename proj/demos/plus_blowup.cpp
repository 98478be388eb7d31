// Plus-sign blow-up from the odd polynomial data: prints the probe gradient at x = 0
// next to the closed-form gradient pair, then the detector's verdict.
#include <cstdio>

#include "nlb/nlb.hpp"

int main() {
  using namespace nlb;
  const Grid grid(512, 2.0);
  const NonlocalCoupling coupling(Sign::Plus, 1.0, grid);
  const auto u0 = InitialCondition::plus_blowup_poly(1.0);

  SolverConfig cfg;
  cfg.probes = {0.0};
  cfg.record_every = 500;
  const auto res = simulate(u0, coupling, grid, cfg);

  const GradientPair pair{u0.slope(0.0), u0.slope(1.0), Sign::Plus};
  std::printf("%8s %14s %14s\n", "t", "u_x(0,t)", "closed form");
  const auto& rec = res.record;
  for (std::size_t i = 0; i < rec.rows(); ++i) {
    const double t = rec.times[i];
    if (t >= *blowup_time(pair)) break;
    std::printf("%8.4f %14.6f %14.6f\n", t, rec.probe_ux[0][i], closed_form(pair, t));
  }
  const auto& v = res.verdict;
  if (v.blew_up)
    std::printf("blow-up (%s) detected at t = %.4f, estimated t* = %.4f at x = %.4f; closed form t* = %.4f\n",
                to_string(v.reason), *v.t_detect, v.t_estimate.value_or(-1.0), *v.location, *blowup_time(pair));
}
