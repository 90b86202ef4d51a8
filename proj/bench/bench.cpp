// Wall-time comparison of the serial reference kernels against the
// OpenMP-parallel ones, on a synthetic panel large enough to matter. The
// parallel path must return bit-identical results, so each timing block also
// checksums its output against the serial run.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "taylorlp/localproj.hpp"
#include "taylorlp/shocks.hpp"
#include "taylorlp/synthetic.hpp"

using namespace tlp;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = Clock::now();
    f();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

double checksum_fits(const shocks::TaylorFits& f) {
  double s = 0.0;
  for (const auto& cf : f.fits) s += cf.fit.coefficients.sum() + cf.fit.residuals.sum();
  return s;
}

double checksum_irf(const lp::ImpulseResponse& r) {
  double s = 0.0;
  for (const auto& e : r.points) s += e.beta + e.se + e.n_obs;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  int n_countries = 80;
  int n_years = 60;
  int reps = 3;
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string k = argv[i];
    int v = std::atoi(argv[i + 1]);
    if (k == "--countries") n_countries = v;
    else if (k == "--years") n_years = v;
    else if (k == "--reps") reps = v;
    else {
      std::fprintf(stderr, "usage: %s [--countries N] [--years T] [--reps R]\n", argv[0]);
      return 2;
    }
  }

  synth::DgpConfig cfg;
  cfg.n_countries = n_countries;
  cfg.n_years = n_years;
  cfg.missing_rate = 0.05;
  cfg.seed = 42;
  auto [panel, truth] = synth::generate_panel(cfg);
  shocks::TaylorSpec spec = synth::default_taylor_spec();

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("panel: %d countries x %d years (%d rows), threads: %d, best of %d\n",
              panel.n_countries(), n_years, panel.n_rows(), threads, reps);

  shocks::TaylorFits fits_serial, fits_parallel;
  double t_rule_s = best_of(reps, [&] {
    fits_serial = shocks::estimate_taylor(panel, spec, shocks::ShockKind::baseline,
                                          shocks::Exec::Serial);
  });
  double t_rule_p = best_of(reps, [&] {
    fits_parallel = shocks::estimate_taylor(panel, spec, shocks::ShockKind::baseline,
                                            shocks::Exec::Parallel);
  });
  bool rule_same = checksum_fits(fits_serial) == checksum_fits(fits_parallel);

  auto shock_result = shocks::identify_shocks(panel, spec);
  lp::LPSpec lspec;
  lspec.outcome = "y_women";
  lspec.controls = {"g"};

  lp::ImpulseResponse irf_serial, irf_parallel;
  double t_lp_s = best_of(reps, [&] {
    irf_serial = lp::estimate_lp(panel, shock_result.series, lspec, lp::Exec::Serial);
  });
  double t_lp_p = best_of(reps, [&] {
    irf_parallel = lp::estimate_lp(panel, shock_result.series, lspec, lp::Exec::Parallel);
  });
  bool lp_same = checksum_irf(irf_serial) == checksum_irf(irf_parallel);

  std::printf("%-28s %10s %10s %9s %s\n", "kernel", "serial ms", "parallel", "speedup",
              "identical");
  std::printf("%-28s %10.2f %10.2f %8.2fx %s\n", "taylor rule (per country)", t_rule_s,
              t_rule_p, t_rule_s / t_rule_p, rule_same ? "yes" : "NO");
  std::printf("%-28s %10.2f %10.2f %8.2fx %s\n", "local projection (horizons)", t_lp_s,
              t_lp_p, t_lp_s / t_lp_p, lp_same ? "yes" : "NO");
  return rule_same && lp_same ? 0 : 1;
}
