#include <doctest.h>

#include "taylorlp/localproj.hpp"
#include "taylorlp/shocks.hpp"
#include "taylorlp/synthetic.hpp"

using namespace tlp;

// The parallel kernels must be bit-identical to the serial reference: work is
// split by index and merged in index order, so scheduling cannot reorder any
// floating-point reduction.
TEST_SUITE("parity") {

TEST_CASE("serial and parallel paths agree bit for bit") {
  synth::DgpConfig cfg;
  cfg.n_countries = 10;
  cfg.n_years = 40;
  cfg.missing_rate = 0.05;
  cfg.seed = 123;
  auto [p, truth] = synth::generate_panel(cfg);
  auto spec = synth::default_taylor_spec();

  auto fs = shocks::estimate_taylor(p, spec, shocks::ShockKind::baseline, shocks::Exec::Serial);
  auto fp = shocks::estimate_taylor(p, spec, shocks::ShockKind::baseline, shocks::Exec::Parallel);
  REQUIRE(fs.fits.size() == fp.fits.size());
  for (std::size_t i = 0; i < fs.fits.size(); ++i) {
    CHECK(fs.fits[i].country == fp.fits[i].country);
    CHECK((fs.fits[i].fit.coefficients - fp.fits[i].fit.coefficients).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((fs.fits[i].fit.residuals - fp.fits[i].fit.residuals).cwiseAbs().maxCoeff() == 0.0);
  }
  REQUIRE(fs.skipped.size() == fp.skipped.size());
  for (std::size_t i = 0; i < fs.skipped.size(); ++i) {
    CHECK(fs.skipped[i].country == fp.skipped[i].country);
    CHECK(fs.skipped[i].reason == fp.skipped[i].reason);
  }

  auto shock = truth.shock_series();
  lp::LPSpec ls;
  ls.outcome = "y_women";
  ls.controls = {"g"};
  auto is = lp::estimate_lp(p, shock, ls, lp::Exec::Serial);
  auto ip = lp::estimate_lp(p, shock, ls, lp::Exec::Parallel);
  REQUIRE(is.points.size() == ip.points.size());
  for (std::size_t k = 0; k < is.points.size(); ++k) {
    CHECK(is.points[k].beta == ip.points[k].beta);
    CHECK(is.points[k].se == ip.points[k].se);
    CHECK(is.points[k].ci_low == ip.points[k].ci_low);
    CHECK(is.points[k].ci_high == ip.points[k].ci_high);
    CHECK(is.points[k].n_obs == ip.points[k].n_obs);
  }

  lp::TransitionConfig tc;
  for (const auto& [c, g] : truth.country_effect) tc.state_values[c] = g;  // arbitrary spread
  auto rs = lp::estimate_lp_regimed(p, shock, ls, tc, lp::Exec::Serial);
  auto rp = lp::estimate_lp_regimed(p, shock, ls, tc, lp::Exec::Parallel);
  for (auto side : {&lp::RegimePair::first, &lp::RegimePair::second}) {
    const auto& a = rs.*side;
    const auto& b = rp.*side;
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
      CHECK(a.points[k].beta == b.points[k].beta);
      CHECK(a.points[k].se == b.points[k].se);
    }
  }
}

}  // TEST_SUITE
