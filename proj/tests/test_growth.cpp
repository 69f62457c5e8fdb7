// Closed-form mass / second-moment laws and the regime classifier.
//
// Reference values marked "frozen" were computed independently with
// high-precision arithmetic and pasted in as literals; the library has to
// reproduce them, not the other way around.
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlks/errors.hpp"
#include "nlks/growth.hpp"

using namespace nlks;

namespace {

constexpr double kPi = pi_v;

// centered finite difference of mass_at in t
double mass_fd_rate(const GrowthParams& p, double t, double dt = 1e-6) {
  return (mass_at(p, t + dt) - mass_at(p, t - dt)) / (2 * dt);
}

double ratio_fd_rate(const GrowthParams& p, double m2_0, double t, double dt = 1e-6) {
  return (second_moment_ratio_at(p, m2_0, t + dt) -
          second_moment_ratio_at(p, m2_0, t - dt)) /
         (2 * dt);
}

}  // namespace

TEST_CASE("growth parameters validate positivity and finiteness") {
  CHECK_THROWS_AS(GrowthParams(-1.0, 1.0), validation_error);
  CHECK_THROWS_AS(GrowthParams(1.0, -1.0), validation_error);
  CHECK_THROWS_AS(GrowthParams(0.0, 1.0), validation_error);
  CHECK_THROWS_AS(GrowthParams(1.0, 0.0), validation_error);
  CHECK_THROWS_AS(GrowthParams(std::nan(""), 1.0), validation_error);
  CHECK_THROWS_AS(GrowthParams(1.0, std::numeric_limits<double>::infinity()),
                  validation_error);
  const GrowthParams p(2.0, 0.5);
  CHECK(p.cbar() == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("mass law starts at m0 and saturates monotonically") {
  const GrowthParams rising(16 * kPi, 7.2);
  const GrowthParams falling(2.5, 9.1);
  const GrowthParams flat(3.0, 3.0);

  CHECK(mass_at(rising, 0.0) == doctest::Approx(7.2).epsilon(1e-14));
  CHECK(mass_at(falling, 0.0) == doctest::Approx(9.1).epsilon(1e-14));
  CHECK(mass_at(flat, 123.0) == doctest::Approx(3.0).epsilon(1e-14));

  // strictness is checked below t ~ 0.77, where C e^{-M0 t} still exceeds
  // machine epsilon for the rising pair; past that the double value equals M0
  double prev_up = mass_at(rising, 0.0);
  double prev_dn = mass_at(falling, 0.0);
  for (double t : {0.01, 0.05, 0.2, 0.5, 0.7}) {
    const double up = mass_at(rising, t);
    const double dn = mass_at(falling, t);
    CHECK(up > prev_up);
    CHECK(up < rising.M0);
    CHECK(dn < prev_dn);
    CHECK(dn > falling.M0);
    prev_up = up;
    prev_dn = dn;
  }
  // long-time saturation at the capacity
  CHECK(mass_at(rising, 100.0) == doctest::Approx(rising.M0).epsilon(1e-12));
  CHECK_THROWS_AS(mass_at(rising, -0.5), validation_error);
}

TEST_CASE("mass law satisfies its own logistic rate equation") {
  // |d/dt m - m (M0 - m)| < 1e-9 M0^2 with a centered difference
  for (const GrowthParams& p :
       {GrowthParams(16 * kPi, 7.2), GrowthParams(4 * kPi, 16 * kPi),
        GrowthParams(8 * kPi, 2 * kPi), GrowthParams(1.0, 3.0)}) {
    for (double t : {0.1, 0.5, 1.0}) {
      const double fd = mass_fd_rate(p, t);
      const double exact = mass_rate(p, mass_at(p, t));
      CHECK(std::abs(fd - exact) < 1e-9 * p.M0 * p.M0);
    }
  }
}

TEST_CASE("second moment matches its initial value and frozen sample") {
  const GrowthParams p(16 * kPi, 16 * kPi);
  for (double m2_0 : {0.3, 1.0, 7.5}) {
    CHECK(second_moment_at(p, m2_0, 0.0) == doctest::Approx(m2_0).epsilon(1e-13));
  }
  const GrowthParams q(4 * kPi, 9.0);
  CHECK(second_moment_at(q, 2.5, 0.0) == doctest::Approx(2.5).epsilon(1e-13));

  // frozen: m2(t=0.001) for M0 = m0 = 16 pi, m2_0 = 1
  CHECK(second_moment_at(p, 1.0, 0.001) ==
        doctest::Approx(0.7989380701702532).epsilon(1e-13));
}

TEST_CASE("constant-mass case collapses the moment law to a line") {
  // M0 = m0 = 16 pi gives m2(t) = m2_0 - 64 pi t exactly
  const GrowthParams p(16 * kPi, 16 * kPi);
  for (double t : {0.0, 0.001, 0.002, 0.004}) {
    CHECK(second_moment_at(p, 1.0, t) ==
          doctest::Approx(1.0 - 64 * kPi * t).epsilon(1e-12));
  }
}

TEST_CASE("ratio h = m2/m obeys h' = 4 - m/(2 pi)") {
  for (const GrowthParams& p :
       {GrowthParams(16 * kPi, 4 * kPi), GrowthParams(4 * kPi, 16 * kPi),
        GrowthParams(6 * kPi, 6 * kPi)}) {
    for (double t : {0.05, 0.2, 0.8}) {
      const double fd = ratio_fd_rate(p, 2.0, t);
      const double exact = 4.0 - mass_at(p, t) / (2 * kPi);
      CHECK(fd == doctest::Approx(exact).epsilon(1e-6));
    }
  }
}

TEST_CASE("blow-up time: frozen values") {
  // frozen: m2_0/(64 pi) for the constant-mass 16 pi case
  const auto t1 = blowup_time(GrowthParams(16 * kPi, 16 * kPi), 1.0);
  REQUIRE(t1.has_value());
  CHECK(std::abs(*t1 - 0.004973591971621729) < 2e-12);

  // frozen: capacity 4 pi, initial mass 16 pi, m2_0 = 2 (below critical)
  const auto t2 = blowup_time(GrowthParams(4 * kPi, 16 * kPi), 2.0);
  REQUIRE(t2.has_value());
  CHECK(std::abs(*t2 - 0.018269181104449496) < 2e-12);

  // the moment actually vanishes at the reported time
  CHECK(std::abs(second_moment_at(GrowthParams(4 * kPi, 16 * kPi), 2.0, *t2)) < 1e-8);
}

TEST_CASE("blow-up time exists for every supercritical capacity") {
  std::mt19937_64 rng(20240817u);
  std::uniform_real_distribution<double> cap(8 * kPi * 1.01, 40 * kPi);
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  std::uniform_real_distribution<double> mom(0.01, 50.0);
  for (int k = 0; k < 40; ++k) {
    const double M0 = cap(rng);
    const double m0 = frac(rng) * M0;  // m0 <= M0
    const double m2_0 = mom(rng);
    const GrowthParams p(M0, m0);
    const auto ts = blowup_time(p, m2_0);
    REQUIRE(ts.has_value());
    CHECK(*ts > 0.0);
    CHECK(std::abs(second_moment_at(p, m2_0, *ts)) < 1e-7 * std::max(1.0, m2_0 * M0));
    // linear envelope bound: h(t) <= m2_0/m0 - ln(m0/M0)/(2 pi) + t (4 - M0/(2 pi))
    const double bound =
        (m2_0 / m0 - std::log(m0 / M0) / (2 * kPi)) / (M0 / (2 * kPi) - 4.0);
    CHECK(*ts <= bound + 1e-10);
  }
}

TEST_CASE("blow-up time is absent in the subcritical quadrant") {
  CHECK_FALSE(blowup_time(GrowthParams(4 * kPi, 2 * kPi), 1.0).has_value());
  CHECK_FALSE(blowup_time(GrowthParams(2 * kPi, 4 * kPi), 0.1).has_value());
  CHECK_FALSE(blowup_time(GrowthParams(8 * kPi, 4 * kPi), 5.0).has_value());
  CHECK_THROWS_AS(blowup_time(GrowthParams(16 * kPi, 1.0), -1.0), validation_error);
}

TEST_CASE("critical second moment separates collapse from survival") {
  const GrowthParams p(4 * kPi, 16 * kPi);
  const double crit = critical_second_moment(p);
  // frozen
  CHECK(crit == doctest::Approx(2.3014565796142474).epsilon(1e-12));
  CHECK(blowup_time(p, 0.99 * crit).has_value());
  CHECK_FALSE(blowup_time(p, 1.01 * crit).has_value());

  // defined only for M0 < 8 pi < m0, strictly outside the threshold band
  CHECK_THROWS_AS(critical_second_moment(GrowthParams(4 * kPi, 8 * kPi)),
                  validation_error);
  CHECK_THROWS_AS(critical_second_moment(GrowthParams(8 * kPi, 16 * kPi)),
                  validation_error);
  CHECK_THROWS_AS(critical_second_moment(GrowthParams(16 * kPi, 32 * kPi)),
                  validation_error);
  CHECK(std::isfinite(critical_second_moment(GrowthParams(4 * kPi, 8 * kPi * 1.001))));
}

TEST_CASE("threshold crossing time of the mass") {
  const GrowthParams p(4 * kPi, 16 * kPi);
  const auto tc = h_min_time(p);
  REQUIRE(tc.has_value());
  // frozen
  CHECK(*tc == doctest::Approx(0.032265888103352046).epsilon(1e-12));
  CHECK(mass_at(p, *tc) == doctest::Approx(8 * kPi).epsilon(1e-12));

  // starting exactly on the threshold: crossing happens at once
  const auto t0 = h_min_time(GrowthParams(4 * kPi, 8 * kPi));
  REQUIRE(t0.has_value());
  CHECK(*t0 == 0.0);

  // both endpoints on one side, or capacity pinned at 8 pi: no crossing
  CHECK_FALSE(h_min_time(GrowthParams(4 * kPi, 2 * kPi)).has_value());
  CHECK_FALSE(h_min_time(GrowthParams(16 * kPi, 9 * kPi)).has_value());
  CHECK_FALSE(h_min_time(GrowthParams(8 * kPi, 4 * kPi)).has_value());
}

TEST_CASE("threshold band is relative and tight") {
  CHECK(near_eight_pi(8 * kPi));
  CHECK(near_eight_pi(8 * kPi * (1 + 1e-13)));
  CHECK(near_eight_pi(8 * kPi * (1 - 1e-13)));
  CHECK_FALSE(near_eight_pi(8 * kPi * (1 + 2e-12)));
  CHECK_FALSE(near_eight_pi(8 * kPi * (1 - 2e-12)));
}

TEST_CASE("regime classification covers the parameter plane") {
  using R = Regime;
  auto regime = [](double M0, double m0,
                   std::optional<double> m2 = std::nullopt) {
    return classify(GrowthParams(M0, m0), m2).regime;
  };

  CHECK(regime(4 * kPi, 2 * kPi) == R::GlobalExistence);
  CHECK(regime(2 * kPi, 4 * kPi) == R::GlobalByComparison);
  CHECK(regime(4 * kPi, 4 * kPi) == R::GlobalByComparison);
  CHECK(regime(8 * kPi, 4 * kPi) == R::InfiniteTimeBlowup);
  CHECK(regime(16 * kPi, 2 * kPi) == R::FiniteTimeBlowup);
  CHECK(regime(16 * kPi, 16 * kPi) == R::FiniteTimeBlowup);
  CHECK(regime(16 * kPi, 32 * kPi) == R::FiniteTimeBlowup);

  // conditional region: decided by the initial second moment
  CHECK(regime(4 * kPi, 16 * kPi, 2.0) == R::ConditionalFiniteBlowup);
  CHECK(regime(4 * kPi, 16 * kPi, 10.0) == R::OpenCritical);
  CHECK(regime(4 * kPi, 16 * kPi) == R::OpenCritical);

  // threshold cases stay open
  CHECK(regime(8 * kPi, 8 * kPi) == R::OpenCritical);
  CHECK(regime(8 * kPi, 16 * kPi) == R::OpenCritical);
  CHECK(regime(4 * kPi, 8 * kPi) == R::OpenCritical);

  // the band decides which side a near-threshold capacity lands on
  CHECK(regime(8 * kPi * (1 + 1e-13), 4 * kPi) == R::InfiniteTimeBlowup);
  CHECK(regime(8 * kPi * (1 + 1e-11), 4 * kPi) == R::FiniteTimeBlowup);

  // every classification carries a mechanism note
  for (auto [M0, m0] : {std::pair{4 * kPi, 2 * kPi}, {16 * kPi, 2 * kPi},
                        {8 * kPi, 2 * kPi}, {2 * kPi, 8 * kPi}}) {
    CHECK_FALSE(classify(GrowthParams(M0, m0)).note.empty());
  }
  CHECK(std::string(regime_name(R::FiniteTimeBlowup)) == "FiniteTimeBlowup");
  CHECK(std::string(regime_name(R::GlobalExistence)) == "GlobalExistence");
}
