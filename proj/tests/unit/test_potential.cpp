#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "approx.hpp"
#include "doctest.h"
#include "oracle_values.hpp"
#include "sheq/errors.hpp"
#include "sheq/potential.hpp"

using namespace sheq;
constexpr double pi = std::numbers::pi;

namespace {

ModelSpec stable_riesz(int d, double q, double b, double scale = 1.0) {
  return ModelSpec(CharExponent(IsotropicStable{q, scale}, d), CorrelationKernel(Riesz{b, 1.0}, d));
}

}  // namespace

TEST_SUITE("potential") {
  TEST_CASE("Upsilon against the reference radial integrals") {
    CHECK(upsilon(stable_riesz(2, 2.0, 1.5), 1.0).value == rel(oracle::ups_d2_q2_b15_beta1).epsilon(1e-8));
    CHECK(upsilon(stable_riesz(3, 2.0, 1.5), 2.0).value == rel(oracle::ups_d3_q2_b15_beta2).epsilon(1e-8));
    CHECK(upsilon(stable_riesz(1, 1.5, 0.5), 0.3).value ==
          rel(oracle::ups_d1_q15_b05_beta03).epsilon(1e-8));
    const ModelSpec sub(CharExponent(SubordinatedBrownian{{0.5, 0.0}}, 1),
                        CorrelationKernel(OrnsteinUhlenbeck{1.0, 1.0, 2.0}, 1));
    CHECK(upsilon(sub, 1.0).value == rel(oracle::ups_subbm_ou_beta1).epsilon(1e-7));
  }

  TEST_CASE("Upsilon is nonincreasing and vanishes at infinity") {
    const ModelSpec m = stable_riesz(1, 2.0, 0.5);
    double prev = 1e300;
    for (double b = 1e-3; b < 1e6; b *= 3.0) {
      const double v = upsilon(m, b).value;
      CHECK(v <= prev);
      CHECK(v >= 0.0);
      prev = v;
    }
    CHECK(prev < 1e-3);
  }

  TEST_CASE("divergent Upsilon carries a certificate") {
    const UpsilonValue v = upsilon(stable_riesz(3, 2.0, 0.5), 1.0);
    CHECK(v.status == Finiteness::Divergent);
    CHECK(std::isinf(v.value));
    REQUIRE(v.certificate.has_value());
    CHECK(v.certificate->where == "infinity");
    CHECK(v.certificate->integrand.power >= -1.0);
  }

  TEST_CASE("Upsilon at zero is a monotone limit") {
    const ModelSpec t(CharExponent::stable(2.0, 1.0, 3), CorrelationKernel(Poisson{1.0, 1.0}, 3));
    const UpsilonValue z = upsilon(t, 0.0);
    CHECK(z.finite());
    CHECK(z.value >= upsilon(t, 1e-3).value);
    CHECK(upsilon(stable_riesz(1, 2.0, 0.5), 0.0).status == Finiteness::Divergent);
  }

  TEST_CASE("amplitude closed form and quadrature") {
    CHECK(amplitude_A(1, 2.0, 0.5) == rel(std::pow(2.0, -0.25) * std::sqrt(pi)).epsilon(1e-12));
    CHECK(amplitude_A(2, 2.0, 1.0) == rel(oracle::A_2_2_1).epsilon(1e-8));
    CHECK(amplitude_A(1, 1.5, 0.25) == rel(oracle::A_1_15_025).epsilon(1e-10));
    // b -> 1: nu -> 0 and the amplitude stays finite; compare with the defining integral.
    const double b = 0.99, q = 2.0, nu = (1.0 - b) / q;
    auto g = [&](double r) { return 2.0 / (std::pow(r, b) + std::pow(r, q + b)); };
    const double integral = quad::half_line(g).value;
    const double ref = riesz_constant(1, b) / (2.0 * pi * std::pow(2.0, nu)) * integral;
    CHECK(amplitude_A(1, q, b) == rel(ref).epsilon(1e-8));
    CHECK_THROWS_AS(amplitude_A(1, 0.5, 0.25), InfiniteAmplitude);
    CHECK_THROWS_AS(amplitude_A(2, 1.0, 1.0), InfiniteAmplitude);
  }

  TEST_CASE("Dalang condition") {
    CHECK(dalang_condition(stable_riesz(1, 2.0, 0.5)) == Decision::Yes);
    CHECK(dalang_condition(stable_riesz(3, 2.0, 0.5)) == Decision::No);
    for (double q : {0.5, 1.5, 3.0}) {
      const ModelSpec m(CharExponent::stable(2.0, 1.0, 3), CorrelationKernel(LogCorrected{1.0, q}, 3));
      CHECK(dalang_condition(m) == (q > 1.0 ? Decision::Yes : Decision::No));
    }
    const ModelSpec bounded(CharExponent(TableDriven{{0.5, 1.0, 2.0, 4.0}, {0.2, 0.5, 0.9, 0.9}}, 1),
                            CorrelationKernel(Riesz{0.5, 1.0}, 1));
    CHECK(dalang_condition(bounded) == Decision::No);
  }

  TEST_CASE("replica potential") {
    const ModelSpec m = stable_riesz(1, 2.0, 0.5);
    const std::array<double, 1> zero{0.0}, one{1.0}, far{400.0};
    CHECK(replica_potential_at(m, 1.0, zero) == rel(upsilon(m, 1.0).value).epsilon(1e-9));
    CHECK(replica_potential_at(m, 1.0, one) == rel(oracle::pi_beta1_x1).epsilon(1e-8));
    CHECK(std::abs(replica_potential_at(m, 1.0, far)) < 0.05 * upsilon(m, 1.0).value);
    CHECK_THROWS_AS(replica_potential_at(stable_riesz(3, 2.0, 0.5), 1.0, std::array<double, 3>{0.0, 1.0, 0.0}),
                    PreconditionFailed);
  }

  TEST_CASE("maximum principle on random points") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const ModelSpec m = stable_riesz(2, 1.5, 1.0);
    const double top = upsilon(m, 0.5).value;
    for (int i = 0; i < 20; ++i) {
      const std::array<double, 2> x{u(gen), u(gen)};
      CHECK(replica_potential_at(m, 0.5, x) <= top + 1e-8);
    }
  }

  TEST_CASE("energy forms") {
    const CorrelationKernel ou(OrnsteinUhlenbeck{1.0, 1.0, 2.0}, 1);
    const EnergyForms single = energy_form(ou, MeasureSpec{{Atom{1.0, {0.0}}}, {}});
    CHECK(single.spatial == rel(1.0).epsilon(1e-12));
    CHECK(single.spectral == rel(1.0).epsilon(1e-8));

    const CorrelationKernel cauchy(Cauchy{1.0, 1.0}, 1);
    const double a = 1.7;
    const EnergyForms two = energy_form(cauchy, MeasureSpec{{Atom{0.5, {0.0}}, Atom{0.5, {a}}}, {}});
    CHECK(two.spatial == rel(0.5 + 0.5 / (1.0 + a * a)).epsilon(1e-12));
    CHECK(two.spectral == rel(two.spatial).epsilon(1e-6));

    const CorrelationKernel riesz(Riesz{0.5, 1.0}, 1);
    const EnergyForms g1 = energy_form(riesz, MeasureSpec{{}, {GaussianBump{1.0, {0.0}, 1.0}}});
    const double e_ref = std::pow(2.0, -0.5) * std::tgamma(0.25) / std::sqrt(pi);  // E |N(0,2)|^{-1/2}
    CHECK(g1.spatial == rel(e_ref).epsilon(1e-8));
    const EnergyForms g07 = energy_form(riesz, MeasureSpec{{}, {GaussianBump{1.0, {0.0}, 0.7}}});
    CHECK(g07.spatial == rel(oracle::riesz_gauss_energy_s07).epsilon(1e-8));
    CHECK(g07.spectral <= g07.spatial + 1e-8);
  }

  TEST_CASE("transience") {
    CHECK(classify_transience(stable_riesz(1, 2.0, 0.5)) == Transience::InfiniteTotalOccupation);
    const ModelSpec t(CharExponent::stable(2.0, 1.0, 3), CorrelationKernel(Poisson{1.0, 1.0}, 3));
    CHECK(classify_transience(t) == Transience::FiniteTotalOccupation);
    CHECK(occupation_mean(t, 400.0) == rel(occupation_mean(t, 200.0)).epsilon(0.05));
    CHECK(occupation_mean(t, 400.0) <= upsilon(t, 0.0).value + 1e-8);
  }

  TEST_CASE("occupation functional") {
    const ModelSpec g = stable_riesz(1, 2.0, 0.5, 0.25);
    CHECK(occupation_mean(g, 1.0) == rel(oracle::girsanov_mean).epsilon(1e-8));
    const OccupationEstimate e = occupation_mc(g, 1.0, 2000, 1e-3, 3);
    CHECK(std::abs(e.mean - oracle::girsanov_mean) < 4.0 * e.stderr_mean + 0.03 * oracle::girsanov_mean);
    CHECK_FALSE(e.bias_note.empty());

    const ModelSpec flat(CharExponent(IsotropicStable{2.0, 0.25}, 1), CorrelationKernel(OrnsteinUhlenbeck{1.0, 1e-300, 2.0}, 1));
    const OccupationEstimate one = occupation_mc(flat, 2.5, 100, 1e-2, 1);
    CHECK(one.mean == rel(2.5).epsilon(1e-12));

    const OccupationEstimate again = occupation_mc(g, 1.0, 2000, 1e-3, 3);
    CHECK(again.mean == e.mean);
    const ModelSpec sub(CharExponent(SubordinatedBrownian{{0.5, 0.0}}, 1), CorrelationKernel(Riesz{0.5, 1.0}, 1));
    CHECK_THROWS_AS(occupation_mc(sub, 1.0, 10, 1e-2, 1), Unsupported);
  }

  TEST_CASE("potential profile export") {
    const PotentialProfile p = potential_profile(stable_riesz(1, 2.0, 0.5), {0.1, 1.0, 10.0});
    const std::string csv = p.to_csv();
    CHECK(csv.rfind("beta,upsilon,err,divergent\n", 0) == 0);
    CHECK(p.rows.size() == 3);
  }
}
