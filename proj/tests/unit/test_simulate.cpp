#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <vector>

#include "approx.hpp"
#include "doctest.h"
#include "json.hpp"
#include "sheq/errors.hpp"
#include "sheq/simulate.hpp"

using namespace sheq;
constexpr double pi = std::numbers::pi;

namespace {

ModelSpec heat(double b = 0.5) {
  return ModelSpec(CharExponent::stable(2.0, 1.0, 1), CorrelationKernel(Riesz{b, 1.0}, 1), SigmaSpec::constant(0.0),
                   DriftSpec{}, InitialData::delta({0.0}));
}

ModelSpec pam(double lambda = 0.0) {
  return ModelSpec(CharExponent::stable(2.0, 1.0, 1), CorrelationKernel(Riesz{0.5, 1.0}, 1), SigmaSpec::pam(1.0),
                   lambda == 0.0 ? DriftSpec{} : DriftSpec::mass(lambda), InitialData::constant(1.0));
}

LatticeSpec lattice(int n, double L, double dt, double T, int M, std::uint64_t seed = 1) {
  LatticeSpec s;
  s.n = n;
  s.L = L;
  s.dt = dt;
  s.T = T;
  s.replicas = M;
  s.seed = seed;
  return s;
}

std::vector<double> run(const ModelSpec& m, const LatticeSpec& s, long steps, std::uint64_t replica = 0) {
  auto g = std::make_shared<const SpectralGrid>(m, s);
  FieldState st = initial_state(m, g);
  const rng::Stream base(s.seed, replica);
  for (long k = 1; k <= steps; ++k) {
    rng::Stream sk = base.substream(static_cast<std::uint32_t>(k));
    step(st, m, sk);
  }
  return st.u;
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("lattice spec validation") {
    CHECK_THROWS_AS(lattice(100, 8.0, 0.01, 1.0, 1).validate(), InvalidArgument);
    LatticeSpec s = lattice(64, 8.0, 0.01, 1.0, 1);
    s.d = 3;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    CHECK(lattice(64, 8.0, 0.01, 1.0, 1).steps() == 100);
  }

  TEST_CASE("spectral multipliers are contractions without mass") {
    const SpectralGrid g(pam(), lattice(64, 16.0, 0.01, 1.0, 1));
    for (double v : g.multiplier()) {
      CHECK(v <= 1.0);
      CHECK(v >= 0.0);
    }
    CHECK(g.zero_mode_dropped());
    const SpectralGrid gm(pam(0.8), lattice(64, 16.0, 0.01, 1.0, 1));
    for (double v : gm.multiplier()) CHECK(v <= std::exp(0.01 * 0.4) * (1.0 + 1e-15));
  }

  TEST_CASE("flat spectrum gives independent site increments") {
    CustomSpectral flat;
    flat.f_hat = [](std::span<const double>) { return 2.0; };
    const ModelSpec m(CharExponent::stable(2.0, 1.0, 1), CorrelationKernel(flat, 1));
    const LatticeSpec s = lattice(64, 8.0, 0.01, 1.0, 1);
    const SpectralGrid g(m, s);
    const double expect = 0.01 * 2.0 * 64 / 8.0;
    double v = 0.0, c1 = 0.0;
    const int draws = 4000;
    for (int i = 0; i < draws; ++i) {
      rng::Stream r(7, std::uint64_t(i));
      const std::vector<double> w = synthesize_noise_increment(g, r);
      for (int j = 0; j < 64; ++j) {
        v += w[j] * w[j];
        c1 += w[j] * w[(j + 1) % 64];
      }
    }
    v /= draws * 64.0;
    c1 /= draws * 64.0;
    CHECK(v == rel(expect).epsilon(0.02));
    CHECK(std::abs(c1) < 0.02 * expect);
  }

  TEST_CASE("noise lag covariance matches the mode sum") {
    const ModelSpec m(CharExponent::stable(2.0, 1.0, 1), CorrelationKernel(OrnsteinUhlenbeck{1.0, 1.0, 2.0}, 1));
    const int n = 64;
    const double L = 16.0, dt = 0.01, h = L / n;
    const SpectralGrid g(m, lattice(n, L, dt, 1.0, 1));
    const CorrelationKernel& k = m.kernel;
    for (int lag : {0, 2, 5}) {
      double mode_sum = 0.0;
      for (int j = -n / 2; j < n / 2; ++j) {
        const double xi = 2.0 * pi * j / L;
        mode_sum += k.f_hat_axis(std::abs(xi)) * std::cos(xi * lag * h);
      }
      mode_sum *= dt / L;
      const int draws = 10000;
      std::vector<double> per(draws);
      for (int i = 0; i < draws; ++i) {
        rng::Stream r(11, std::uint64_t(i));
        const std::vector<double> w = synthesize_noise_increment(g, r);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += w[j] * w[(j + lag) % n];
        per[i] = acc / n;
      }
      double mean = 0.0, var = 0.0;
      for (double x : per) mean += x;
      mean /= draws;
      for (double x : per) var += (x - mean) * (x - mean);
      const double se = std::sqrt(var / (draws - 1) / draws);
      CHECK(std::abs(mean - mode_sum) < 3.0 * se);
    }
  }

  TEST_CASE("identical seeds give identical fields") {
    const LatticeSpec s = lattice(64, 16.0, 0.01, 1.0, 1, 99);
    CHECK(run(pam(), s, 30, 4) == run(pam(), s, 30, 4));
    CHECK(run(pam(), s, 30, 4) != run(pam(), s, 30, 5));
  }

  TEST_CASE("deterministic flow from a point mass follows the transition density") {
    const ModelSpec m = heat();
    const LatticeSpec s = lattice(256, 16.0, 0.01, 1.0, 1);
    auto g = std::make_shared<const SpectralGrid>(m, s);
    FieldState st = delta_initial(m, g);
    const double h = s.L / s.n;
    rng::Stream r(1, 0);
    for (int k = 0; k < 50; ++k) {
      step(st, m, r);
      double mass = 0.0;
      for (double v : st.u) mass += v * h;
      CHECK(std::abs(mass - 1.0) < 1e-8);
    }
    double worst = 0.0;
    for (int j = 0; j < s.n; j += 8) {
      double x = j * h;
      double p = 0.0;
      for (int w = -3; w <= 3; ++w) {
        const std::array<double, 1> xs{x + w * s.L};
        p += transition_density(m.exponent, st.time, xs);
      }
      worst = std::max(worst, std::abs(st.u[j] - p));
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("point-mass data needs d = 1") {
    ModelSpec m(CharExponent::stable(2.0, 1.0, 2), CorrelationKernel(Riesz{1.0, 1.0}, 2), SigmaSpec::constant(0.0), {},
                InitialData::delta({0.0, 0.0}));
    LatticeSpec s = lattice(16, 8.0, 0.01, 1.0, 1);
    s.d = 2;
    auto g = std::make_shared<const SpectralGrid>(m, s);
    CHECK_THROWS_AS(delta_initial(m, g), PreconditionFailed);
  }

  TEST_CASE("mass term commutes with the flow") {
    const LatticeSpec s = lattice(64, 16.0, 0.01, 1.0, 1, 5);
    const double lambda = -1.3;
    const std::vector<double> free = run(pam(), s, 40);
    const std::vector<double> massive = run(pam(lambda), s, 40);
    const double factor = std::exp(lambda * 40 * 0.01 / 2.0);
    for (std::size_t j = 0; j < free.size(); ++j)
      CHECK(massive[j] == rel(free[j] * factor).epsilon(1e-11));
  }

  TEST_CASE("linear drift on constant data grows exponentially") {
    DriftSpec b;
    b.lip_b = 1.0;
    b.affine = std::make_pair(0.0, 1.0);
    const ModelSpec m(CharExponent::stable(2.0, 1.0, 1), CorrelationKernel(Riesz{0.5, 1.0}, 1), SigmaSpec::constant(0.0), b,
                      InitialData::constant(2.0));
    const std::vector<double> u = run(m, lattice(32, 8.0, 0.001, 1.0, 1), 1000);
    for (double v : u) CHECK(std::abs(v - 2.0 * std::exp(1.0)) < 2.0 * std::exp(1.0) * 0.001);
  }

  TEST_CASE("non-constant bounded data is rejected") {
    ModelSpec m = pam();
    m.initial = InitialData::bounded(0.5, 2.0);
    auto g = std::make_shared<const SpectralGrid>(m, lattice(32, 8.0, 0.01, 1.0, 1));
    CHECK_THROWS_AS(initial_state(m, g), Unsupported);
  }

  TEST_CASE("one-step linear variance") {
    const ModelSpec m(CharExponent::stable(2.0, 1.0, 1), CorrelationKernel(Riesz{0.5, 1.0}, 1));
    const LatticeSpec s = lattice(64, 16.0, 0.01, 1.0, 2000, 3);
    const LinearValidation v = run_linear_validation(m, s, {0.01});
    const SpectralGrid g(m, s);
    double formula = 0.0;
    for (std::size_t k = 0; k < g.modes(); ++k) {
      const double w = (k == 0 || k == g.modes() - 1) ? 1.0 : 2.0;
      formula += w * 0.01 / s.L * std::exp(-2.0 * 0.01 * g.re_psi()[k]) * g.f_hat()[k];
    }
    CHECK(v.exact[0] == rel(formula).epsilon(1e-12));
    CHECK(std::abs(v.sample[0] - v.exact[0]) < 4.0 * v.stderr_sample[0]);
  }

  TEST_CASE("linear validation on a small lattice") {
    const ModelSpec m(CharExponent::stable(2.0, 1.0, 1), CorrelationKernel(Riesz{0.5, 1.0}, 1));
    const LinearValidation a = run_linear_validation(m, lattice(64, 8.0, 0.01, 1.0, 200, 2), {0.1, 0.5});
    const LinearValidation b = run_linear_validation(m, lattice(64, 8.0, 0.01, 1.0, 800, 2), {0.1, 0.5});
    CHECK(b.max_rel_error < 0.1);
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      const double ratio = a.stderr_sample[i] / b.stderr_sample[i];
      CHECK(ratio > 1.5);
      CHECK(ratio < 2.6);
    }
  }

  TEST_CASE("deterministic heat flow does not grow") {
    ModelSpec m = pam();
    m.sigma = SigmaSpec::constant(0.0);
    const SimResult r = estimate_exponent(m, lattice(32, 8.0, 0.01, 2.0, 4), 2);
    CHECK(r.gamma_hat <= 1e-12);
  }

  TEST_CASE("results do not depend on the worker count") {
    const LatticeSpec s = lattice(32, 16.0, 0.01, 1.0, 24, 8);
    setenv("SHEQ_THREADS", "1", 1);
    const SimResult a = estimate_exponent(pam(), s, 2);
    setenv("SHEQ_THREADS", "3", 1);
    const SimResult b = estimate_exponent(pam(), s, 2);
    unsetenv("SHEQ_THREADS");
    CHECK(a.mp_avg == b.mp_avg);
    CHECK(a.gamma_hat == b.gamma_hat);
    CHECK(a.ci_lo == b.ci_lo);
    CHECK(a.config_hash == b.config_hash);
    LatticeSpec other = s;
    other.seed = 9;
    CHECK(estimate_exponent(pam(), other, 2).config_hash != a.config_hash);
  }

  TEST_CASE("simulation outputs") {
    const SimResult r = estimate_exponent(pam(), lattice(32, 16.0, 0.01, 1.0, 8), 4);
    CHECK(r.to_csv().rfind("t,m2_site,m2_avg,mp_site,mp_avg\n", 0) == 0);
    const auto j = nlohmann::json::parse(r.summary_json());
    for (const char* key : {"gamma_hat", "ci", "window", "config_hash", "notes"}) CHECK(j.contains(key));
    CHECK(j.at("window")[0].get<double>() == rel(0.5));
    CHECK(r.ci_lo <= r.ci_hi);
    CHECK_FALSE(r.notes.empty());
  }
}
