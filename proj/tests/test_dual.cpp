#include <cmath>
#include <vector>

#include "doctest.h"
#include "sjs/slblr/dual.hpp"
#include "support.hpp"

using namespace sjs;
using namespace sjs::slblr;

namespace {

// Every consecutive pair: the witness is no farther from the later iterate.
bool witness_valid(const std::vector<std::vector<double>>& w, const std::vector<double>& x) {
  for (std::size_t k = 1; k < w.size(); ++k) {
    double a = 0.0, b = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      a += (x[d] - w[k][d]) * (x[d] - w[k][d]);
      b += (x[d] - w[k - 1][d]) * (x[d] - w[k - 1][d]);
    }
    if (a > b + 1e-9 * std::max(1.0, b)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("step size") {
  StepOutcome s = compute_stepsize(100.0, 90.0, 25.0, 0.5, 0.9);
  CHECK(s.kind == StepKind::kOk);
  CHECK(std::abs(s.step - 0.18) <= 1e-12);
  CHECK(compute_stepsize(100.0, 90.0, 0.0, 0.5, 0.9).kind == StepKind::kStationary);
  CHECK(compute_stepsize(90.0, 90.0, 4.0, 0.5, 0.9).kind == StepKind::kLevelBreach);
  CHECK(compute_stepsize(80.0, 90.0, 4.0, 0.5, 0.9).kind == StepKind::kLevelBreach);
}

TEST_CASE("level estimate is the largest implied level over the window") {
  std::vector<LevelRecord> r = {{0.2, 25.0, 90.0}, {0.1, 16.0, 92.0}};
  CHECK(std::abs(update_level(r, 0.5) - 100.0) <= 1e-12);
  std::vector<LevelRecord> one = {{0.1, 16.0, 92.0}};
  CHECK(update_level(one, 0.5) == doctest::Approx(95.2));
  CHECK_THROWS_AS(update_level(std::vector<LevelRecord>{}, 0.5), std::invalid_argument);
}

TEST_CASE("step then level round trip recovers the level") {
  test::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    double L = test::uniform_real(rng, -50.0, 50.0);
    double level = L + test::uniform_real(rng, 0.1, 20.0);
    double g2 = test::uniform_real(rng, 0.1, 100.0);
    StepOutcome s = compute_stepsize(level, L, g2, 0.5, 1.0);
    std::vector<LevelRecord> r = {{s.step, g2, L}};
    CHECK(update_level(r, 0.5) == doctest::Approx(level).epsilon(1e-12));
  }
}

TEST_CASE("multiplier update projects onto the orthant and records the window") {
  DualState st;
  st.lambda = {1.0, 0.5, 0.0};
  std::vector<double> g = {1.0, -2.0, -1.0};
  update_multipliers(st, g, 0.5);
  CHECK(st.lambda == std::vector<double>{1.5, 0.0, 0.0});
  CHECK(st.step == 0.5);
  REQUIRE(st.window.size() == 1);
  CHECK(st.window[0] == st.lambda);
}

TEST_CASE("divergence detection: hand windows") {
  auto a = detect_divergence({{0.0}, {2.0}, {0.0}});
  CHECK(a.feasible);
  REQUIRE(a.witness.size() == 1);
  CHECK(a.witness[0] == doctest::Approx(1.0));
  CHECK(!detect_divergence({{0.0}, {3.0}, {1.0}, {4.0}}).feasible);
  CHECK(detect_divergence({{1.0, 2.0}}).feasible);  // fewer than two iterates
}

TEST_CASE("divergence detection: dimensions that never move are dropped") {
  auto v = detect_divergence({{0.0, 0.0, 1.0}, {0.0, 0.0, 3.0}, {0.0, 0.0, 2.0}});
  CHECK(v.feasible);
  REQUIRE(v.witness.size() == 3);
  CHECK(v.witness[0] == 0.0);
  CHECK(v.witness[1] == 0.0);
  CHECK(v.witness[2] == doctest::Approx(2.0).epsilon(1e-9));
  auto zero = detect_divergence({{0.0, 0.0}, {0.0, 0.0}});
  CHECK(zero.feasible);
  CHECK(zero.witness == std::vector<double>{0.0, 0.0});
}

TEST_CASE("divergence detection: sequences moving toward a fixed point are feasible") {
  test::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    int dim = test::uniform_int(rng, 1, 12);
    std::vector<double> center(dim);
    for (double& c : center) c = test::uniform_real(rng, 0.0, 3.0);
    std::vector<std::vector<double>> w;
    double t = 1.0;
    std::vector<double> start(dim);
    for (double& s : start) s = test::uniform_real(rng, 0.0, 6.0);
    int len = test::uniform_int(rng, 2, 15);
    for (int k = 0; k < len; ++k) {
      std::vector<double> x(dim);
      for (int d = 0; d < dim; ++d) x[d] = center[d] + t * (start[d] - center[d]);
      w.push_back(x);
      t *= test::uniform_real(rng, 0.2, 0.9);
    }
    auto v = detect_divergence(w);
    REQUIRE(v.feasible);
    CHECK(witness_valid(w, v.witness));
  }
}

TEST_CASE("divergence detection: an oscillation that grows is infeasible") {
  test::Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    int dim = test::uniform_int(rng, 1, 6);
    std::vector<double> center(dim, 5.0);
    std::vector<double> dir(dim);
    for (double& d : dir) d = test::uniform_real(rng, 0.5, 1.0);
    std::vector<std::vector<double>> w;
    double r = 0.5;
    for (int k = 0; k < 6; ++k) {
      std::vector<double> x(dim);
      double sign = k % 2 == 0 ? 1.0 : -1.0;
      for (int d = 0; d < dim; ++d) x[d] = center[d] + sign * r * dir[d];
      w.push_back(x);
      r *= 1.5;
    }
    // Collinear and alternating with growing amplitude: 1-D Helly argument
    // shows no point is closer to each successor.
    CHECK(!detect_divergence(w).feasible);
  }
}

TEST_CASE("resolve fills defaulted fields") {
  HyperParams p;
  HyperParams r = resolve(p, 2.0, 100.0, 8);
  CHECK(r.beta == doctest::Approx(0.1));
  CHECK(r.rho_max == 0.0);
  CHECK(r.eps_violation == doctest::Approx(0.1));
  CHECK(r.delta_max == 8);
  p.beta = 0.3;
  p.rho_max = 2.0;
  p.delta_max = 3;
  HyperParams kept = resolve(p, 2.0, 100.0, 8);
  CHECK(kept.beta == 0.3);
  CHECK(kept.rho_max == 2.0);
  CHECK(kept.delta_max == 3);
}
