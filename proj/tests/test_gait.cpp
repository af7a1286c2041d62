// Copyright 2026 The stairgait Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stairgait/gait.hpp"

#include <random>

#include <catch2/catch_amalgamated.hpp>

using namespace stairgait;

TEST_CASE("polynomial evaluation", "[gait]") {
  PolynomialGait g;
  g.duration = 1.0;
  g.alpha.setZero();

  SECTION("constant row") {
    g.alpha(0, 0) = 1.0;
    const auto s = g.eval(0.37);
    CHECK(s.q[0] == 1.0);
    CHECK(s.qd[0] == 0.0);
    CHECK(s.qdd[0] == 0.0);
  }

  SECTION("linear row") {
    g.alpha(1, 1) = 1.0;
    const auto s = g.eval(0.3);
    CHECK(s.q[1] == Catch::Approx(0.3));
    CHECK(s.qd[1] == Catch::Approx(1.0));
    CHECK(s.qdd[1] == 0.0);
  }

  SECTION("derivatives match finite differences for random coefficients") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
      for (int k = 0; k < 5; ++k) {
        for (int i = 0; i < 5; ++i) g.alpha(k, i) = u(rng);
      }
      for (double t : {0.1, 0.45, 0.8}) {
        const auto s = g.eval(t);
        const auto sp = g.eval(t + h);
        const auto sm = g.eval(t - h);
        for (int k = 0; k < 5; ++k) {
          CHECK(std::abs((sp.q[k] - sm.q[k]) / (2 * h) - s.qd[k]) < 1e-8);
          CHECK(std::abs((sp.qd[k] - sm.qd[k]) / (2 * h) - s.qdd[k]) < 1e-8);
        }
      }
    }
  }

  SECTION("evaluation outside the step is a domain error") {
    CHECK_THROWS_AS(g.eval(-0.01), std::domain_error);
    CHECK_THROWS_AS(g.eval(1.01), std::domain_error);
  }
}

TEST_CASE("boundary embedding", "[gait]") {
  BoundaryConditions bc;
  bc.duration = 0.5;
  bc.q_init.setZero();
  bc.q_final.setOnes();

  SECTION("zero free parameters force the quartic coefficient") {
    const PolynomialGait g = embed(FreeParams::Zero(), bc);
    for (int k = 0; k < 5; ++k) CHECK(g.alpha(k, 4) == Catch::Approx(16.0));  // 1 / 0.5^4
  }

  SECTION("boundary residuals vanish for arbitrary parameters") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int trial = 0; trial < 50; ++trial) {
      FreeParams theta;
      for (int i = 0; i < kNumFreeParams; ++i) theta[i] = u(rng);
      bc.q_init = Configuration::Random();
      bc.q_final = Configuration::Random();
      const PolynomialGait g = embed(theta, bc);
      CHECK((g.eval(0.0).q - bc.q_init).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((g.eval(bc.duration).q - bc.q_final).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SECTION("extract inverts embed") {
    FreeParams theta;
    for (int i = 0; i < kNumFreeParams; ++i) theta[i] = 0.1 * i - 0.7;
    CHECK((extract(embed(theta, bc)) - theta).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("free parameter count matches five joints times three coefficients") {
    STATIC_CHECK(kNumFreeParams == 15);
  }
}

TEST_CASE("initial guess", "[gait]") {
  BoundaryConditions bc;
  bc.duration = 0.5;

  SECTION("zero displacement gives zero parameters") {
    bc.q_init = Configuration::Ones();
    bc.q_final = Configuration::Ones();
    CHECK(initial_guess(bc).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("reference boundary table gives the expected linear rate") {
    bc.q_init << 0.2618, 1.3140, -1.2267, -0.0219, 0.0;
    bc.q_final << 0.1964, 0.0, 0.0219, 1.2267, 1.3140;
    const FreeParams theta = initial_guess(bc);
    CHECK(theta[1 * kFreeParamsPerJoint] == Catch::Approx((0.0 - 1.3140) / 0.5));
    CHECK(theta[1 * kFreeParamsPerJoint] == Catch::Approx(-2.628));
  }

  SECTION("embedded guess passes through the midpoint") {
    bc.q_init << 0.1, 0.2, -0.3, 0.4, -0.5;
    bc.q_final << 0.5, -0.2, 0.3, 0.0, 0.5;
    const PolynomialGait g = embed(initial_guess(bc), bc);
    const Vec5 mid = 0.5 * (bc.q_init + bc.q_final);
    CHECK((g.eval(bc.duration / 2).q - mid).cwiseAbs().maxCoeff() < 1e-12);
  }

  SECTION("perturbation is deterministic for a fixed seed") {
    bc.q_init = Configuration::Zero();
    bc.q_final = Configuration::Ones();
    std::mt19937_64 a(42), b(42);
    const FreeParams pa = perturb(initial_guess(bc), 0.5, a);
    const FreeParams pb = perturb(initial_guess(bc), 0.5, b);
    CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);
  }
}
