/*
 * Copyright 2026 The bcsl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cmath>
#include <random>

#include "bcsl/data_io.hpp"
#include "bcsl/theory.hpp"
#include "oracles.hpp"

using namespace bcsl;
using theory::TheoryParams;

namespace {

TheoryParams unit_params() {
  TheoryParams p;
  p.V = p.S = p.upsilon = p.L_tilde = 1.0;
  p.D = 10.0;
  p.epsilon = 1.0 / 6.0;
  return p;
}

}  // namespace

TEST_CASE("inverse normal CDF against bisection") {
  for (double p : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.999, 1 - 1e-9})
    CHECK(std::abs(theory::inverse_normal_cdf(p) - oracle::bisect_quantile(p)) <= 1e-9);
  CHECK_THROWS(theory::inverse_normal_cdf(0.0));
  CHECK_THROWS(theory::inverse_normal_cdf(1.0));
}

TEST_CASE("c_epsilon examples") {
  CHECK(theory::c_epsilon(1.0 / 6.0) == doctest::Approx(4.002386373020493).epsilon(1e-9));
  CHECK(theory::c_epsilon(0.5 - 1e-9) == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-6));
  CHECK(std::abs(theory::c_epsilon(0.1) - oracle::c_eps(0.1)) <= 1e-6);
  CHECK(theory::c_epsilon(0.1) == doctest::Approx(5.698059856117004).epsilon(1e-9));
  CHECK_THROWS(theory::c_epsilon(0.0));
  CHECK_THROWS(theory::c_epsilon(0.5));
  double prev = 1e300;
  for (double e = 0.01; e < 0.5; e += 0.01) {
    const double c = theory::c_epsilon(e);
    CHECK(c < prev);
    prev = c;
  }
}

TEST_CASE("median floor regression value and second implementation") {
  const auto p = unit_params();
  const auto r = theory::delta_nm_alpha(900, 20, 0.2, p, 100);
  CHECK(r.bound == doctest::Approx(1.684985256064744).epsilon(1e-10));
  CHECK(r.feasibility_lhs == doctest::Approx(8.929862609125058).epsilon(1e-10));
  CHECK_FALSE(r.feasible);
  CHECK(r.feasibility_limit == doctest::Approx(1.0 / 3.0));
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int i = 0; i < 200; ++i) {
    TheoryParams q = unit_params();
    q.V = u(gen), q.S = u(gen), q.L_tilde = u(gen), q.D = u(gen) * 5;
    const std::size_t n = 50 + i * 7, m = 2 + i % 50, dim = 1 + i % 30;
    const double a = 0.45 * (i % 10) / 10.0;
    const double got = theory::delta_nm_alpha(n, m, a, q, dim).bound;
    const double want = (double)oracle::delta_alpha(n, m, a, q.V, q.S, q.L_tilde, q.D, q.epsilon, dim);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK_THROWS(theory::delta_nm_alpha(900, 20, 0.5, p, 100));
}

TEST_CASE("median floor term dropout") {
  auto p = unit_params();
  p.S = 0.0;
  const std::size_t n = 400, m = 100000, dim = 3;
  const auto r = theory::delta_nm_alpha(n, m, 0.0, p, dim);
  const double logt = std::log1p(400.0 * (m + 1) * 10.0);
  const double expect = 2 * std::sqrt(2.0) / ((m + 1.0) * n) +
                        std::sqrt(2.0) * theory::c_epsilon(p.epsilon) / std::sqrt(400.0) *
                            std::sqrt(dim * logt / m);
  CHECK(r.bound == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("trimmed floor regression value and second implementation") {
  const auto p = unit_params();
  const auto r = theory::delta_nm_beta(450, 40, 0.2, p, 100);
  CHECK(r.bound == doctest::Approx(114.8926270010856).epsilon(1e-10));
  CHECK(r.feasible);
  CHECK(r.remainder_order == doctest::Approx(0.2 / 450 + 1.0 / (450.0 * 40)));
  // beta = 0 reduces to the averaging term alone.
  const auto z = theory::delta_nm_beta(450, 40, 0.0, p, 100);
  const double logt = std::log1p(450.0 * 41 * 10);
  CHECK(z.bound == doctest::Approx(100 / p.epsilon * 2 / std::sqrt(450.0 * 40) *
                                   std::sqrt(logt + std::log1p(40.0) / 100))
                       .epsilon(1e-12));
  // Linear in upsilon.
  auto q = p;
  q.upsilon = 3.5;
  CHECK(theory::delta_nm_beta(450, 40, 0.2, q, 100).bound == doctest::Approx(3.5 * r.bound).epsilon(1e-12));
  // Infeasible when alpha > beta.
  CHECK_FALSE(theory::delta_nm_beta(450, 40, 0.1, p, 100, 0.2).feasible);
  CHECK_THROWS(theory::delta_nm_beta(450, 40, 0.5, p, 100));
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 30 + 11 * i, m = 3 + i % 40, dim = 1 + i % 20;
    const double b = 0.4 * (i % 7) / 7.0;
    CHECK(theory::delta_nm_beta(n, m, b, p, dim).bound ==
          doctest::Approx((double)oracle::delta_beta(n, m, b, 1.0, 1.0, 10.0, p.epsilon, dim))
              .epsilon(1e-12));
  }
}

TEST_CASE("bound monotonicity on grids") {
  const auto p = unit_params();
  for (std::size_t n : {100u, 400u, 1600u})
    for (std::size_t m : {10u, 40u}) {
      double prev = 0.0;
      for (double a = 0.0; a < 0.5; a += 0.05) {
        const double v = theory::delta_nm_alpha(n, m, a, p, 20).bound;
        CHECK(v > prev);
        prev = v;
      }
      prev = 0.0;
      for (double b = 0.0; b < 0.5; b += 0.05) {
        const double v = theory::delta_nm_beta(n, m, b, p, 20).bound;
        CHECK(v > prev);
        prev = v;
      }
    }
  double prev_v = 0.0;
  for (double V = 0.1; V < 5; V += 0.3) {
    auto q = p;
    q.V = V;
    const double v = theory::delta_nm_alpha(400, 20, 0.1, q, 20).bound;
    CHECK(v > prev_v);
    prev_v = v;
  }
  double prev_n = 1e300;
  for (std::size_t n = 100; n <= 102400; n *= 2) {
    const double v = theory::delta_nm_alpha(n, 20, 0.1, p, 20).bound;
    CHECK(v < prev_n);
    prev_n = v;
  }
  double prev_m = 1e300;
  for (std::size_t m = 5; m <= 5120; m *= 2) {
    const double v = theory::delta_nm_alpha(400, m, 0.1, p, 20).bound;
    CHECK(v < prev_m);
    prev_m = v;
  }
  double prev_u = 0.0;
  for (double u = 0.1; u < 5; u += 0.3) {
    auto q = p;
    q.upsilon = u;
    const double v = theory::delta_nm_beta(400, 20, 0.1, q, 20).bound;
    CHECK(v > prev_u);
    prev_u = v;
  }
}

TEST_CASE("feasibility frontier grows with m") {
  auto p = unit_params();
  p.S = 0.5;
  double prev = -2.0;
  for (std::size_t m : {1000u, 4000u, 16000u, 64000u, 256000u}) {
    const double a = theory::max_feasible_alpha(2000, m, p, 2);
    CHECK(a >= prev);
    if (a >= 0.0) {
      CHECK(theory::delta_nm_alpha(2000, m, a, p, 2).feasible);
    }
    prev = a;
  }
  CHECK(prev > 0.0);
}

TEST_CASE("lambda suggestions") {
  CHECK(theory::suggest_lambda_glm(0.3, 1.0) == doctest::Approx(0.09));
  CHECK(theory::suggest_lambda_linear(100, 900) == doctest::Approx(1.0 / 9.0));
  CHECK(theory::suggest_lambda_linear(100, 900, 2.0) == doctest::Approx(2.0 / 9.0));
  CHECK(theory::suggest_lambda_glm(0.3, 1.0, 2.0) == doctest::Approx(0.18));
}

TEST_CASE("empirical parameter estimates are finite and positive") {
  const auto g = data::gen_logistic_dense(2000, 10, 3);
  const auto rows = g.data.all_indices();
  const std::vector<double> zero(11, 0.0);
  const auto est = theory::estimate_params({glm::Family::logistic, true}, g.data, rows, zero, 1.0 / 6, 10);
  CHECK(est.V > 0.0);
  CHECK(est.upsilon > 0.0);
  CHECK(est.L_tilde > 0.0);
  CHECK(std::isfinite(est.S));
  CHECK_NOTHROW(est.validate());
  const std::vector<std::size_t> master(rows.begin(), rows.begin() + 200);
  const auto h = theory::estimate_homogeneity({glm::Family::logistic, true}, glm::Penalty::none(),
                                              g.data, master, rows, zero);
  CHECK(h.rho > 0.0);
  CHECK(h.delta > 0.0);
  // At theta = 0 the logistic Hessian is Sigma_hat / 4; the smallest
  // eigenvalue cannot exceed the smallest diagonal entry.
  CHECK(h.rho <= 0.25 * 1.2);
}
