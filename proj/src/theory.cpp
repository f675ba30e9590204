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

#include "bcsl/theory.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bcsl::theory {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

// Acklam's rational approximation, relative error ~1.15e-9.
double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double lo = 0.02425;
  if (p < lo) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - lo) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

void TheoryParams::validate() const {
  if (V < 0 || S < 0 || upsilon < 0 || L_tilde < 0 || D < 0 || rho < 0 || delta < 0)
    throw std::invalid_argument("TheoryParams: constants must be nonnegative");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("TheoryParams: epsilon must lie in (0, 1/2)");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p must lie in (0, 1)");
  // 1 - p is exact here; working in the lower tail avoids cancellation.
  if (p > 0.5) return -inverse_normal_cdf(1.0 - p);
  double x = acklam(p);
  // Halley step on Phi(x) - p.
  const double e = normal_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double c_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("c_epsilon: epsilon must lie in (0, 1/2)");
  const double z = inverse_normal_cdf(1.0 - epsilon);
  return kSqrt2Pi * std::exp(0.5 * z * z);
}

double log_cover_term(std::size_t n, std::size_t m, const TheoryParams& params) {
  return std::log1p(static_cast<double>(n) * static_cast<double>(m + 1) *
                    params.L_tilde * params.D);
}

BoundReport delta_nm_alpha(std::size_t n, std::size_t m, double alpha,
                           const TheoryParams& params, std::size_t p) {
  params.validate();
  if (!(alpha >= 0.0 && alpha < 0.5))
    throw std::invalid_argument("delta_nm_alpha: alpha must lie in [0, 1/2)");
  if (n == 0 || m == 0 || p == 0)
    throw std::invalid_argument("delta_nm_alpha: n, m and p must be positive");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double spread = std::sqrt(static_cast<double>(p) * log_cover_term(n, m, params) /
                                  (md * (1.0 - alpha)));
  const double a = alpha + spread + 0.4748 * params.S / std::sqrt(nd);
  BoundReport r;
  r.bound = 2.0 * kSqrt2 / ((md + 1.0) * nd) +
            kSqrt2 * c_epsilon(params.epsilon) * params.V / std::sqrt(nd) * a;
  r.feasibility_lhs = a;
  r.feasibility_limit = 0.5 - params.epsilon;
  r.feasible = a <= r.feasibility_limit;
  return r;
}

BoundReport delta_nm_beta(std::size_t n, std::size_t m, double beta,
                          const TheoryParams& params, std::size_t p, double alpha) {
  params.validate();
  if (!(beta >= 0.0 && beta < 0.5))
    throw std::invalid_argument("delta_nm_beta: beta must lie in [0, 1/2)");
  if (n == 0 || m == 0 || p == 0)
    throw std::invalid_argument("delta_nm_beta: n, m and p must be positive");
  if (alpha < 0.0) alpha = beta;
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double pd = static_cast<double>(p);
  const double root = std::sqrt(log_cover_term(n, m, params) + std::log1p(md) / pd);
  BoundReport r;
  r.bound = params.upsilon * pd / params.epsilon *
            (3.0 * kSqrt2 * beta / std::sqrt(nd) + 2.0 / std::sqrt(nd * md)) * root;
  r.feasibility_lhs = beta;
  r.feasibility_limit = 0.5 - params.epsilon;
  r.feasible = alpha <= beta && beta <= r.feasibility_limit;
  r.remainder_order = beta / nd + 1.0 / (nd * md);
  return r;
}

double suggest_lambda_glm(double delta, double rho, double c) {
  if (!(delta > 0.0 && rho > 0.0 && c > 0.0))
    throw std::invalid_argument("suggest_lambda_glm: inputs must be positive");
  return c * delta * delta / rho;
}

double suggest_lambda_linear(std::size_t p, std::size_t n, double c) {
  if (p == 0 || n == 0 || !(c > 0.0))
    throw std::invalid_argument("suggest_lambda_linear: inputs must be positive");
  return c * static_cast<double>(p) / static_cast<double>(n);
}

double max_feasible_alpha(std::size_t n, std::size_t m, const TheoryParams& params,
                          std::size_t p, int steps) {
  double best = -1.0;
  for (int i = 0; i < steps; ++i) {
    const double alpha = 0.5 * static_cast<double>(i) / static_cast<double>(steps);
    if (delta_nm_alpha(n, m, alpha, params, p).feasible) best = alpha;
    else break;  // the condition's left side increases with alpha
  }
  return best;
}

TheoryParams estimate_params(const glm::GlmModel& model, const Dataset& data,
                             Shard rows, std::span<const double> theta,
                             double epsilon, double D) {
  if (rows.size() < 2) throw std::invalid_argument("estimate_params: need >= 2 rows");
  const std::size_t d = data.cols();
  const std::size_t n = rows.size();
  const double nd = static_cast<double>(n);

  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = dot(data.row(rows[i]), theta);
    const double mu = model.family == glm::Family::logistic ? glm::sigmoid(z) : z;
    resid[i] = mu - data.label(rows[i]);
  }
  // Per-sample gradient g_i = resid_i x_i; coordinate moments.
  std::vector<double> mean(d, 0.0), m2(d, 0.0), m3(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = data.row(rows[i]);
    for (std::size_t k = 0; k < d; ++k) mean[k] += resid[i] * x[k];
  }
  for (auto& v : mean) v /= nd;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = data.row(rows[i]);
    for (std::size_t k = 0; k < d; ++k) {
      const double c = resid[i] * x[k] - mean[k];
      m2[k] += c * c;
      m3[k] += c * c * c;
    }
  }
  TheoryParams out;
  out.epsilon = epsilon;
  out.D = D;
  double max_sd = 0.0, max_skew = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double var = m2[k] / nd;
    max_sd = std::max(max_sd, std::sqrt(var));
    if (var > 0.0) max_skew = std::max(max_skew, std::abs(m3[k] / nd) / std::pow(var, 1.5));
  }
  out.S = max_skew;
  out.upsilon = max_sd;

  // Largest covariance eigenvalue by power iteration on (1/n) sum c_i c_i'.
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d))), w(d);
  double lambda_max = 0.0;
  for (int it = 0; it < 200; ++it) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = data.row(rows[i]);
      double proj = 0.0;
      for (std::size_t k = 0; k < d; ++k) proj += (resid[i] * x[k] - mean[k]) * v[k];
      for (std::size_t k = 0; k < d; ++k) w[k] += proj * (resid[i] * x[k] - mean[k]);
    }
    for (auto& x : w) x /= nd;
    const double norm = l2_norm(w);
    if (norm == 0.0) break;
    const double change = std::abs(norm - lambda_max);
    lambda_max = norm;
    for (std::size_t k = 0; k < d; ++k) v[k] = w[k] / norm;
    if (change <= 1e-10 * norm) break;
  }
  out.V = std::sqrt(lambda_max);

  const double curvature = model.family == glm::Family::logistic ? 0.25 : 1.0;
  double l2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double lk = 0.0;
    for (auto i : rows) {
      const auto x = data.row(i);
      lk = std::max(lk, std::abs(x[k]) * l2_norm(x));
    }
    lk *= curvature;
    l2 += lk * lk;
  }
  out.L_tilde = std::sqrt(l2);
  return out;
}

Homogeneity estimate_homogeneity(const glm::GlmModel& model,
                                 const glm::Penalty& penalty, const Dataset& data,
                                 Shard master, Shard all_rows,
                                 std::span<const double> theta) {
  const auto d = static_cast<Eigen::Index>(data.cols());
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto h1v = glm::hessian(model, theta, data, master);
  const auto hv = glm::hessian(model, theta, data, all_rows);
  Eigen::Map<const RowMat> h1(h1v.data(), d, d);
  Eigen::Map<const RowMat> h(hv.data(), d, d);
  Eigen::MatrixXd full = h;
  if (penalty.kind == glm::Penalty::Kind::l2sq) full.diagonal().array() += penalty.gamma;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_full(full, Eigen::EigenvaluesOnly);
  const Eigen::MatrixXd diff = h1 - h;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_diff(diff, Eigen::EigenvaluesOnly);
  Homogeneity out;
  out.rho = std::max(0.0, es_full.eigenvalues().minCoeff());
  out.delta = es_diff.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

}  // namespace bcsl::theory
