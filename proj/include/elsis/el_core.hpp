#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "elsis/errors.hpp"

// Empirical likelihood for the mean of estimating-function values, solved
// through the Lagrange dual.  For values g_1..g_n the log EL ratio at mean
// zero is 2 * sum_i log(1 + lambda' g_i) with lambda the root of
// sum_i g_i / (1 + lambda' g_i) = 0.  If zero lies outside the open convex
// hull of the g_i no such lambda exists and the ratio is +infinity.

namespace elsis {

enum class ElStatus { Converged, Boundary, MaxIterations };

struct ElConfig {
  // Tolerance on the residual of the scale-normalized dual equation
  // (values are divided by their largest magnitude before solving).
  double dual_tolerance = 1e-10;
  int max_iterations = 100;
  // Lower bound enforced on 1 + lambda' g_i; also drives the divergence
  // test of the multivariate solver (|lambda| > 1/boundary_margin in
  // normalized units declares the boundary case).
  double boundary_margin = 1e-12;
};

template <typename Scalar>
struct ElSolutionT {
  Eigen::Vector<Scalar, Eigen::Dynamic> lambda;  // NaN when status == Boundary
  Scalar log_ratio = 0;                          // >= 0, +inf iff Boundary
  ElStatus status = ElStatus::Converged;
  int iterations = 0;
  Scalar dual_residual = 0;
};
using ElSolution = ElSolutionT<double>;

namespace detail {

template <typename Scalar>
ElSolutionT<Scalar> boundary_solution(Eigen::Index r) {
  ElSolutionT<Scalar> out;
  out.lambda = Eigen::Vector<Scalar, Eigen::Dynamic>::Constant(
      r, std::numeric_limits<Scalar>::quiet_NaN());
  out.log_ratio = std::numeric_limits<Scalar>::infinity();
  out.status = ElStatus::Boundary;
  out.dual_residual = std::numeric_limits<Scalar>::infinity();
  return out;
}

// Damped Newton ascent of the concave dual f(lambda) = sum log(1+lambda'g_i),
// restricted to 1 + lambda'g_i >= margin.  Rows are assumed pre-scaled so the
// largest row norm is 1; no degeneracy check is performed here.
template <typename Scalar>
ElSolutionT<Scalar> dual_newton_scaled(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& G,
    const ElConfig& config,
    Eigen::Vector<Scalar, Eigen::Dynamic> lambda0) {
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = G.rows(), r = G.cols();
  const Scalar margin = static_cast<Scalar>(config.boundary_margin);
  const Scalar lambda_limit = Scalar(1) / margin;

  Vec lambda = std::move(lambda0);
  Vec w = Vec::Ones(n) + G * lambda;
  Scalar f;
  if (lambda.size() != r || !(w.minCoeff() > margin)) {
    lambda = Vec::Zero(r);
    w = Vec::Ones(n);
    f = 0;
  } else {
    f = (G * lambda).array().log1p().sum();
  }

  ElSolutionT<Scalar> out;
  Vec grad(r), direction(r), trial_w(n);
  Mat weighted(n, r), hessian(r, r);
  Scalar resid = std::numeric_limits<Scalar>::infinity();
  bool converged = false;
  int it = 0;
  for (; it < config.max_iterations; ++it) {
    grad.noalias() = G.transpose() * w.cwiseInverse();
    resid = grad.template lpNorm<Eigen::Infinity>();
    if (resid <= config.dual_tolerance) {
      converged = true;
      break;
    }
    weighted = G.array().colwise() / w.array();
    hessian.noalias() = weighted.transpose() * weighted;
    Eigen::LLT<Mat> llt(hessian);
    if (llt.info() == Eigen::Success) {
      direction = llt.solve(grad);
    } else {
      hessian.diagonal().array() +=
          hessian.trace() * Scalar(1e-12) / Scalar(r) + Scalar(1e-300);
      direction = hessian.ldlt().solve(grad);
    }
    const Scalar slope = grad.dot(direction);
    Scalar step = 1;
    bool accepted = false;
    for (int halving = 0; halving < 50; ++halving) {
      trial_w = Vec::Ones(n) + G * (lambda + step * direction);
      if (trial_w.minCoeff() >= margin) {
        const Scalar trial_f = (trial_w.array().log()).sum();
        if (trial_f >= f + Scalar(1e-4) * step * slope) {
          lambda += step * direction;
          w = trial_w;
          f = trial_f;
          accepted = true;
          break;
        }
      }
      step /= 2;
    }
    if (!accepted) break;  // stalled at numerical precision
    if (lambda.norm() > lambda_limit) return boundary_solution<Scalar>(r);
  }
  if (!converged && it >= config.max_iterations && f > Scalar(5e6)) {
    // Dual still climbing after the iteration budget: treat as divergence.
    return boundary_solution<Scalar>(r);
  }
  out.lambda = lambda;
  out.log_ratio = std::max(Scalar(0), 2 * f);
  out.status = converged ? ElStatus::Converged : ElStatus::MaxIterations;
  out.iterations = it;
  out.dual_residual = resid;
  return out;
}

}  // namespace detail

// Univariate dual root: safeguarded Newton (bisection fallback) on the
// strictly decreasing R(lambda) = sum g_i/(1+lambda g_i) over the open
// feasibility interval.
template <typename Derived>
ElSolutionT<typename Derived::Scalar> solve_lambda_uni(
    const Eigen::MatrixBase<Derived>& g_expr, const ElConfig& config = {}) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  const Vec g = g_expr;
  const Eigen::Index n = g.size();
  if (n < 2) throw DegenerateInput("need at least two estimating-function values");
  const Scalar gmin = g.minCoeff(), gmax = g.maxCoeff();
  if (gmin == gmax) throw DegenerateInput("estimating-function values all identical");
  if (!(gmin < Scalar(0) && Scalar(0) < gmax)) {
    return detail::boundary_solution<Scalar>(1);
  }

  const Scalar scale = std::max(-gmin, gmax);
  const Vec gh = g / scale;
  const Scalar hmax = gmax / scale, hmin = gmin / scale;
  Scalar lo = -(Scalar(1) - static_cast<Scalar>(config.boundary_margin)) / hmax;
  Scalar hi = (Scalar(1) - static_cast<Scalar>(config.boundary_margin)) / (-hmin);

  Scalar lambda = 0;
  Scalar resid = std::numeric_limits<Scalar>::infinity();
  bool converged = false;
  int it = 0;
  for (; it < config.max_iterations; ++it) {
    const auto w = Scalar(1) + lambda * gh.array();
    const Scalar residual = (gh.array() / w).sum();
    resid = std::abs(residual);
    if (resid <= config.dual_tolerance) {
      converged = true;
      break;
    }
    if (residual > 0) lo = lambda; else hi = lambda;
    const Scalar slope = -(gh.array().square() / w.square()).sum();
    Scalar next = lambda - residual / slope;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    lambda = next;
  }

  ElSolutionT<Scalar> out;
  out.lambda = Vec::Constant(1, lambda / scale);
  out.log_ratio =
      std::max(Scalar(0), 2 * (lambda * gh.array()).log1p().sum());
  out.status = converged ? ElStatus::Converged : ElStatus::MaxIterations;
  out.iterations = it;
  out.dual_residual = resid;
  return out;
}

// EL ratio for the mean of a univariate sample: zero exactly at the sample
// mean, increasing toward the hull boundary, +inf outside.
template <typename Derived>
ElSolutionT<typename Derived::Scalar> el_ratio_at_mean(
    const Eigen::MatrixBase<Derived>& values,
    typename Derived::Scalar mu, const ElConfig& config = {}) {
  return solve_lambda_uni((values.derived().array() - mu).matrix(), config);
}

// Multivariate EL ratio at mean zero for the rows of G (n x r, n > r >= 1).
// Boundary cases are detected by dual divergence rather than an exact hull
// test; collinear columns raise DegenerateInput.
template <typename Derived>
ElSolutionT<typename Derived::Scalar> solve_lambda_multi(
    const Eigen::MatrixBase<Derived>& G_expr, const ElConfig& config = {}) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  Mat G = G_expr;
  const Eigen::Index n = G.rows(), r = G.cols();
  if (r < 1 || n <= r) throw DegenerateInput("need n > r >= 1");

  Mat second_moment = (G.transpose() * G) / Scalar(n);
  Eigen::SelfAdjointEigenSolver<Mat> eig(second_moment);
  const Scalar emax = eig.eigenvalues().maxCoeff();
  const Scalar emin = eig.eigenvalues().minCoeff();
  if (!(emin > 0) || emax / emin > Scalar(1e12)) {
    throw DegenerateInput("estimating-function components are collinear");
  }

  const Scalar scale = G.rowwise().norm().maxCoeff();
  G /= scale;
  auto out = detail::dual_newton_scaled<Scalar>(G, config, Vec::Zero(r));
  if (out.status != ElStatus::Boundary) out.lambda /= scale;
  return out;
}

// Optimal primal weights w_i = 1/(n (1 + lambda' g_i)).  Not renormalized:
// they sum to one only at the dual solution.
template <typename DerivedG, typename DerivedL>
Eigen::Vector<typename DerivedG::Scalar, Eigen::Dynamic> el_weights(
    const Eigen::MatrixBase<DerivedG>& g, const Eigen::MatrixBase<DerivedL>& lambda) {
  using Scalar = typename DerivedG::Scalar;
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  if (g.cols() != lambda.size()) throw DimensionMismatch("el_weights: g and lambda disagree");
  const Eigen::Index n = g.rows();
  Vec denom = Vec::Ones(n) + g * lambda;
  if (!(denom.minCoeff() > 0)) {
    throw DomainViolation("1 + lambda' g_i must be positive for all i");
  }
  return denom.cwiseInverse() / Scalar(n);
}

template <typename Derived>
Eigen::Vector<typename Derived::Scalar, Eigen::Dynamic> el_weights(
    const Eigen::MatrixBase<Derived>& g, typename Derived::Scalar lambda) {
  Eigen::Vector<typename Derived::Scalar, 1> l;
  l << lambda;
  return el_weights(Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>(g), l);
}

// Profile EL ratio: minimum of the multivariate ratio over hypothesized
// means whose fixed_component equals fixed_value, the other components
// (nuisance) free.  Newton on the nuisance vector using the implicit
// derivative of the inner dual solution; initialized at the nuisance sample
// means (always interior), with a fallback start built from the univariate
// weights of the fixed column.  Returns +inf when no mean with the fixed
// component lies in the hull.
template <typename Derived>
typename Derived::Scalar profile_el_ratio(
    const Eigen::MatrixBase<Derived>& G_expr, Eigen::Index fixed_component,
    typename Derived::Scalar fixed_value, const ElConfig& config = {}) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  const Mat G = G_expr;
  const Eigen::Index n = G.rows(), r = G.cols();
  if (r < 2 || n <= r) throw DegenerateInput("profile needs n > r >= 2");
  if (fixed_component < 0 || fixed_component >= r) {
    throw DimensionMismatch("fixed_component out of range");
  }
  const Scalar inf = std::numeric_limits<Scalar>::infinity();

  // Feasibility of the fixed coordinate alone is necessary and, for a
  // full-rank G, sufficient for a nonempty interior slice.
  const auto uni =
      solve_lambda_uni((G.col(fixed_component).array() - fixed_value).matrix(), config);
  if (uni.status == ElStatus::Boundary) return inf;

  std::vector<Eigen::Index> nuisance;
  nuisance.reserve(r - 1);
  for (Eigen::Index k = 0; k < r; ++k) {
    if (k != fixed_component) nuisance.push_back(k);
  }

  const Scalar scale = G.rowwise().norm().maxCoeff() + std::abs(fixed_value);
  Vec mu = Vec::Zero(r);
  mu(fixed_component) = fixed_value;
  for (auto k : nuisance) mu(k) = G.col(k).mean();

  Mat centered(n, r);
  Vec lambda_warm;
  const auto evaluate = [&](const Vec& mean) {
    centered = G.rowwise() - mean.transpose();
    const Scalar s = centered.rowwise().norm().maxCoeff();
    Mat scaled = centered / s;
    Vec warm = lambda_warm.size() == r ? Vec(lambda_warm * s) : Vec::Zero(r);
    auto sol = detail::dual_newton_scaled<Scalar>(scaled, config, std::move(warm));
    if (sol.status != ElStatus::Boundary) sol.lambda /= s;
    return sol;
  };

  auto current = evaluate(mu);
  if (current.status == ElStatus::Boundary) {
    // Interior start from the univariate weights of the fixed column.
    const Vec w = el_weights(
        (G.col(fixed_component).array() - fixed_value).matrix(), uni.lambda(0));
    for (auto k : nuisance) mu(k) = w.dot(G.col(k));
    current = evaluate(mu);
    if (current.status == ElStatus::Boundary) return inf;
  }
  lambda_warm = current.lambda;

  const Eigen::Index q = r - 1;
  Vec grad_nu(q), step_nu(q);
  Mat hess_full(r, r), hess_nu(q, q);
  Scalar value = current.log_ratio;
  const Scalar lambda_tol = std::max(Scalar(10) * config.dual_tolerance, Scalar(1e-11));

  for (int outer = 0; outer < 4 * config.max_iterations; ++outer) {
    centered = G.rowwise() - mu.transpose();
    const Vec& lambda = current.lambda;
    const Vec w = Vec::Ones(n) + centered * lambda;
    const Vec inv_w = w.cwiseInverse();
    const Scalar sum_inv = inv_w.sum();

    // grad_mu of the ratio is -2 * sum(1/w) * lambda; the profile optimum
    // has zero nuisance multipliers.
    Scalar lamnu_max = 0;
    for (Eigen::Index i = 0; i < q; ++i) {
      lamnu_max = std::max(lamnu_max, std::abs(lambda(nuisance[i])) * scale);
    }
    if (lamnu_max <= lambda_tol) break;

    const Vec inv_w2 = inv_w.array().square();
    const Scalar sum_inv2 = inv_w2.sum();
    const Vec a = centered.transpose() * inv_w2;                  // sum u_i / w_i^2
    Mat weighted = centered.array().colwise() * inv_w.array();
    Mat J = weighted.transpose() * weighted;                      // sum u u' / w^2
    // d lambda / d mu = -J^{-1} (sum_inv * I - a lambda')
    Mat rhs = -Mat::Identity(r, r) * sum_inv;
    rhs.noalias() += a * lambda.transpose();
    J.diagonal().array() += J.trace() * Scalar(1e-13) / Scalar(r) + Scalar(1e-300);
    const Mat dlambda = J.ldlt().solve(rhs);
    const Vec ds = -dlambda.transpose() * a + sum_inv2 * lambda;  // dS/dmu
    hess_full.noalias() = Scalar(-2) * lambda * ds.transpose();
    hess_full.noalias() -= Scalar(2) * sum_inv * dlambda;
    hess_full = ((hess_full + hess_full.transpose()) / 2).eval();

    for (Eigen::Index i = 0; i < q; ++i) {
      grad_nu(i) = Scalar(-2) * sum_inv * lambda(nuisance[i]);
      for (Eigen::Index j = 0; j < q; ++j) {
        hess_nu(i, j) = hess_full(nuisance[i], nuisance[j]);
      }
    }
    hess_nu.diagonal().array() +=
        std::abs(hess_nu.trace()) * Scalar(1e-12) / Scalar(q) + Scalar(1e-300);
    step_nu = -hess_nu.ldlt().solve(grad_nu);
    if (!(step_nu.dot(grad_nu) < 0)) {
      step_nu = -grad_nu * (scale * scale / (Scalar(2) * sum_inv));
    }

    Scalar t = 1;
    bool accepted = false;
    for (int halving = 0; halving < 50; ++halving) {
      Vec trial_mu = mu;
      for (Eigen::Index i = 0; i < q; ++i) trial_mu(nuisance[i]) += t * step_nu(i);
      auto trial = evaluate(trial_mu);
      if (trial.status != ElStatus::Boundary && trial.log_ratio < value) {
        mu = trial_mu;
        current = trial;
        lambda_warm = current.lambda;
        value = current.log_ratio;
        accepted = true;
        break;
      }
      t /= 2;
    }
    if (!accepted) break;  // minimum attained to numerical precision
  }
  return value;
}

}  // namespace elsis
