#pragma once

// Nelder-Mead simplex minimization with dimension-adaptive coefficients
// (reflection 1, expansion 1 + 2/n, contraction 3/4 - 1/(2n), shrink 1 - 1/n),
// which keeps the method usable well past the handful of parameters the
// classic coefficients were tuned for.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qmi {

struct NelderMeadOptions {
  int max_iterations = 2000;
  double function_tolerance = 1e-8;  // stop when max f - min f over the simplex falls below
  double simplex_tolerance = 1e-10;  // ... or when every vertex is this close to the best
  double initial_step = 0.5;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> best_history;  // best value after each iteration
};

template <class Objective>
NelderMeadResult nelder_mead(Objective&& f, const Eigen::VectorXd& start,
                             const NelderMeadOptions& opt = {}) {
  const Eigen::Index n = start.size();
  NelderMeadResult result;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  if (n == 0) {
    result.x = start;
    result.value = eval(start);
    result.converged = true;
    return result;
  }

  const double nd = static_cast<double>(n);
  // Dimension-adaptive coefficients; the classic ones below n = 2 where the
  // adaptive shrink would collapse the simplex.
  const bool adaptive = n >= 2;
  const double alpha = 1.0;
  const double beta = adaptive ? 1.0 + 2.0 / nd : 2.0;
  const double gamma = adaptive ? 0.75 - 1.0 / (2.0 * nd) : 0.5;
  const double delta = adaptive ? 1.0 - 1.0 / nd : 0.5;

  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), start);
  std::vector<double> vals(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)](i) += opt.initial_step;
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(pts.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> p2;
    std::vector<double> v2;
    p2.reserve(pts.size());
    v2.reserve(pts.size());
    for (std::size_t i : order) {
      p2.push_back(std::move(pts[i]));
      v2.push_back(vals[i]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };

  sort_simplex();
  const std::size_t worst = pts.size() - 1;
  while (result.iterations < opt.max_iterations) {
    const double spread = vals[worst] - vals[0];
    double size = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      size = std::max(size, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
    }
    if (spread <= opt.function_tolerance || size <= opt.simplex_tolerance) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += pts[i];
    centroid /= nd;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[0]) {
      const Eigen::VectorXd xe = centroid + beta * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[worst - 1]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + gamma * (xr - centroid))
                                         : Eigen::VectorXd(centroid - gamma * (centroid - pts[worst]));
      const double fc = eval(xc);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 1; i < pts.size(); ++i) {
          pts[i] = pts[0] + delta * (pts[i] - pts[0]);
          vals[i] = eval(pts[i]);
        }
      }
    }
    sort_simplex();
    result.best_history.push_back(vals[0]);
  }

  result.x = pts[0];
  result.value = vals[0];
  return result;
}

}  // namespace qmi
