#include "xbx/optim.hpp"

#include <cmath>

#include "xbx/errors.hpp"

namespace xbx {

namespace {

bool gradient_small(const Eigen::VectorXd& g, double value, const OptimOptions& o) {
  return g.lpNorm<Eigen::Infinity>() <= o.grad_tol * (1.0 + std::abs(value));
}

}  // namespace

OptimResult maximize_bfgs(const ObjectiveWithGradient& f, const Eigen::VectorXd& x0,
                          const OptimOptions& options) {
  const Eigen::Index n = x0.size();
  OptimResult res;
  res.x = x0;
  // Work with the negated objective so that the update below is the textbook
  // minimization form.
  Eigen::VectorXd g;
  res.value = f(res.x, g);
  ++res.evaluations;
  if (!std::isfinite(res.value)) throw EvaluationError("objective is not finite at the start");
  g = -g;
  double fx = -res.value;

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;
  int stalls = 0;
  Eigen::VectorXd x_new(n), g_new(n);

  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    if (gradient_small(g, fx, options)) {
      res.converged = true;
      res.message = "gradient tolerance reached";
      break;
    }
    Eigen::VectorXd d = -H * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      H.setIdentity();
      fresh = true;
      d = -g;
      slope = g.dot(d);
    }
    double alpha = 1.0;
    if (fresh) alpha = std::min(1.0, 1.0 / std::max(1e-300, d.lpNorm<Eigen::Infinity>()));

    bool accepted = false;
    double f_new = 0.0;
    for (int bt = 0; bt < 80; ++bt) {
      x_new = res.x + alpha * d;
      try {
        const double v = f(x_new, g_new);
        ++res.evaluations;
        f_new = -v;
        if (std::isfinite(f_new) && f_new <= fx + 1e-4 * alpha * slope) {
          accepted = true;
          break;
        }
      } catch (const EvaluationError&) {
        ++res.evaluations;
      }
      alpha *= 0.5;
      if ((alpha * d).lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + res.x.lpNorm<Eigen::Infinity>())) break;
    }

    if (!accepted) {
      if (!fresh) {
        H.setIdentity();
        fresh = true;
        continue;
      }
      res.message = "line search failed";
      break;
    }
    g_new = -g_new;
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd yv = g_new - g;
    res.x = x_new;
    g = g_new;
    fx = f_new;

    if (s.lpNorm<Eigen::Infinity>() <= options.step_tol) {
      if (gradient_small(g, fx, options)) continue;
      if (++stalls >= 3) {
        res.message = "step size below tolerance";
        break;
      }
      H.setIdentity();
      fresh = true;
      continue;
    }
    stalls = 0;

    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (fresh) {
        H *= sy / yv.squaredNorm();
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd Hy = H * yv;
      const double yHy = yv.dot(Hy);
      H += (rho * rho * yHy + rho) * (s * s.transpose()) - rho * (Hy * s.transpose() + s * Hy.transpose());
    }
  }
  if (!res.converged && res.message.empty()) res.message = "iteration limit reached";
  if (!res.converged && gradient_small(g, fx, options)) {
    res.converged = true;
    res.message = "gradient tolerance reached";
  }
  res.value = -fx;
  res.gradient = -g;
  return res;
}

}  // namespace xbx
