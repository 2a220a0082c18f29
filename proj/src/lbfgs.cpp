#include "acmri/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

namespace acmri {

std::string to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::gradient_converged:
      return "gradient_converged";
    case LbfgsStatus::objective_converged:
      return "objective_converged";
    case LbfgsStatus::max_iterations:
      return "max_iterations";
    case LbfgsStatus::line_search_failed:
      return "line_search_failed";
    case LbfgsStatus::non_finite:
      return "non_finite";
  }
  return "unknown";
}

namespace {

struct Probe {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
  RVector grad;
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), clamped to
// the inner 80% of the bracket; falls back to bisection.
double interpolate(const Probe& a, const Probe& b) {
  const double lo = std::min(a.step, b.step);
  const double hi = std::max(a.step, b.step);
  const double width = hi - lo;
  double t = 0.5 * (a.step + b.step);
  const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
  const double disc = d1 * d1 - a.slope * b.slope;
  if (disc >= 0.0 && std::isfinite(disc) && std::isfinite(b.value)) {
    const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
    const double denom = b.slope - a.slope + 2.0 * d2;
    if (denom != 0.0) {
      const double cand = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
      if (std::isfinite(cand)) t = cand;
    }
  }
  return std::clamp(t, lo + 0.1 * width, hi - 0.1 * width);
}

class LineSearch {
 public:
  LineSearch(const ObjectiveFn& f, const RVector& x, const RVector& dir, double f0, double slope0,
             const LbfgsOptions& opt, int& evaluations)
      : f_(f), x_(x), dir_(dir), opt_(opt), evaluations_(evaluations) {
    origin_.step = 0.0;
    origin_.value = f0;
    origin_.slope = slope0;
  }

  // Returns a point satisfying the strong Wolfe conditions, or the best
  // sufficient-decrease point found; nullopt when no decrease was achieved.
  std::optional<Probe> run(double step0) {
    Probe prev = origin_;
    double step = step0;
    for (int i = 0; i < opt_.max_line_search; ++i) {
      Probe cur = evaluate(step);
      if (!std::isfinite(cur.value) || cur.value > armijo(cur.step) ||
          (i > 0 && cur.value >= prev.value)) {
        return zoom(prev, cur, opt_.max_line_search - i - 1);
      }
      if (std::abs(cur.slope) <= -opt_.c2 * origin_.slope) return cur;
      if (cur.slope >= 0.0) return zoom(cur, prev, opt_.max_line_search - i - 1);
      remember(cur);
      prev = std::move(cur);
      step *= 2.0;
    }
    return best_;
  }

  bool saw_non_finite() const { return non_finite_; }

 private:
  double armijo(double step) const { return origin_.value + opt_.c1 * step * origin_.slope; }

  Probe evaluate(double step) {
    Probe p;
    p.step = step;
    p.grad.resize(x_.size());
    const RVector trial = x_ + step * dir_;
    p.value = f_(trial, p.grad);
    ++evaluations_;
    if (!std::isfinite(p.value) || !p.grad.allFinite()) {
      non_finite_ = true;
      p.value = std::numeric_limits<double>::infinity();
      p.slope = 0.0;
    } else {
      p.slope = p.grad.dot(dir_);
    }
    return p;
  }

  void remember(const Probe& p) {
    if (p.step > 0.0 && std::isfinite(p.value) && p.value <= armijo(p.step) &&
        (!best_ || p.value < best_->value)) {
      best_ = p;
    }
  }

  std::optional<Probe> zoom(Probe lo, Probe hi, int budget) {
    remember(lo);
    for (int i = 0; i < budget; ++i) {
      const double step = std::isfinite(hi.value) ? interpolate(lo, hi) : 0.5 * (lo.step + hi.step);
      if (std::abs(hi.step - lo.step) < 1e-16 * std::max(1.0, std::abs(lo.step))) break;
      Probe cur = evaluate(step);
      if (!std::isfinite(cur.value) || cur.value > armijo(cur.step) || cur.value >= lo.value) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -opt_.c2 * origin_.slope) return cur;
      if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
      remember(cur);
      lo = std::move(cur);
    }
    return best_;
  }

  const ObjectiveFn& f_;
  const RVector& x_;
  const RVector& dir_;
  const LbfgsOptions& opt_;
  int& evaluations_;
  Probe origin_;
  std::optional<Probe> best_;
  bool non_finite_ = false;
};

}  // namespace

LbfgsResult minimize_lbfgs(const ObjectiveFn& f, RVector x0, const LbfgsOptions& options) {
  LbfgsResult result;
  result.x = std::move(x0);
  RVector grad(result.x.size());
  result.value = f(result.x, grad);
  result.evaluations = 1;
  if (!std::isfinite(result.value) || !grad.allFinite()) {
    result.status = LbfgsStatus::non_finite;
    return result;
  }
  result.history.push_back(result.value);

  std::deque<RVector> s_hist;
  std::deque<RVector> y_hist;
  std::deque<double> rho_hist;
  const auto memory = static_cast<std::size_t>(std::max(options.memory, 1));

  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
      result.status = LbfgsStatus::gradient_converged;
      return result;
    }

    // Two-loop recursion.
    RVector dir = -grad;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(dir);
      dir -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) {
      dir *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(dir);
      dir += (alpha[k] - beta) * s_hist[k];
    }
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      // Lost descent; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -grad;
      slope = -grad.squaredNorm();
    }
    const double step0 = s_hist.empty() ? std::min(1.0, 1.0 / grad.lpNorm<Eigen::Infinity>()) : 1.0;

    LineSearch search(f, result.x, dir, result.value, slope, options, result.evaluations);
    auto accepted = search.run(step0);
    if (!accepted) {
      result.status = search.saw_non_finite() ? LbfgsStatus::non_finite : LbfgsStatus::line_search_failed;
      return result;
    }

    RVector s = accepted->step * dir;
    RVector y = accepted->grad - grad;
    const double previous = result.value;
    result.x += s;
    result.value = accepted->value;
    grad = std::move(accepted->grad);
    result.iterations = iter + 1;
    result.history.push_back(result.value);

    const double sy = s.dot(y);
    if (sy > 1e-12 * y.squaredNorm() && sy > 0.0) {
      if (s_hist.size() == memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }

    const double scale = std::max({std::abs(previous), std::abs(result.value),
                                   std::numeric_limits<double>::min()});
    if (grad.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
      result.status = LbfgsStatus::gradient_converged;
      return result;
    }
    if ((previous - result.value) / scale <= options.rel_tol) {
      result.status = LbfgsStatus::objective_converged;
      return result;
    }
  }
  result.status = LbfgsStatus::max_iterations;
  return result;
}

}  // namespace acmri
