#pragma once

// Adaptive 21-point Gauss-Kronrod quadrature (QUADPACK QAG scheme) plus the
// handful of domain transforms the distribution code needs.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "gnblab/errors.hpp"

namespace gnblab::quad {

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 11> kronrod_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kronrod_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525030206, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights at the odd-indexed Kronrod nodes.
inline constexpr std::array<double, 5> gauss_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = f_center * kronrod_weights[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  std::array<double, 10> f_lo{}, f_hi{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kronrod_nodes[j];
    f_lo[j] = f(center - dx);
    f_hi[j] = f(center + dx);
    const double pair = f_lo[j] + f_hi[j];
    kronrod += kronrod_weights[j] * pair;
    abs_sum += kronrod_weights[j] * (std::abs(f_lo[j]) + std::abs(f_hi[j]));
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kronrod_weights[10] * std::abs(f_center - mean);
  for (int j = 0; j < 10; ++j) {
    asc += kronrod_weights[j] *
           (std::abs(f_lo[j] - mean) + std::abs(f_hi[j] - mean));
  }
  const double result = kronrod * half;
  asc *= std::abs(half);
  abs_sum *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  if (abs_sum > tiny / (50.0 * eps)) err = std::max(err, 50.0 * eps * abs_sum);
  return {a, b, result, err};
}

}  // namespace detail

/// Integrates f over the finite interval [a, b].
template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {}) {
  if (a == b) return {};
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gauss_kronrod_21(f, a, b);
  double total = first.value;
  double total_err = first.error;
  int evals = 21;
  heap.push(first);
  int intervals = 1;
  auto done = [&] {
    return total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  };
  while (!done() && intervals < opts.max_intervals) {
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b)))
      break;  // interval exhausted at machine resolution
    heap.pop();
    auto left = detail::gauss_kronrod_21(f, worst.a, mid);
    auto right = detail::gauss_kronrod_21(f, mid, worst.b);
    evals += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  Result r{total, total_err, evals, true};
  r.converged =
      std::isfinite(total) &&
      total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) * 1.0001;
  return r;
}

/// Integrates over consecutive breakpoints [p0,p1], [p1,p2], ... and sums.
/// Each piece gets the full relative tolerance and a share of the absolute one.
template <class F>
Result integrate_pieces(F&& f, std::span<const double> points,
                        const Options& opts = {}) {
  Result total;
  if (points.size() < 2) return total;
  Options piece = opts;
  piece.abs_tol = opts.abs_tol / static_cast<double>(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i] == points[i + 1]) continue;
    auto r = integrate(f, points[i], points[i + 1], piece);
    total.value += r.value;
    total.abs_error += r.abs_error;
    total.evaluations += r.evaluations;
    total.converged = total.converged && r.converged;
  }
  total.converged =
      total.converged ||
      total.abs_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total.value));
  return total;
}

/// Integrates f over [a, inf) through x = a + t / (1 - t).
template <class F>
Result integrate_to_infinity(F&& f, double a, const Options& opts = {}) {
  auto mapped = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double one_minus = 1.0 - t;
    const double x = a + t / one_minus;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  const double pts[] = {0.0, 0.5, 0.9, 0.99, 1.0};
  return integrate_pieces(mapped, pts, opts);
}

/// Throws QuadratureError unless the result converged.
inline double checked(const Result& r, const char* what) {
  if (!r.converged) throw QuadratureError(what, r.value, r.abs_error);
  return r.value;
}

/// Integrates a nonnegative f over the whole real line when its mass sits in
/// a single window. Starting from `center`, the window is widened in steps
/// of `step` until f falls below `cutoff` times the running peak on both
/// sides, then integrated with a breakpoint at the peak.
template <class F>
Result integrate_line(F&& f, double center, double step, const Options& opts = {},
                      double cutoff = 1e-18, int max_steps = 2000) {
  double peak_x = center;
  double peak = f(center);
  int evals = 1;
  auto expand = [&](double dir) {
    double x = center;
    int quiet = 0;
    for (int k = 0; k < max_steps; ++k) {
      x += dir * step;
      const double v = f(x);
      ++evals;
      if (v > peak) {
        peak = v;
        peak_x = x;
      }
      quiet = (v <= cutoff * peak) ? quiet + 1 : 0;
      if (quiet >= 2) return x;
    }
    return x;
  };
  const double hi = expand(+1.0);
  const double lo = expand(-1.0);
  if (!(peak > 0.0)) return {0.0, 0.0, evals, true};
  const double pts[] = {lo, peak_x, hi};
  auto r = integrate_pieces(f, pts, opts);
  r.evaluations += evals;
  return r;
}

/// Root of a nonincreasing function g, located by bracket expansion from x0
/// with initial step `step`, then bisection to machine resolution.
template <class G>
double decreasing_root(G&& g, double x0, double step = 1.0) {
  double lo = x0, hi = x0;
  if (g(x0) > 0.0) {
    for (double d = step; g(hi) > 0.0; d *= 2.0) {
      lo = hi;
      hi = x0 + d;
      if (d > 1e6) throw ConvergenceError("decreasing_root: no sign change");
    }
  } else {
    for (double d = step; !(g(lo) > 0.0); d *= 2.0) {
      hi = lo;
      lo = x0 - d;
      if (d > 1e6) throw ConvergenceError("decreasing_root: no sign change");
    }
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Interval around the maximizer of a concave log-density outside of which
/// log_f lies more than `drop` nats below its peak.
struct Window {
  double lo;
  double mode;
  double hi;
};

template <class F>
Window concave_window(F&& log_f, double mode, double scale, double drop = 45.0) {
  const double peak = log_f(mode);
  auto edge = [&](double dir) {
    double d = scale;
    for (int i = 0; i < 80; ++i, d *= 2.0) {
      const double v = log_f(mode + dir * d);
      if (!(v > peak - drop)) return mode + dir * d;
    }
    throw ConvergenceError("concave_window: log-density does not decay");
  };
  return {edge(-1.0), mode, edge(+1.0)};
}

}  // namespace gnblab::quad
