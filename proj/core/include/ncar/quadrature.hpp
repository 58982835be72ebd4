#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace ncar::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 400;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208067670477, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

template <class F>
Panel gauss_kronrod_21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  std::array<double, 21> values{};
  values[20] = fc;
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    values[2 * j] = f1;
    values[2 * j + 1] = f2;
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    asc += kKronrodWeights[j] * (std::abs(values[2 * j] - mean) + std::abs(values[2 * j + 1] - mean));
  }
  const double result = kronrod * half;
  abs_sum *= std::abs(half);
  asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * abs_sum, err);
  }
  return {a, b, result, err};
}

}  // namespace detail

/**
 * Globally adaptive Gauss-Kronrod (10/21) quadrature of `f` over the panels delimited by
 * the sorted `breakpoints` (at least two).
 *
 * The panel with the largest error estimate is bisected until the summed error satisfies
 * error <= max(abs_tol, rel_tol * |value|) or `max_intervals` panels exist.
 */
template <class F>
Result integrate(F&& f, std::span<const double> breakpoints, const Options& opts = {}) {
  Result out;
  std::vector<detail::Panel> panels;
  panels.reserve(opts.max_intervals + breakpoints.size());
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] > breakpoints[i]) {
      panels.push_back(detail::gauss_kronrod_21(f, breakpoints[i], breakpoints[i + 1]));
      out.evaluations += 21;
    }
  }
  if (panels.empty()) {
    out.converged = true;
    return out;
  }
  const auto worst = [](const detail::Panel& x, const detail::Panel& y) { return x.error < y.error; };
  for (;;) {
    double value = 0.0;
    double error = 0.0;
    for (const auto& p : panels) {
      value += p.value;
      error += p.error;
    }
    out.value = value;
    out.error = error;
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
      out.converged = true;
      return out;
    }
    if (panels.size() >= opts.max_intervals) return out;
    auto it = std::max_element(panels.begin(), panels.end(), worst);
    const detail::Panel p = *it;
    const double mid = 0.5 * (p.a + p.b);
    if (mid <= p.a || mid >= p.b) return out;  // interval no longer divisible
    *it = detail::gauss_kronrod_21(f, p.a, mid);
    panels.push_back(detail::gauss_kronrod_21(f, mid, p.b));
    out.evaluations += 42;
  }
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {}) {
  const std::array<double, 2> ends{a, b};
  return integrate(f, std::span<const double>(ends), opts);
}

}  // namespace ncar::quad
