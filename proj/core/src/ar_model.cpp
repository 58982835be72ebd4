#include "ncar/ar_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ncar/error.hpp"

namespace ncar {
namespace {

using cplx = std::complex<double>;

constexpr int kAberthMaxIter = 2000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void horner(std::span<const double> a, cplx z, cplx& value, cplx& deriv) {
  value = a.back();
  deriv = 0.0;
  for (std::size_t i = a.size() - 1; i-- > 0;) {
    deriv = deriv * z + value;
    value = value * z + a[i];
  }
}

// Expand prod (1 - z / root) into ascending real coefficients.
std::vector<double> expand_roots(std::span<const cplx> roots) {
  std::vector<cplx> poly{1.0};
  for (const cplx& root : roots) {
    const cplx c = -1.0 / root;
    poly.push_back(0.0);
    for (std::size_t i = poly.size() - 1; i > 0; --i) poly[i] += c * poly[i - 1];
  }
  std::vector<double> out(poly.size());
  std::transform(poly.begin(), poly.end(), out.begin(), [](cplx c) { return c.real(); });
  return out;
}

// theta_i = -a_i for i >= 1 of a monic-at-zero polynomial.
std::vector<double> ar_coeffs_from_poly(const std::vector<double>& poly) {
  std::vector<double> out;
  out.reserve(poly.size() - 1);
  for (std::size_t i = 1; i < poly.size(); ++i) out.push_back(-poly[i]);
  return out;
}

// Force exact conjugate symmetry on the roots of a real polynomial.
void symmetrize(std::vector<cplx>& roots) {
  std::vector<cplx> real_roots;
  std::vector<cplx> upper;
  std::vector<cplx> lower;
  for (const cplx& z : roots) {
    if (std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z))) {
      real_roots.emplace_back(z.real(), 0.0);
    } else if (z.imag() > 0) {
      upper.push_back(z);
    } else {
      lower.push_back(z);
    }
  }
  // An unmatched root can only be a real root that came out with a tiny imaginary part.
  auto demote = [&](std::vector<cplx>& from) {
    auto it = std::min_element(from.begin(), from.end(),
                               [](cplx a, cplx b) { return std::abs(a.imag()) < std::abs(b.imag()); });
    real_roots.emplace_back(it->real(), 0.0);
    from.erase(it);
  };
  while (upper.size() > lower.size()) demote(upper);
  while (lower.size() > upper.size()) demote(lower);

  std::vector<cplx> out = real_roots;
  std::vector<bool> used(lower.size(), false);
  for (const cplx& u : upper) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(u - std::conj(lower[j]));
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    used[best] = true;
    const cplx mid = 0.5 * (u + std::conj(lower[best]));
    out.push_back(mid);
    out.push_back(std::conj(mid));
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  roots = std::move(out);
}

}  // namespace

ArModel::ArModel(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw InvalidArgument("AR coefficients must be finite");
  }
}

std::vector<double> ArModel::polynomial() const {
  std::vector<double> out{1.0};
  for (double c : coeffs_) out.push_back(-c);
  return out;
}

cplx ArModel::evaluate(cplx z) const {
  cplx value = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) value = (value + coeffs_[i]) * z;
  return 1.0 - value;
}

std::vector<cplx> polynomial_roots(std::span<const double> ascending) {
  std::size_t d = ascending.size();
  while (d > 0 && ascending[d - 1] == 0.0) --d;
  if (d == 0) throw InvalidArgument("polynomial_roots: zero polynomial");
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(ascending[i])) throw InvalidArgument("polynomial_roots: non-finite coefficient");
  }
  if (ascending[0] == 0.0) throw InvalidArgument("polynomial_roots: zero constant term");
  const std::span<const double> a = ascending.first(d);
  const std::size_t degree = d - 1;
  if (degree == 0) return {};
  if (degree == 1) return {cplx(-a[0] / a[1], 0.0)};

  // Start on a circle whose radius is the geometric mean of the root moduli.
  const double radius = std::pow(std::abs(a[0] / a[degree]), 1.0 / static_cast<double>(degree));
  std::vector<cplx> z(degree);
  for (std::size_t k = 0; k < degree; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(degree) + 0.4;
    z[k] = std::polar(radius, angle);
  }

  std::vector<bool> done(degree, false);
  for (int iter = 0; iter < kAberthMaxIter; ++iter) {
    bool all_done = true;
    for (std::size_t k = 0; k < degree; ++k) {
      if (done[k]) continue;
      cplx value;
      cplx deriv;
      horner(a, z[k], value, deriv);
      if (value == 0.0) {
        done[k] = true;
        continue;
      }
      const cplx ratio = value / deriv;
      cplx sum = 0.0;
      for (std::size_t j = 0; j < degree; ++j) {
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      }
      const cplx step = ratio / (1.0 - ratio * sum);
      z[k] -= step;
      if (std::abs(step) <= 4.0 * kEps * std::abs(z[k])) {
        done[k] = true;
      } else {
        all_done = false;
      }
    }
    if (all_done) break;
  }

  // One Newton step per root cleans up the last bits.
  for (cplx& root : z) {
    cplx value;
    cplx deriv;
    horner(a, root, value, deriv);
    if (deriv != 0.0) {
      const cplx polished = root - value / deriv;
      cplx pv;
      cplx pd;
      horner(a, polished, pv, pd);
      if (std::abs(pv) < std::abs(value)) root = polished;
    }
  }
  symmetrize(z);
  return z;
}

std::vector<cplx> find_roots(const ArModel& model) {
  const std::vector<double> poly = model.polynomial();
  std::vector<cplx> roots = polynomial_roots(poly);
  for (const cplx& z : roots) {
    if (std::abs(std::abs(z) - 1.0) <= kUnitCircleMargin) {
      throw UnitCircleRoot("AR polynomial has a root on the unit circle (|z| = " +
                           std::to_string(std::abs(z)) + ")");
    }
  }
  return roots;
}

double unit_circle_distance(const ArModel& model) {
  double best = std::numeric_limits<double>::infinity();
  for (const cplx& z : polynomial_roots(model.polynomial())) best = std::min(best, std::abs(std::abs(z) - 1.0));
  return best;
}

std::vector<double> Factorization::expand() const {
  std::vector<double> a(causal_coeffs.size() + 1, 0.0);
  std::vector<double> b(noncausal_coeffs.size() + 1, 0.0);
  a[0] = 1.0;
  b[0] = 1.0;
  for (std::size_t i = 0; i < causal_coeffs.size(); ++i) a[i + 1] = -causal_coeffs[i];
  for (std::size_t i = 0; i < noncausal_coeffs.size(); ++i) b[i + 1] = -noncausal_coeffs[i];
  std::vector<double> prod(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] += a[i] * b[j];
  }
  return ar_coeffs_from_poly(prod);
}

Factorization factorize(const ArModel& model) {
  std::vector<cplx> outside;
  std::vector<cplx> inside;
  for (const cplx& z : find_roots(model)) (std::abs(z) > 1.0 ? outside : inside).push_back(z);
  return Factorization{ar_coeffs_from_poly(expand_roots(outside)), ar_coeffs_from_poly(expand_roots(inside))};
}

ArModel causal_representation(const ArModel& model) {
  std::vector<cplx> roots = find_roots(model);
  for (cplx& z : roots) {
    if (std::abs(z) < 1.0) z = 1.0 / z;
  }
  std::vector<double> coeffs = ar_coeffs_from_poly(expand_roots(roots));
  coeffs.resize(model.order(), 0.0);
  return ArModel(std::move(coeffs));
}

double LaurentCoeffs::at(long j) const noexcept {
  if (j >= 0) {
    const auto idx = static_cast<std::size_t>(j);
    return idx < psi_plus.size() ? psi_plus[idx] : 0.0;
  }
  const auto idx = static_cast<std::size_t>(-j) - 1;
  return idx < psi_minus.size() ? psi_minus[idx] : 0.0;
}

LaurentCoeffs laurent_coeffs(const ArModel& model, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("laurent_coeffs: tol must lie in (0, 1)");
  const std::vector<cplx> roots = find_roots(model);
  const Factorization fac = factorize(model);
  const std::size_t r = fac.r();
  const std::size_t s = fac.s();

  double rho = 0.0;
  for (const cplx& z : roots) rho = std::max(rho, std::abs(z) > 1.0 ? 1.0 / std::abs(z) : std::abs(z));

  // Series length from the slowest geometric rate, with slack for repeated roots.
  std::size_t length = 16 + 8 * roots.size();
  if (rho > 0.0) {
    const double needed = std::log(tol * 1e-4) / std::log(rho);
    if (!(needed < static_cast<double>(kLaurentCap))) {
      throw NonConvergent("laurent_coeffs: root too close to the unit circle for the tolerance");
    }
    length += static_cast<std::size_t>(std::ceil(needed));
  }

  for (;;) {
    // Causal factor: power series in z.
    std::vector<double> a(length + 1, 0.0);
    a[0] = 1.0;
    for (std::size_t k = 1; k <= length; ++k) {
      double acc = 0.0;
      for (std::size_t i = 1; i <= std::min(k, r); ++i) acc += fac.causal_coeffs[i - 1] * a[k - i];
      a[k] = acc;
    }

    // Non-causal factor: series in z^{-1}; b[m] multiplies z^{-m}.
    std::vector<double> b;
    if (s == 0) {
      b.assign(1, 1.0);
    } else {
      // u^s theta*(1/u) = sum_j q_j u^j with q_0 = -theta_{r+s}, q_j = -theta_{r+s-j}, q_s = 1.
      std::vector<double> q(s + 1);
      for (std::size_t j = 0; j < s; ++j) q[j] = -fac.noncausal_coeffs[s - 1 - j];
      q[s] = 1.0;
      std::vector<double> c(length + 1, 0.0);
      c[0] = 1.0 / q[0];
      for (std::size_t k = 1; k <= length; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= std::min(k, s); ++j) acc += q[j] * c[k - j];
        c[k] = -acc / q[0];
      }
      b.assign(length + s + 1, 0.0);
      for (std::size_t k = 0; k <= length; ++k) b[k + s] = c[k];
    }

    // psi_j = sum_i a_i b_{i - j} for j in [-(|b| - 1), |a| - 1].
    const long lo = -static_cast<long>(b.size() - 1);
    const long hi = static_cast<long>(a.size() - 1);
    auto psi = [&](long j) {
      double acc = 0.0;
      const long i_lo = std::max(0L, j);
      const long i_hi = std::min(hi, j + static_cast<long>(b.size()) - 1);
      for (long i = i_lo; i <= i_hi; ++i) acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i - j)];
      return acc;
    };
    const long span = std::max(hi, -lo);
    std::vector<double> plus(static_cast<std::size_t>(span) + 1, 0.0);
    std::vector<double> minus(static_cast<std::size_t>(span) + 1, 0.0);
    for (long j = 0; j <= hi; ++j) plus[static_cast<std::size_t>(j)] = psi(j);
    for (long j = 1; j <= -lo; ++j) minus[static_cast<std::size_t>(j)] = psi(-j);

    std::size_t last = 0;
    for (std::size_t j = 0; j <= static_cast<std::size_t>(span); ++j) {
      const double mass = std::abs(plus[j]) + (j > 0 ? std::abs(minus[j]) : 0.0);
      if (mass >= tol) last = j;
    }
    const std::size_t K = last + 1;
    if (4 * K > 3 * length) {
      if (2 * length > kLaurentCap) {
        throw NonConvergent("laurent_coeffs: truncation index exceeds the hard cap");
      }
      length *= 2;
      continue;
    }
    LaurentCoeffs out;
    out.psi_plus.assign(plus.begin(), plus.begin() + static_cast<long>(K) + 1);
    out.psi_minus.assign(minus.begin() + 1, minus.begin() + static_cast<long>(K) + 1);
    return out;
  }
}

SimulatedPath simulate_path(const ArModel& model, const StableParams& noise, std::size_t n, std::size_t burn,
                            Rng& rng) {
  noise.validate();
  const std::size_t p = model.order();
  if (n < p + 1) throw InvalidArgument("simulate: n must be at least p + 1");
  const LaurentCoeffs psi = laurent_coeffs(model);
  const std::size_t K = psi.truncation();
  if (burn < K) {
    throw InvalidArgument("simulate: burn (" + std::to_string(burn) + ") is below the Laurent truncation (" +
                          std::to_string(K) + ")");
  }
  const std::size_t total = n + p + 2 * burn;
  std::vector<double> z(total);
  for (double& v : z) v = stable_draw(noise, rng);

  SimulatedPath path;
  path.values.resize(n + p);
  path.innovations.assign(z.begin() + static_cast<long>(burn), z.begin() + static_cast<long>(burn + n + p));
  for (std::size_t t = 0; t < n + p; ++t) {
    const std::size_t c = t + burn;
    double acc = 0.0;
    for (std::size_t j = 0; j <= K; ++j) acc += psi.psi_plus[j] * z[c - j];
    for (std::size_t j = 1; j <= K; ++j) acc += psi.psi_minus[j - 1] * z[c + j];
    path.values[t] = acc;
  }
  return path;
}

SimulatedPath simulate_path(const ArModel& model, const StableParams& noise, std::size_t n, Rng& rng) {
  return simulate_path(model, noise, n, laurent_coeffs(model).truncation(), rng);
}

std::vector<double> simulate(const ArModel& model, const StableParams& noise, std::size_t n, std::size_t burn,
                             std::uint64_t seed) {
  Rng rng(seed);
  return simulate_path(model, noise, n, burn, rng).values;
}

std::vector<double> simulate(const ArModel& model, const StableParams& noise, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_path(model, noise, n, rng).values;
}

}  // namespace ncar
