#include "qpk/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace qpk::numeric {

double bisect(const ScalarFn& f, double lo, double hi, const Tolerances& tol,
              double scale) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  const double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw NoRootError("bisect: no sign change on bracket");
  }
  for (int i = 0; i < tol.max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (std::abs(fm) < tol.residual * scale && hi - lo < tol.argument) break;
    if (hi - lo < tol.argument * 1e-3) break;
  }
  return 0.5 * (lo + hi);
}

double golden_max(const ScalarFn& f, double lo, double hi, double xtol) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  // Endpoints are candidates too: the maximum may sit on the interval edge.
  double best = 0.5 * (a + b);
  double fbest = f(best);
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx > fbest) {
      best = x;
      fbest = fx;
    }
  }
  return best;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  if (n == 1) {
    xs[0] = lo;
    return xs;
  }
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + h * static_cast<double>(i);
  xs[n - 1] = hi;
  return xs;
}

unsigned thread_budget() {
  if (const char* env = std::getenv("QPK_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
  }
  return 1;
}

std::vector<double> evaluate(const ScalarFn& f, const std::vector<double>& xs) {
  std::vector<double> ys(xs.size());
  const unsigned threads = std::min<std::size_t>(thread_budget(), xs.size() / 256 + 1);
  if (threads <= 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]);
    return ys;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (xs.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(xs.size(), begin + chunk);
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) ys[i] = f(xs[i]);
    });
  }
  pool.clear();
  return ys;
}

std::size_t argmax(const std::vector<double>& ys) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < ys.size(); ++i) {
    if (ys[i] > ys[best] || (std::isnan(ys[best]) && !std::isnan(ys[i]))) best = i;
  }
  return best;
}

ScanMax scan_max(const ScalarFn& f, double lo, double hi, std::size_t n, double xtol) {
  const auto xs = linspace(lo, hi, n);
  const auto ys = evaluate(f, xs);

  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (ys[i] >= ys[i - 1] && ys[i] > ys[i + 1]) peaks.push_back(i);
  }
  const std::size_t grid_best = argmax(ys);

  ScanMax out;
  out.x = xs[grid_best];
  out.value = ys[grid_best];
  for (std::size_t i : peaks) {
    const double x = golden_max(f, xs[i - 1], xs[i + 1], xtol);
    const double v = f(x);
    out.local_maxima.push_back(x);
    if (v > out.value || (v == out.value && x < out.x)) {
      out.x = x;
      out.value = v;
    }
  }
  return out;
}

}  // namespace qpk::numeric
