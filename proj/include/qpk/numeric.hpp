#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qpk/models.hpp"

namespace qpk::numeric {

using ScalarFn = std::function<double(double)>;

/// Root of a monotone function on [lo, hi] by bisection. The caller
/// guarantees a sign change; stops when |f| < tol.residual * scale, the
/// bracket is narrower than tol.argument, or after tol.max_iter halvings.
/// Returns the midpoint of the final bracket.
double bisect(const ScalarFn& f, double lo, double hi, const Tolerances& tol,
              double scale = 1.0);

/// Maximizer of f on [lo, hi] by golden-section search, to argument
/// tolerance `xtol`. Assumes f is unimodal on the interval.
double golden_max(const ScalarFn& f, double lo, double hi, double xtol = 1e-9);

/// Uniform grid of n points covering [lo, hi] inclusive (n >= 2).
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// f evaluated at every point of xs. Work is split across worker threads
/// when thread_budget() > 1; the result is identical for any thread count.
std::vector<double> evaluate(const ScalarFn& f, const std::vector<double>& xs);

/// Index of the largest value, lowest index on ties. NaN never wins.
std::size_t argmax(const std::vector<double>& ys);

/// Worker threads allowed for grid evaluation: QPK_THREADS if set and
/// positive, else 1.
unsigned thread_budget();

/// Result of a global scan-and-refine maximization.
struct ScanMax {
  double x = 0.0;
  double value = 0.0;
  /// Refined location of every interior local maximum seen on the grid,
  /// in increasing order.
  std::vector<double> local_maxima;
};

/// Global maximization without a unimodality assumption: dense grid scan
/// of n points on [lo, hi], every grid-level local maximum refined by
/// golden section on its two neighbouring cells, best refined value wins
/// (smallest x on exact ties).
ScanMax scan_max(const ScalarFn& f, double lo, double hi, std::size_t n,
                 double xtol = 1e-9);

}  // namespace qpk::numeric
