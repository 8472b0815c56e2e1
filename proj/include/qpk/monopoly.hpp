#pragma once

#include <cstddef>
#include <vector>

#include "qpk/wardrop.hpp"

namespace qpk {

struct CurvePoint {
  double gamma1 = 0.0;
  double revenue = 0.0;
};

struct MonopolyResult {
  double gamma1_star = 0.0;
  double c1_star = 0.0;
  double rt_star = 0.0;
  std::vector<CurvePoint> curve;  // empty unless requested
};

inline constexpr std::size_t kDefaultGrid = 4096;

/// Revenue-optimal price at server 1 with server 2's price held at c2.
///
/// Works in rate space: maximizes g1(gamma1) * gamma1 on
/// [lambda * kProbFloor, gamma+] by a dense grid scan plus golden-section
/// refinement of every grid-level peak. No unimodality is assumed.
/// The total revenue is c2 * lambda plus the maximized term, so the optimal
/// rate does not depend on c2.
MonopolyResult optimize_monopoly(const Market& market, double c2,
                                 std::size_t grid_size = kDefaultGrid,
                                 std::size_t curve_points = 0);
MonopolyResult optimize_monopoly(const SystemConfig& cfg, double c2,
                                 std::size_t grid_size = kDefaultGrid);

/// n uniformly spaced samples of RT(gamma1) = c2 * lambda + g1(gamma1) * gamma1
/// on [lambda * kProbFloor, gamma+].
std::vector<CurvePoint> revenue_curve(const Market& market, double c2, std::size_t n);
std::vector<CurvePoint> revenue_curve(const SystemConfig& cfg, double c2, std::size_t n);

}  // namespace qpk
