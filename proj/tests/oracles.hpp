#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include "treewalk/walk.hpp"

namespace oracle {

/**
 * Law of the limiting digit at index 0 in factor j for a walk whose level
 * chain drifts upward.
 *
 * Only steps taken from level h with a translation digit at index -h touch
 * index 0. The chain (level, digit so far) is solved by value iteration with
 * levels clamped to [-L, L]; beyond +L the digit is frozen (return
 * probability below (q/p)^L) and -L is never reached in practice.
 */
inline std::vector<double> first_digit_law(const treewalk::Measure &mu, std::size_t j, treewalk::Index L = 80)
{
  using treewalk::Index;
  const std::uint32_t q = mu.moduli()[j];
  struct Step {
    double p;
    Index n;
    const treewalk::Digits *b;
  };
  std::vector<Step> steps;
  for (auto const &a : mu.atoms())
    steps.push_back({boost::rational_cast<double>(a.weight), a.element.factors[j].shift(),
                     &a.element.factors[j].translation()});

  const std::size_t width = static_cast<std::size_t>(2 * L + 1);
  // value[h][d][t]: probability that the final digit is t from level h with digit d.
  std::vector<double> value(width * q * q, 0.0), next(value.size());
  auto at = [&](std::vector<double> &v, Index h, std::uint32_t d, std::uint32_t t) -> double & {
    return v[(static_cast<std::size_t>(h + L) * q + d) * q + t];
  };
  for (std::uint32_t d = 0; d < q; ++d)
    at(value, L, d, d) = 1.0;
  for (int iter = 0; iter < 20000; ++iter) {
    double change = 0;
    for (Index h = -L; h <= L; ++h)
      for (std::uint32_t d = 0; d < q; ++d)
        for (std::uint32_t t = 0; t < q; ++t) {
          double v;
          if (h == L) {
            v = d == t ? 1.0 : 0.0;
          } else {
            v = 0;
            for (auto const &s : steps) {
              const std::uint32_t nd = (d + s.b->at(-h)) % q;
              const Index nh = std::clamp<Index>(h + s.n, -L, L);
              v += s.p * at(value, nh, nd, t);
            }
          }
          change = std::max(change, std::abs(v - at(value, h, d, t)));
          at(next, h, d, t) = v;
        }
    value.swap(next);
    if (change < 1e-14)
      break;
  }
  std::vector<double> law(q);
  for (std::uint32_t t = 0; t < q; ++t)
    law[t] = at(value, 0, 0, t);
  return law;
}

} // namespace oracle
