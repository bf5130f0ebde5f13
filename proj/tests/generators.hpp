#pragma once

// Hand-rolled random value generators for the property tests. Every test
// seeds its own engine so failures replay exactly.

#include <random>
#include <vector>

#include "treewalk/group.hpp"
#include "treewalk/tree.hpp"

namespace gen {

using treewalk::AffineElem;
using treewalk::Digits;
using treewalk::End;
using treewalk::Index;
using treewalk::ProductElem;
using treewalk::Vertex;

using Engine = std::mt19937_64;

inline Index integer(Engine &e, Index lo, Index hi)
{
  return std::uniform_int_distribution<Index>(lo, hi)(e);
}

inline bool coin(Engine &e) { return integer(e, 0, 1) == 1; }

/// Random digits with support inside [lo, hi].
inline Digits digits(Engine &e, std::uint32_t q, Index lo = -4, Index hi = 4, Index max_terms = 4)
{
  Digits d(q);
  const Index terms = integer(e, 0, max_terms);
  for (Index t = 0; t < terms; ++t)
    d.add_at(integer(e, lo, hi), static_cast<treewalk::Digit>(integer(e, 1, q - 1)));
  return d;
}

inline Vertex vertex(Engine &e, std::uint32_t q, Index spread = 4)
{
  const Index k = integer(e, -spread, spread);
  return Vertex(k, treewalk::truncate_below(digits(e, q, k - spread - 2, k - 1), k));
}

inline End end(Engine &e, std::uint32_t q)
{
  if (integer(e, 0, 5) == 0)
    return End::omega(q);
  const Index p = integer(e, -3, 3);
  std::vector<treewalk::Digit> period(static_cast<std::size_t>(integer(e, 1, 3)));
  for (auto &d : period)
    d = static_cast<treewalk::Digit>(integer(e, 0, q - 1));
  return End::stream(treewalk::truncate_below(digits(e, q, p - 4, p - 1), p), p, std::move(period));
}

inline treewalk::Point point(Engine &e, std::uint32_t q)
{
  if (coin(e))
    return vertex(e, q);
  return end(e, q);
}

inline AffineElem affine(Engine &e, std::uint32_t q, Index max_shift = 3)
{
  return AffineElem(integer(e, -max_shift, max_shift), digits(e, q));
}

inline ProductElem product(Engine &e, const std::vector<std::uint32_t> &moduli, Index max_shift = 3)
{
  ProductElem g;
  for (auto q : moduli)
    g.factors.push_back(affine(e, q, max_shift));
  return g;
}

inline std::uint32_t modulus(Engine &e)
{
  static constexpr std::uint32_t choices[] = {2, 3, 5};
  return choices[integer(e, 0, 2)];
}

inline std::vector<std::uint32_t> moduli(Engine &e)
{
  std::vector<std::uint32_t> out(static_cast<std::size_t>(integer(e, 1, 3)));
  for (auto &q : out)
    q = modulus(e);
  return out;
}

} // namespace gen
