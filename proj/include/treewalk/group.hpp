#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treewalk/digits.hpp"
#include "treewalk/tree.hpp"

namespace treewalk {

/**
 * The affine map x -> t^n x + b on digit sequences, acting on the ball tree.
 *
 * Elements form A(q) = Z x| Digits with the law
 * (n, b)(m, c) = (n + m, b + t^n c).
 */
class AffineElem {
public:
  AffineElem(Index n, Digits b) : n_(n), b_(std::move(b)) {}
  static AffineElem identity(std::uint32_t q) { return AffineElem(0, Digits(q)); }

  std::uint32_t modulus() const noexcept { return b_.modulus(); }
  Index shift() const noexcept { return n_; }
  const Digits &translation() const noexcept { return b_; }

  /// this = this * h, without copying the translation part.
  void compose_in_place(const AffineElem &h);

  friend bool operator==(const AffineElem &, const AffineElem &) = default;

private:
  Index n_;
  Digits b_;
};

struct ProductElem {
  std::vector<AffineElem> factors;

  static ProductElem identity(const std::vector<std::uint32_t> &moduli);
  std::size_t size() const noexcept { return factors.size(); }
  std::vector<std::uint32_t> moduli() const;
  void compose_in_place(const ProductElem &h);

  friend bool operator==(const ProductElem &, const ProductElem &) = default;
};

AffineElem compose(const AffineElem &g, const AffineElem &h);
AffineElem inverse(const AffineElem &g);
AffineElem power(const AffineElem &g, Index k);

Vertex act_vertex(const AffineElem &g, const Vertex &v);
End act_end(const AffineElem &g, const End &xi);
Point act(const AffineElem &g, const Point &x);

/// phi(g) = h(g o), which is the shift part.
inline Index horocyclic(const AffineElem &g) { return g.shift(); }
Index gauge_T(const AffineElem &g);

/// The fixed end other than omega of a hyperbolic element; nullopt when n = 0.
std::optional<End> fixed_end(const AffineElem &g);

ProductElem compose(const ProductElem &g, const ProductElem &h);
ProductElem inverse(const ProductElem &g);
ProductElem power(const ProductElem &g, Index k);
Index gauge_P(const ProductElem &g);

/// sigma^(i): the unit shift in factor i, identity elsewhere.
ProductElem unit_shift(const std::vector<std::uint32_t> &moduli, std::size_t i, Index sign = 1);

/// Factors of gauge_P at most 1 whose ordered product is g: unit shifts
/// matching phi_i(g), then the conjugation of the horocyclic remainder into
/// stab(o).
std::vector<ProductElem> decompose_into_J(const ProductElem &g);

std::string to_string(const AffineElem &g);
std::string to_string(const ProductElem &g);

} // namespace treewalk
