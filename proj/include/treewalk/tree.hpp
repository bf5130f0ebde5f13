#pragma once

#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "treewalk/digits.hpp"

namespace treewalk {

/**
 * A vertex of the (q+1)-regular tree, realized as a ball of digit sequences.
 *
 * The vertex at level k with residue r is the set of sequences agreeing with
 * r below index k. Levels decrease toward the distinguished end omega and
 * increase along children, so the Busemann value of a vertex is its level.
 */
class Vertex {
public:
  /// Throws if `residue` has an entry at index >= level.
  Vertex(Index level, Digits residue);

  static Vertex root(std::uint32_t q) { return Vertex(0, Digits(q)); }

  std::uint32_t modulus() const noexcept { return residue_.modulus(); }
  Index level() const noexcept { return level_; }
  const Digits &residue() const noexcept { return residue_; }

  friend bool operator==(const Vertex &, const Vertex &) = default;

private:
  Index level_;
  Digits residue_;
};

/**
 * A point of the end space: either omega or an eventually periodic stream.
 *
 * A stream is stored as a finitely supported part below `period_start` and a
 * period word repeated from `period_start` upward. Construction normalizes to
 * the minimal period and the smallest possible period start, so equal ends
 * have equal representations. For the all-zero period the period start is
 * one above the top of the preperiodic part (0 if that part is empty).
 */
class End {
public:
  static End omega(std::uint32_t q);
  /// `pre` must be supported below `period_start`; `period` non-empty.
  static End stream(Digits pre, Index period_start, std::vector<Digit> period);
  /// The stream with every digit zero (fixed end of the pure shifts).
  static End zero_stream(std::uint32_t q);

  std::uint32_t modulus() const noexcept { return pre_.modulus(); }
  bool is_omega() const noexcept { return omega_; }
  const Digits &pre() const noexcept { return pre_; }
  Index period_start() const noexcept { return start_; }
  const std::vector<Digit> &period() const noexcept { return period_; }

  /// Stream digit at index i. Must not be called on omega.
  Digit digit_at(Index i) const;
  /// Lowest index carrying a non-zero digit; nullopt for the zero stream.
  std::optional<Index> valuation() const;
  /// All digits below k as a finitely supported sequence.
  Digits prefix_below(Index k) const;

  friend bool operator==(const End &, const End &) = default;

private:
  End(bool omega, Digits pre, Index start, std::vector<Digit> period);
  void normalize();

  bool omega_;
  Digits pre_;
  Index start_;
  std::vector<Digit> period_;
};

using Point = std::variant<Vertex, End>;

/// One end per factor of a product of trees.
struct BoundaryPoint {
  std::vector<End> factors;
  friend bool operator==(const BoundaryPoint &, const BoundaryPoint &) = default;
};

/// Exact value q^{-exponent}, or zero. Ordered by numeric value.
struct Theta {
  std::uint32_t q;
  std::optional<Index> exponent; ///< nullopt means 0

  bool is_zero() const noexcept { return !exponent.has_value(); }
  double to_double() const;
  friend bool operator==(const Theta &, const Theta &) = default;
  friend std::strong_ordering operator<=>(const Theta &a, const Theta &b);
};

Vertex parent(const Vertex &v);
std::vector<Vertex> children(const Vertex &v);
/// Parent first, then children.
std::vector<Vertex> neighbors(const Vertex &v);

Index distance(const Vertex &u, const Vertex &v);
/// Distance from the root o.
inline Index norm(const Vertex &v) { return distance(Vertex::root(v.modulus()), v); }
Index busemann(const Vertex &v);

/// The n-th vertex on the geodesic from the root toward x (n >= 0), or
/// nullopt when x is a vertex closer than n.
std::optional<Vertex> root_geodesic_step(const Point &x, Index n);

/// Last common element of the root geodesics toward x and y.
Point confluent_from_root(const Point &x, const Point &y);
Theta theta(const Point &x, const Point &y);

/// The n-th vertex on the geodesic ray from `from` to xi.
Vertex ray_vertex(const End &xi, Index n, const Vertex &from);

/// All vertices within `radius` of `center`, in breadth-first order.
std::vector<Vertex> ball(const Vertex &center, Index radius);

std::uint32_t modulus_of(const Point &x);

std::string to_string(const Vertex &v);
std::string to_string(const End &xi);
std::string to_string(const Point &x);

} // namespace treewalk

template <> struct std::hash<treewalk::Digits> {
  std::size_t operator()(const treewalk::Digits &d) const noexcept;
};
template <> struct std::hash<treewalk::Vertex> {
  std::size_t operator()(const treewalk::Vertex &v) const noexcept;
};
