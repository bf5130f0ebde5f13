#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace treewalk {

using Index = std::int64_t;
using Digit = std::uint32_t;

/// Raised when values over different moduli are combined.
class ModulusMismatch : public std::invalid_argument {
public:
  ModulusMismatch(std::uint32_t a, std::uint32_t b);
};

/**
 * A finitely supported two-sided sequence of digits in Z/q.
 *
 * Only non-zero digits are stored, so two values compare equal exactly when
 * their stored maps do. Indices are 64-bit; constructors reject indices
 * within 2^62 of the range limits so that shifts by walk-sized amounts
 * cannot overflow.
 */
class Digits {
public:
  using Storage = std::map<Index, Digit>;

  explicit Digits(std::uint32_t q);
  Digits(std::uint32_t q, std::initializer_list<std::pair<const Index, Digit>> entries);
  Digits(std::uint32_t q, const Storage &entries);

  std::uint32_t modulus() const noexcept { return q_; }
  const Storage &entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t support_size() const noexcept { return entries_.size(); }

  /// Digit at `i` (0 when absent).
  Digit at(Index i) const;

  /// Smallest stored index, or nullopt for the empty sequence (valuation +inf).
  std::optional<Index> valuation() const;
  /// Largest stored index, or nullopt when empty.
  std::optional<Index> top() const;

  /// In-place a += shift(b, n). The one mutating primitive; the walk engine
  /// uses it to keep R_n compose steps proportional to the increment size.
  void add_shifted(const Digits &b, Index n);
  /// In-place update of a single digit: entry i += d (mod q).
  void add_at(Index i, Digit d);

  friend bool operator==(const Digits &, const Digits &) = default;

private:
  static void check_index(Index i);

  std::uint32_t q_;
  Storage entries_;
};

Digits add(const Digits &a, const Digits &b);
Digits negate(const Digits &a);
Digits shift(const Digits &a, Index n);
/// Keeps exactly the entries with index < k.
Digits truncate_below(const Digits &a, Index k);
/// Keeps exactly the entries with index >= k.
Digits truncate_from(const Digits &a, Index k);

/// Sentinel returned by valuation_or_inf for the empty sequence.
inline constexpr Index kInfiniteValuation = std::numeric_limits<Index>::max();
Index valuation_or_inf(const Digits &a);

/// Index of the first position where a and b differ, or nullopt if equal.
std::optional<Index> first_difference(const Digits &a, const Digits &b);

/// `q:{i1:d1,i2:d2}` with ascending indices.
std::string to_string(const Digits &a);

} // namespace treewalk
