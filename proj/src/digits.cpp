#include "treewalk/digits.hpp"

#include <sstream>

namespace treewalk {

namespace {

constexpr Index kIndexBound = Index{1} << 62;

void require_same(const Digits &a, const Digits &b)
{
  if (a.modulus() != b.modulus())
    throw ModulusMismatch(a.modulus(), b.modulus());
}

} // namespace

ModulusMismatch::ModulusMismatch(std::uint32_t a, std::uint32_t b)
    : std::invalid_argument("modulus mismatch: " + std::to_string(a) + " vs " + std::to_string(b))
{}

Digits::Digits(std::uint32_t q) : q_(q)
{
  if (q < 2)
    throw std::invalid_argument("digit modulus must be at least 2");
}

Digits::Digits(std::uint32_t q, std::initializer_list<std::pair<const Index, Digit>> entries)
    : Digits(q)
{
  for (auto const &[i, d] : entries)
    add_at(i, d);
}

Digits::Digits(std::uint32_t q, const Storage &entries) : Digits(q)
{
  for (auto const &[i, d] : entries)
    add_at(i, d);
}

void Digits::check_index(Index i)
{
  if (i >= kIndexBound || i <= -kIndexBound)
    throw std::out_of_range("digit index outside the supported 62-bit range");
}

Digit Digits::at(Index i) const
{
  auto it = entries_.find(i);
  return it == entries_.end() ? 0 : it->second;
}

std::optional<Index> Digits::valuation() const
{
  if (entries_.empty())
    return std::nullopt;
  return entries_.begin()->first;
}

std::optional<Index> Digits::top() const
{
  if (entries_.empty())
    return std::nullopt;
  return entries_.rbegin()->first;
}

void Digits::add_at(Index i, Digit d)
{
  d %= q_;
  if (d == 0)
    return;
  check_index(i);
  auto [it, inserted] = entries_.try_emplace(i, d);
  if (!inserted) {
    Digit sum = (it->second + d) % q_;
    if (sum == 0)
      entries_.erase(it);
    else
      it->second = sum;
  }
}

void Digits::add_shifted(const Digits &b, Index n)
{
  require_same(*this, b);
  if (&b == this) {
    Digits copy = b;
    add_shifted(copy, n);
    return;
  }
  for (auto const &[i, d] : b.entries_)
    add_at(i + n, d);
}

Digits add(const Digits &a, const Digits &b)
{
  Digits out = a;
  out.add_shifted(b, 0);
  return out;
}

Digits negate(const Digits &a)
{
  Digits out(a.modulus());
  for (auto const &[i, d] : a.entries())
    out.add_at(i, a.modulus() - d);
  return out;
}

Digits shift(const Digits &a, Index n)
{
  Digits out(a.modulus());
  out.add_shifted(a, n);
  return out;
}

Digits truncate_below(const Digits &a, Index k)
{
  Digits out(a.modulus());
  for (auto it = a.entries().begin(); it != a.entries().end() && it->first < k; ++it)
    out.add_at(it->first, it->second);
  return out;
}

Digits truncate_from(const Digits &a, Index k)
{
  Digits out(a.modulus());
  for (auto it = a.entries().lower_bound(k); it != a.entries().end(); ++it)
    out.add_at(it->first, it->second);
  return out;
}

Index valuation_or_inf(const Digits &a)
{
  return a.empty() ? kInfiniteValuation : a.entries().begin()->first;
}

std::optional<Index> first_difference(const Digits &a, const Digits &b)
{
  require_same(a, b);
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() || ib != b.entries().end()) {
    if (ia == a.entries().end())
      return ib->first;
    if (ib == b.entries().end())
      return ia->first;
    if (ia->first != ib->first)
      return std::min(ia->first, ib->first);
    if (ia->second != ib->second)
      return ia->first;
    ++ia;
    ++ib;
  }
  return std::nullopt;
}

std::string to_string(const Digits &a)
{
  std::ostringstream os;
  os << a.modulus() << ":{";
  bool first = true;
  for (auto const &[i, d] : a.entries()) {
    if (!first)
      os << ',';
    os << i << ':' << d;
    first = false;
  }
  os << '}';
  return os.str();
}

} // namespace treewalk
