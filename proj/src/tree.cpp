#include "treewalk/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace treewalk {

namespace {

Index floor_mod(Index a, Index m)
{
  Index r = a % m;
  return r < 0 ? r + m : r;
}

std::vector<Digit> minimal_period(const std::vector<Digit> &period)
{
  const std::size_t len = period.size();
  for (std::size_t d = 1; d < len; ++d) {
    if (len % d != 0)
      continue;
    bool ok = true;
    for (std::size_t i = d; i < len && ok; ++i)
      ok = period[i] == period[i - d];
    if (ok)
      return {period.begin(), period.begin() + static_cast<std::ptrdiff_t>(d)};
  }
  return period;
}

// Path data for the geodesic from the root toward a point: the walk climbs
// to level `top` along the omega ray, then descends (possibly forever).
struct RootPath {
  Index top;
  std::optional<Index> length; // nullopt for ends
};

RootPath root_path(const Point &x)
{
  if (auto const *v = std::get_if<Vertex>(&x)) {
    Index m = std::min<Index>({0, v->level(), valuation_or_inf(v->residue())});
    return {m, (-m) + (v->level() - m)};
  }
  auto const &xi = std::get<End>(x);
  if (xi.is_omega())
    return {0, std::nullopt};
  Index m = std::min<Index>(0, xi.valuation().value_or(kInfiniteValuation));
  return {m, std::nullopt};
}

void require_same(std::uint32_t a, std::uint32_t b)
{
  if (a != b)
    throw ModulusMismatch(a, b);
}

} // namespace

Vertex::Vertex(Index level, Digits residue) : level_(level), residue_(std::move(residue))
{
  if (auto top = residue_.top(); top && *top >= level_)
    throw std::invalid_argument("vertex residue must be supported below its level");
}

End::End(bool omega, Digits pre, Index start, std::vector<Digit> period)
    : omega_(omega), pre_(std::move(pre)), start_(start), period_(std::move(period))
{}

End End::omega(std::uint32_t q) { return End(true, Digits(q), 0, {}); }

End End::zero_stream(std::uint32_t q) { return stream(Digits(q), 0, {0}); }

End End::stream(Digits pre, Index period_start, std::vector<Digit> period)
{
  if (period.empty())
    throw std::invalid_argument("stream period must be non-empty");
  for (Digit d : period)
    if (d >= pre.modulus())
      throw std::invalid_argument("stream period digit out of range");
  if (auto top = pre.top(); top && *top >= period_start)
    throw std::invalid_argument("preperiodic part must lie below the period start");
  End xi(false, std::move(pre), period_start, std::move(period));
  xi.normalize();
  return xi;
}

void End::normalize()
{
  period_ = minimal_period(period_);
  const bool all_zero = std::all_of(period_.begin(), period_.end(), [](Digit d) { return d == 0; });
  if (all_zero) {
    start_ = pre_.empty() ? 0 : *pre_.top() + 1;
    return;
  }
  // Absorb the tail of the preperiodic part into the period while it matches.
  while (pre_.at(start_ - 1) == period_.back()) {
    Digit d = period_.back();
    std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
    --start_;
    pre_.add_at(start_, pre_.modulus() - d); // clear the absorbed digit
  }
}

Digit End::digit_at(Index i) const
{
  if (omega_)
    throw std::logic_error("omega has no digits");
  if (i >= start_)
    return period_[static_cast<std::size_t>(floor_mod(i - start_, static_cast<Index>(period_.size())))];
  return pre_.at(i);
}

std::optional<Index> End::valuation() const
{
  if (omega_)
    throw std::logic_error("omega has no digits");
  if (auto v = pre_.valuation())
    return v;
  for (std::size_t k = 0; k < period_.size(); ++k)
    if (period_[k] != 0)
      return start_ + static_cast<Index>(k);
  return std::nullopt;
}

Digits End::prefix_below(Index k) const
{
  Digits out = truncate_below(pre_, k);
  for (Index i = start_; i < k; ++i)
    out.add_at(i, digit_at(i));
  return out;
}

double Theta::to_double() const
{
  return exponent ? std::pow(static_cast<double>(q), -static_cast<double>(*exponent)) : 0.0;
}

std::strong_ordering operator<=>(const Theta &a, const Theta &b)
{
  if (a.is_zero() || b.is_zero())
    return !a.is_zero() <=> !b.is_zero();
  return *b.exponent <=> *a.exponent;
}

Vertex parent(const Vertex &v)
{
  return Vertex(v.level() - 1, truncate_below(v.residue(), v.level() - 1));
}

std::vector<Vertex> children(const Vertex &v)
{
  std::vector<Vertex> out;
  out.reserve(v.modulus());
  for (Digit d = 0; d < v.modulus(); ++d) {
    Digits r = v.residue();
    r.add_at(v.level(), d);
    out.emplace_back(v.level() + 1, std::move(r));
  }
  return out;
}

std::vector<Vertex> neighbors(const Vertex &v)
{
  std::vector<Vertex> out{parent(v)};
  for (auto &c : children(v))
    out.push_back(std::move(c));
  return out;
}

Index distance(const Vertex &u, const Vertex &v)
{
  require_same(u.modulus(), v.modulus());
  Index m = std::min(u.level(), v.level());
  if (auto diff = first_difference(u.residue(), v.residue()))
    m = std::min(m, *diff);
  return (u.level() - m) + (v.level() - m);
}

Index busemann(const Vertex &v) { return v.level(); }

std::optional<Vertex> root_geodesic_step(const Point &x, Index n)
{
  const std::uint32_t q = modulus_of(x);
  const RootPath path = root_path(x);
  const Index up = -path.top;
  if (path.length && n > *path.length)
    return std::nullopt;
  if (auto const *xi = std::get_if<End>(&x); xi && xi->is_omega())
    return Vertex(-n, Digits(q));
  if (n <= up)
    return Vertex(-n, Digits(q));
  const Index level = path.top + (n - up);
  if (auto const *v = std::get_if<Vertex>(&x))
    return Vertex(level, truncate_below(v->residue(), level));
  return Vertex(level, std::get<End>(x).prefix_below(level));
}

Point confluent_from_root(const Point &x, const Point &y)
{
  require_same(modulus_of(x), modulus_of(y));
  auto const *ex = std::get_if<End>(&x);
  auto const *ey = std::get_if<End>(&y);
  if (ex && ey && *ex == *ey)
    return x;

  // Step bound past which the two root geodesics cannot still agree.
  const RootPath px = root_path(x), py = root_path(y);
  Index bound;
  if (px.length || py.length) {
    bound = std::min(px.length.value_or(kInfiniteValuation), py.length.value_or(kInfiniteValuation));
  } else if (ex->is_omega() || ey->is_omega()) {
    bound = std::max(-px.top, -py.top) + 1;
  } else {
    // Two distinct eventually periodic streams differ somewhere below this level.
    const Index lo = std::min(px.top, py.top) - 1;
    const Index hi = std::max(ex->period_start(), ey->period_start()) +
                     static_cast<Index>(ex->period().size() * ey->period().size()) + 1;
    Index diff = hi;
    for (Index i = lo; i <= hi; ++i)
      if (ex->digit_at(i) != ey->digit_at(i)) {
        diff = i;
        break;
      }
    bound = -std::min(px.top, py.top) + (diff + 1 - std::min(px.top, py.top)) + 1;
  }

  // Agreement of the two paths is a prefix property; binary search its end.
  Index lo = 0, hi = bound;
  auto agree = [&](Index s) {
    auto a = root_geodesic_step(x, s);
    auto b = root_geodesic_step(y, s);
    return a && b && *a == *b;
  };
  while (lo < hi) {
    Index mid = lo + (hi - lo + 1) / 2;
    if (agree(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return *root_geodesic_step(x, lo);
}

Theta theta(const Point &x, const Point &y)
{
  const std::uint32_t q = modulus_of(x);
  if (x == y)
    return Theta{q, std::nullopt};
  Point c = confluent_from_root(x, y);
  return Theta{q, norm(std::get<Vertex>(c))};
}

Vertex ray_vertex(const End &xi, Index n, const Vertex &from)
{
  require_same(xi.modulus(), from.modulus());
  const Index k = from.level();
  if (xi.is_omega())
    return Vertex(k - n, truncate_below(from.residue(), k - n));
  Index m = k;
  if (auto diff = first_difference(from.residue(), xi.prefix_below(k)))
    m = std::min(m, *diff);
  const Index up = k - m;
  if (n <= up)
    return Vertex(k - n, truncate_below(from.residue(), k - n));
  const Index level = m + (n - up);
  return Vertex(level, xi.prefix_below(level));
}

std::vector<Vertex> ball(const Vertex &center, Index radius)
{
  std::vector<Vertex> out{center};
  std::unordered_set<Vertex> seen{center};
  std::size_t frontier_begin = 0;
  for (Index r = 0; r < radius; ++r) {
    const std::size_t frontier_end = out.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i)
      for (auto &w : neighbors(out[i]))
        if (seen.insert(w).second)
          out.push_back(std::move(w));
    frontier_begin = frontier_end;
  }
  return out;
}

std::uint32_t modulus_of(const Point &x)
{
  return std::visit([](auto const &p) { return p.modulus(); }, x);
}

std::string to_string(const Vertex &v)
{
  std::string digits = to_string(v.residue());
  // Drop the "q:" prefix of the digit form; the vertex form carries q once.
  digits.erase(0, digits.find(':') + 1);
  std::ostringstream os;
  os << v.modulus() << ":(" << v.level() << "; " << digits << ')';
  return os.str();
}

std::string to_string(const End &xi)
{
  std::ostringstream os;
  os << xi.modulus() << ':';
  if (xi.is_omega()) {
    os << "omega";
    return os.str();
  }
  std::string pre = to_string(xi.pre());
  pre.erase(0, pre.find(':') + 1);
  os << "stream(pre=" << pre << ", p=" << xi.period_start() << ", period=[";
  for (std::size_t i = 0; i < xi.period().size(); ++i)
    os << (i ? "," : "") << xi.period()[i];
  os << "])";
  return os.str();
}

std::string to_string(const Point &x)
{
  return std::visit([](auto const &p) { return to_string(p); }, x);
}

} // namespace treewalk

std::size_t std::hash<treewalk::Digits>::operator()(const treewalk::Digits &d) const noexcept
{
  std::size_t h = d.modulus();
  for (auto const &[i, v] : d.entries()) {
    h ^= std::hash<treewalk::Index>{}(i) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::size_t std::hash<treewalk::Vertex>::operator()(const treewalk::Vertex &v) const noexcept
{
  std::size_t h = std::hash<treewalk::Digits>{}(v.residue());
  return h ^ (std::hash<treewalk::Index>{}(v.level()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}
