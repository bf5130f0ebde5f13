#include "treewalk/group.hpp"

#include <sstream>

namespace treewalk {

namespace {

void require_same(std::uint32_t a, std::uint32_t b)
{
  if (a != b)
    throw ModulusMismatch(a, b);
}

void require_shape(const ProductElem &g, const ProductElem &h)
{
  if (g.size() != h.size())
    throw std::invalid_argument("product elements have different factor counts");
}

} // namespace

void AffineElem::compose_in_place(const AffineElem &h)
{
  b_.add_shifted(h.b_, n_);
  n_ += h.n_;
}

ProductElem ProductElem::identity(const std::vector<std::uint32_t> &moduli)
{
  ProductElem e;
  for (auto q : moduli)
    e.factors.push_back(AffineElem::identity(q));
  return e;
}

std::vector<std::uint32_t> ProductElem::moduli() const
{
  std::vector<std::uint32_t> out;
  for (auto const &f : factors)
    out.push_back(f.modulus());
  return out;
}

void ProductElem::compose_in_place(const ProductElem &h)
{
  require_shape(*this, h);
  for (std::size_t i = 0; i < factors.size(); ++i)
    factors[i].compose_in_place(h.factors[i]);
}

AffineElem compose(const AffineElem &g, const AffineElem &h)
{
  AffineElem out = g;
  out.compose_in_place(h);
  return out;
}

AffineElem inverse(const AffineElem &g)
{
  return AffineElem(-g.shift(), negate(shift(g.translation(), -g.shift())));
}

AffineElem power(const AffineElem &g, Index k)
{
  const AffineElem base = k < 0 ? inverse(g) : g;
  AffineElem out = AffineElem::identity(g.modulus());
  for (Index i = 0; i < (k < 0 ? -k : k); ++i)
    out.compose_in_place(base);
  return out;
}

Vertex act_vertex(const AffineElem &g, const Vertex &v)
{
  require_same(g.modulus(), v.modulus());
  const Index level = v.level() + g.shift();
  Digits r = shift(v.residue(), g.shift());
  r.add_shifted(truncate_below(g.translation(), level), 0);
  return Vertex(level, std::move(r));
}

End act_end(const AffineElem &g, const End &xi)
{
  require_same(g.modulus(), xi.modulus());
  if (xi.is_omega())
    return xi;
  const Index n = g.shift();
  const Index p = xi.period_start() + n;
  const auto &b = g.translation();
  // Unroll the period past the top of b so the sum stays in stream form.
  const Index start = b.empty() ? p : std::max(p, *b.top() + 1);
  Digits pre = shift(xi.pre(), n);
  for (Index i = p; i < start; ++i)
    pre.add_at(i, xi.digit_at(i - n));
  pre.add_shifted(b, 0);
  std::vector<Digit> period;
  const auto len = static_cast<Index>(xi.period().size());
  for (Index k = 0; k < len; ++k)
    period.push_back(xi.digit_at(start + k - n));
  return End::stream(std::move(pre), start, std::move(period));
}

Point act(const AffineElem &g, const Point &x)
{
  if (auto const *v = std::get_if<Vertex>(&x))
    return act_vertex(g, *v);
  return act_end(g, std::get<End>(x));
}

Index gauge_T(const AffineElem &g) { return norm(act_vertex(g, Vertex::root(g.modulus()))); }

std::optional<End> fixed_end(const AffineElem &g)
{
  const Index n = g.shift();
  if (n == 0)
    return std::nullopt;
  if (n < 0)
    return fixed_end(inverse(g));
  const Digits &b = g.translation();
  if (b.empty())
    return End::zero_stream(g.modulus());
  // xi = sum_{j >= 0} t^{jn} b; periodic with period n above top(b).
  const Index lo = *b.valuation();
  const Index p = *b.top() + 1;
  auto digit = [&](Index i) {
    Digit sum = 0;
    for (Index k = i; k >= lo; k -= n)
      sum = (sum + b.at(k)) % g.modulus();
    return sum;
  };
  Digits pre(g.modulus());
  for (Index i = lo; i < p; ++i)
    pre.add_at(i, digit(i));
  std::vector<Digit> period;
  for (Index i = p; i < p + n; ++i)
    period.push_back(digit(i));
  return End::stream(std::move(pre), p, std::move(period));
}

ProductElem compose(const ProductElem &g, const ProductElem &h)
{
  ProductElem out = g;
  out.compose_in_place(h);
  return out;
}

ProductElem inverse(const ProductElem &g)
{
  ProductElem out;
  for (auto const &f : g.factors)
    out.factors.push_back(inverse(f));
  return out;
}

ProductElem power(const ProductElem &g, Index k)
{
  ProductElem out;
  for (auto const &f : g.factors)
    out.factors.push_back(power(f, k));
  return out;
}

Index gauge_P(const ProductElem &g)
{
  Index total = 0;
  for (auto const &f : g.factors)
    total += gauge_T(f);
  return total;
}

ProductElem unit_shift(const std::vector<std::uint32_t> &moduli, std::size_t i, Index sign)
{
  ProductElem s = ProductElem::identity(moduli);
  s.factors.at(i) = AffineElem(sign < 0 ? -1 : 1, Digits(moduli[i]));
  return s;
}

std::vector<ProductElem> decompose_into_J(const ProductElem &g)
{
  const auto moduli = g.moduli();
  std::vector<ProductElem> out;
  auto push_shifts = [&](std::size_t i, Index k) {
    for (Index s = 0; s < (k < 0 ? -k : k); ++s)
      out.push_back(unit_shift(moduli, i, k < 0 ? -1 : 1));
  };

  ProductElem peel = ProductElem::identity(moduli);
  for (std::size_t i = 0; i < g.size(); ++i) {
    push_shifts(i, horocyclic(g.factors[i]));
    peel.compose_in_place(power(unit_shift(moduli, i), -horocyclic(g.factors[i])));
  }
  const ProductElem beta = compose(peel, g);

  // Omega lifts each confluent o ^ beta_i o back to o; conjugation by it
  // moves the horocyclic remainder into stab(o).
  ProductElem omega = ProductElem::identity(moduli);
  std::vector<Index> lift(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto &b = beta.factors[i].translation();
    lift[i] = std::min<Index>(0, valuation_or_inf(b));
    omega.compose_in_place(power(unit_shift(moduli, i), -lift[i]));
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    push_shifts(i, lift[i]);
  const ProductElem stabilized = compose(compose(omega, beta), inverse(omega));
  if (stabilized != ProductElem::identity(moduli))
    out.push_back(stabilized);
  for (std::size_t i = 0; i < g.size(); ++i)
    push_shifts(i, -lift[i]);
  return out;
}

std::string to_string(const AffineElem &g)
{
  std::ostringstream os;
  os << g.modulus() << ":(" << g.shift() << "; " << to_string(g.translation()) << ')';
  return os.str();
}

std::string to_string(const ProductElem &g)
{
  std::string out = "[";
  for (std::size_t i = 0; i < g.factors.size(); ++i) {
    if (i)
      out += ", ";
    out += to_string(g.factors[i]);
  }
  return out + ']';
}

} // namespace treewalk
