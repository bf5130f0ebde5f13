#include "treewalk/scale.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

namespace treewalk {

namespace {

std::uint64_t checked_pow(std::uint64_t base, Index e)
{
  std::uint64_t out = 1;
  for (Index i = 0; i < e; ++i) {
    if (out > (std::uint64_t{1} << 62) / base)
      throw std::overflow_error("scale value exceeds 62 bits");
    out *= base;
  }
  return out;
}

bool is_prime(std::uint32_t q)
{
  for (std::uint32_t d = 2; d * d <= q; ++d)
    if (q % d == 0)
      return false;
  return q >= 2;
}

std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t p)
{
  // p prime: a^(p-2)
  std::uint64_t result = 1, base = a % p;
  for (std::uint32_t e = p - 2; e; e >>= 1) {
    if (e & 1)
      result = result * base % p;
    base = base * base % p;
  }
  return static_cast<std::uint32_t>(result);
}

std::uint64_t oracle_factor(const AffineElem &g, Index depth)
{
  const Index n = g.shift();
  const Index absn = n < 0 ? -n : n;
  if (depth < absn + 2)
    throw std::invalid_argument("oracle depth must be at least |n| + 2");
  const std::uint32_t q = g.modulus();
  const Index width = depth + absn;
  const std::uint64_t count = checked_pow(q, width);
  if (count > (std::uint64_t{1} << 24))
    throw std::invalid_argument("oracle enumeration too large");

  const AffineElem g_inv = inverse(g);
  std::unordered_set<Digits> image;
  std::vector<Digit> word(static_cast<std::size_t>(width), 0);
  for (std::uint64_t code = 0; code < count; ++code) {
    std::uint64_t c = code;
    Digits v(q);
    for (Index i = 0; i < width; ++i, c /= q)
      v.add_at(i, static_cast<Digit>(c % q));
    const AffineElem conj = compose(compose(g, AffineElem(0, std::move(v))), g_inv);
    if (conj.shift() != 0)
      throw std::logic_error("conjugate of a horocyclic element is not horocyclic");
    image.insert(truncate_below(conj.translation(), depth));
  }
  std::uint64_t inside = 0;
  for (auto const &x : image)
    if (valuation_or_inf(x) >= 0)
      ++inside;
  if (image.size() % inside != 0)
    throw std::logic_error("coset count is not an integer");
  return image.size() / inside;
}

} // namespace

SubgroupSpec::SubgroupSpec(std::vector<std::uint32_t> moduli_, std::vector<ProductElem> generators_)
    : moduli(std::move(moduli_)), generators(std::move(generators_))
{
  if (generators.empty())
    throw std::invalid_argument("subgroup needs at least one generator");
  for (auto const &g : generators)
    if (g.moduli() != moduli)
      throw std::invalid_argument("generator " + to_string(g) + " does not match the product moduli");
}

ScaleResult scale_element(const ProductElem &g)
{
  ScaleResult r{g, {}, 1, Rational(1)};
  for (auto const &f : g.factors) {
    const Index n = f.shift();
    const std::uint64_t s = checked_pow(f.modulus(), std::max<Index>(-n, 0));
    r.factor_scale.push_back(s);
    r.total *= s;
    const auto qn = static_cast<std::int64_t>(checked_pow(f.modulus(), n < 0 ? -n : n));
    r.modular *= n < 0 ? Rational(qn) : Rational(1, qn);
  }
  return r;
}

std::vector<std::uint64_t> scale_oracle(const ProductElem &g, Index depth)
{
  std::vector<std::uint64_t> out;
  for (auto const &f : g.factors)
    out.push_back(oracle_factor(f, depth));
  return out;
}

std::string to_string(FactorClass c)
{
  switch (c) {
  case FactorClass::exceptional_horocyclic:
    return "exceptional-horocyclic";
  case FactorClass::exceptional_fixed_end:
    return "exceptional-fixed-end";
  case FactorClass::non_exceptional:
    break;
  }
  return "non-exceptional";
}

std::string to_string(SubgroupClass c)
{
  switch (c) {
  case SubgroupClass::fully_exceptional:
    return "fully exceptional";
  case SubgroupClass::partially_exceptional:
    return "partially exceptional";
  case SubgroupClass::not_partially_exceptional:
    break;
  }
  return "not partially exceptional";
}

FactorClass classify_factor(const SubgroupSpec &spec, std::size_t j)
{
  const AffineElem *hyperbolic = nullptr;
  for (auto const &g : spec.generators)
    if (g.factors.at(j).shift() != 0) {
      hyperbolic = &g.factors[j];
      break;
    }
  if (!hyperbolic)
    return FactorClass::exceptional_horocyclic;
  // A hyperbolic element fixes exactly omega and one other end, so that end
  // is the only candidate for a common fixed end.
  const End xi = *fixed_end(*hyperbolic);
  for (auto const &g : spec.generators)
    if (act_end(g.factors[j], xi) != xi)
      return FactorClass::non_exceptional;
  return FactorClass::exceptional_fixed_end;
}

SubgroupClass classify_subgroup(const SubgroupSpec &spec)
{
  std::size_t exceptional = 0;
  for (std::size_t j = 0; j < spec.moduli.size(); ++j)
    exceptional += is_exceptional(classify_factor(spec, j));
  if (exceptional == spec.moduli.size())
    return SubgroupClass::fully_exceptional;
  return exceptional ? SubgroupClass::partially_exceptional : SubgroupClass::not_partially_exceptional;
}

std::vector<ProductElem> sample_words(const SubgroupSpec &spec, std::size_t bound)
{
  std::vector<ProductElem> letters;
  for (auto const &g : spec.generators) {
    letters.push_back(g);
    letters.push_back(inverse(g));
  }
  std::vector<ProductElem> out;
  std::set<std::string> seen;
  std::vector<ProductElem> frontier{ProductElem::identity(spec.moduli)};
  for (std::size_t len = 1; len <= bound; ++len) {
    std::vector<ProductElem> next;
    for (auto const &w : frontier)
      for (auto const &a : letters) {
        ProductElem x = compose(w, a);
        if (seen.insert(to_string(x)).second) {
          out.push_back(x);
          next.push_back(std::move(x));
        }
      }
    frontier = std::move(next);
  }
  return out;
}

struct SubgroupScale::Basis {
  std::vector<std::pair<std::size_t, Index>> columns; ///< (factor, index >= 0)
  std::vector<std::vector<std::uint32_t>> rows;       ///< basis of the non-negative part
};

SubgroupScale::SubgroupScale(const SubgroupSpec &spec, std::size_t word_length)
    : q_(spec.moduli.front()), factors_(spec.moduli.size())
{
  for (auto q : spec.moduli)
    if (q != q_ || !is_prime(q))
      throw std::domain_error("subgroup-relative scale needs one common prime modulus");
  for (auto const &g : spec.generators) {
    std::vector<Index> n;
    for (auto const &f : g.factors)
      n.push_back(f.shift());
    generator_shifts_.push_back(std::move(n));
  }
  std::set<std::string> seen;
  for (auto const &w : sample_words(spec, word_length)) {
    bool zero_shift = std::all_of(w.factors.begin(), w.factors.end(), [](auto const &f) { return f.shift() == 0; });
    if (!zero_shift || w == ProductElem::identity(spec.moduli))
      continue;
    if (!seen.insert(to_string(w)).second)
      continue;
    std::vector<Digits> part;
    for (auto const &f : w.factors)
      part.push_back(f.translation());
    zero_shift_parts_.push_back(std::move(part));
  }
}

SubgroupScale::Basis &SubgroupScale::basis(Index radius)
{
  if (auto it = cache_.find(radius); it != cache_.end())
    return *it->second;

  // Shift vectors reachable inside the box |lambda_i| <= radius.
  std::set<std::vector<Index>> lattice{std::vector<Index>(factors_, 0)};
  std::deque<std::vector<Index>> queue{std::vector<Index>(factors_, 0)};
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto const &g : generator_shifts_)
      for (int sign : {1, -1}) {
        auto w = v;
        bool inside = true;
        for (std::size_t i = 0; i < factors_; ++i) {
          w[i] += sign * g[i];
          inside = inside && std::abs(w[i]) <= radius;
        }
        if (inside && lattice.insert(w).second)
          queue.push_back(std::move(w));
      }
  }

  // Columns: negative indices first so that echelon rows with a pivot at a
  // non-negative index span exactly the vectors vanishing below 0.
  std::set<std::pair<Index, std::size_t>> neg_cols, pos_cols;
  std::vector<std::vector<std::pair<std::pair<std::size_t, Index>, Digit>>> vectors;
  for (auto const &part : zero_shift_parts_)
    for (auto const &lambda : lattice) {
      std::vector<std::pair<std::pair<std::size_t, Index>, Digit>> v;
      for (std::size_t i = 0; i < factors_; ++i)
        for (auto const &[idx, d] : part[i].entries()) {
          const Index k = idx + lambda[i];
          v.push_back({{i, k}, d});
          (k < 0 ? neg_cols : pos_cols).insert({k, i});
        }
      vectors.push_back(std::move(v));
    }
  std::map<std::pair<std::size_t, Index>, std::size_t> column_of;
  auto b = std::make_shared<Basis>();
  for (auto const &[k, i] : neg_cols)
    column_of[{i, k}] = column_of.size();
  const std::size_t first_pos = column_of.size();
  for (auto const &[k, i] : pos_cols) {
    column_of[{i, k}] = column_of.size();
    b->columns.push_back({i, k});
  }
  const std::size_t width = column_of.size();

  std::map<std::size_t, std::vector<std::uint32_t>> pivots;
  for (auto const &sparse : vectors) {
    if (pivots.size() == width)
      break;
    std::vector<std::uint32_t> row(width, 0);
    for (auto const &[coord, d] : sparse)
      row[column_of[coord]] = d;
    for (std::size_t c = 0; c < width; ++c) {
      if (row[c] == 0)
        continue;
      auto it = pivots.find(c);
      if (it == pivots.end()) {
        const std::uint32_t inv = mod_inverse(row[c], q_);
        for (auto &x : row)
          x = static_cast<std::uint32_t>(std::uint64_t{x} * inv % q_);
        pivots.emplace(c, std::move(row));
        break;
      }
      const std::uint64_t factor = row[c];
      for (std::size_t k = c; k < width; ++k)
        row[k] = static_cast<std::uint32_t>((row[k] + (q_ - factor) * it->second[k]) % q_);
    }
  }
  for (auto &[c, row] : pivots)
    if (c >= first_pos)
      b->rows.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(first_pos), row.end());
  return *cache_.emplace(radius, std::move(b)).first->second;
}

std::int64_t SubgroupScale::rank_increment(const std::vector<Index> &shift, Index radius)
{
  const Basis &b = basis(radius);
  auto orbit_rank = [&](Index k) {
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < b.columns.size(); ++c) {
      auto [i, idx] = b.columns[c];
      if (idx < -k * shift[i])
        keep.push_back(c);
    }
    std::vector<std::vector<std::uint32_t>> m;
    for (auto const &row : b.rows) {
      std::vector<std::uint32_t> r;
      for (auto c : keep)
        r.push_back(row[c]);
      m.push_back(std::move(r));
    }
    std::int64_t rank = 0;
    for (std::size_t c = 0; c < keep.size() && rank < static_cast<std::int64_t>(m.size()); ++c) {
      std::size_t piv = static_cast<std::size_t>(rank);
      while (piv < m.size() && m[piv][c] == 0)
        ++piv;
      if (piv == m.size())
        continue;
      std::swap(m[piv], m[static_cast<std::size_t>(rank)]);
      auto &p = m[static_cast<std::size_t>(rank)];
      const std::uint32_t inv = mod_inverse(p[c], q_);
      for (auto &x : p)
        x = static_cast<std::uint32_t>(std::uint64_t{x} * inv % q_);
      for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < m.size(); ++r) {
        const std::uint64_t f = m[r][c];
        if (f == 0)
          continue;
        for (std::size_t k = c; k < keep.size(); ++k)
          m[r][k] = static_cast<std::uint32_t>((m[r][k] + (q_ - f) * p[k]) % q_);
      }
      ++rank;
    }
    return rank;
  };
  constexpr Index K = 3;
  return orbit_rank(K + 1) - orbit_rank(K);
}

std::uint64_t SubgroupScale::scale(const ProductElem &x)
{
  std::vector<Index> shift;
  Index reach = 0;
  for (auto const &f : x.factors) {
    shift.push_back(f.shift());
    reach = std::max(reach, std::abs(f.shift()));
  }
  if (auto it = memo_.find(shift); it != memo_.end())
    return it->second;
  std::uint64_t result = 1;
  if (std::any_of(shift.begin(), shift.end(), [](Index n) { return n < 0; }) && !zero_shift_parts_.empty()) {
    // Grow the span until the rank increment is stable.
    Index radius = 5 * reach + 8;
    std::int64_t previous = rank_increment(shift, radius);
    for (int round = 0; round < 8; ++round) {
      radius += 2 * reach + 4;
      const std::int64_t current = rank_increment(shift, radius);
      if (current == previous)
        break;
      previous = current;
    }
    result = checked_pow(q_, std::max<std::int64_t>(previous, 0));
  }
  memo_.emplace(shift, result);
  return result;
}

Rational SubgroupScale::modular(const ProductElem &x)
{
  return Rational(static_cast<std::int64_t>(scale(x)), static_cast<std::int64_t>(scale(inverse(x))));
}

bool is_uniscalar(const SubgroupSpec &spec, std::size_t bound, ScaleFrame frame)
{
  if (bound < 1)
    throw std::invalid_argument("sample bound must be at least 1");
  auto words = sample_words(spec, bound);
  if (frame == ScaleFrame::ambient)
    return std::all_of(words.begin(), words.end(), [](auto const &w) {
      return scale_element(w).total == 1 && scale_element(inverse(w)).total == 1;
    });
  SubgroupScale rel(spec);
  return std::all_of(words.begin(), words.end(),
                     [&](auto const &w) { return rel.scale(w) == 1 && rel.scale(inverse(w)) == 1; });
}

bool is_unimodular_on_words(const SubgroupSpec &spec, std::size_t bound, ScaleFrame frame)
{
  auto words = sample_words(spec, bound);
  if (frame == ScaleFrame::ambient)
    return std::all_of(words.begin(), words.end(), [](auto const &w) { return scale_element(w).modular == Rational(1); });
  SubgroupScale rel(spec);
  return std::all_of(words.begin(), words.end(), [&](auto const &w) { return rel.modular(w) == Rational(1); });
}

SubgroupSpec support_spec(const Measure &mu)
{
  std::vector<ProductElem> gens;
  for (auto const &a : mu.atoms())
    gens.push_back(a.element);
  return SubgroupSpec(mu.moduli(), std::move(gens));
}

bool transience_hypothesis(const Measure &mu)
{
  return classify_subgroup(support_spec(mu)) != SubgroupClass::fully_exceptional;
}

} // namespace treewalk
