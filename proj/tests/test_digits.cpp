#include <doctest.h>

#include "generators.hpp"
#include "treewalk/digits.hpp"

using namespace treewalk;

namespace {

// Independent per-index arithmetic over a dense window.
std::vector<int> dense(const Digits &a, Index lo, Index hi)
{
  std::vector<int> out;
  for (Index i = lo; i <= hi; ++i)
    out.push_back(static_cast<int>(a.at(i)));
  return out;
}

std::vector<Digits> all_q2_window()
{
  std::vector<Digits> out;
  for (int code = 0; code < 32; ++code) {
    Digits d(2);
    for (int i = 0; i < 5; ++i)
      if (code >> i & 1)
        d.add_at(i - 2, 1);
    out.push_back(d);
  }
  return out;
}

} // namespace

TEST_CASE("add examples")
{
  CHECK(add(Digits(2, {{0, 1}}), Digits(2, {{0, 1}})).empty());
  CHECK(add(Digits(3, {{0, 1}, {2, 2}}), Digits(3, {{0, 2}})) == Digits(3, {{2, 2}}));

  const Digits a(5, {{-1, 3}}), b(5, {{-1, 4}, {1, 1}});
  std::vector<int> expect;
  for (Index i = -2; i <= 2; ++i)
    expect.push_back(static_cast<int>((a.at(i) + b.at(i)) % 5));
  CHECK(dense(add(a, b), -2, 2) == expect);
  CHECK(add(a, b) == Digits(5, {{-1, 2}, {1, 1}}));
}

TEST_CASE("add rejects mixed moduli")
{
  CHECK_THROWS_AS(add(Digits(2), Digits(3)), ModulusMismatch);
}

TEST_CASE("negate examples")
{
  CHECK(negate(Digits(2, {{3, 1}})) == Digits(2, {{3, 1}}));
  CHECK(negate(Digits(3, {{0, 1}})) == Digits(3, {{0, 2}}));
  CHECK(negate(Digits(7, {{-2, 5}, {4, 3}})) == Digits(7, {{-2, 2}, {4, 4}}));
}

TEST_CASE("shift examples")
{
  CHECK(shift(Digits(2), 5).empty());
  CHECK(shift(Digits(2, {{0, 1}, {2, 1}}), 3) == Digits(2, {{3, 1}, {5, 1}}));
  CHECK(shift(Digits(3, {{-1, 2}}), -2) == Digits(3, {{-3, 2}}));
}

TEST_CASE("truncate_below examples")
{
  CHECK(truncate_below(Digits(2, {{0, 1}, {3, 1}}), 2) == Digits(2, {{0, 1}}));
  CHECK(truncate_below(Digits(2, {{0, 1}}), 0).empty());
  CHECK(truncate_below(Digits(3, {{-4, 2}, {-1, 1}, {6, 2}}), 0) == Digits(3, {{-4, 2}, {-1, 1}}));
}

TEST_CASE("valuation examples")
{
  CHECK_FALSE(Digits(2).valuation().has_value());
  CHECK(valuation_or_inf(Digits(2)) == kInfiniteValuation);
  CHECK(*Digits(3, {{-3, 1}, {5, 2}}).valuation() == -3);
  gen::Engine e(11);
  for (int t = 0; t < 200; ++t) {
    const Digits a = gen::digits(e, 3);
    const Index n = gen::integer(e, -9, 9);
    if (!a.empty())
      CHECK(*shift(a, n).valuation() == *a.valuation() + n);
  }
}

TEST_CASE("zero digits are never stored")
{
  Digits a(3, {{0, 3}, {1, 4}, {2, 0}});
  CHECK(a == Digits(3, {{1, 1}}));
  a.add_at(1, 2);
  CHECK(a.empty());
  CHECK(to_string(Digits(2, {{3, 1}, {0, 1}})) == "2:{0:1,3:1}");
  CHECK(to_string(Digits(5)) == "5:{}");
}

TEST_CASE("abelian group axioms, exhaustive for q=2 on [-2,2]")
{
  const auto all = all_q2_window();
  const Digits zero(2);
  for (auto const &a : all) {
    CHECK(add(a, zero) == a);
    CHECK(add(a, negate(a)).empty());
    for (auto const &b : all) {
      CHECK(add(a, b) == add(b, a));
      for (auto const &c : all)
        REQUIRE(add(add(a, b), c) == add(a, add(b, c)));
    }
  }
}

TEST_CASE("randomized group laws, shift automorphism and truncation split")
{
  gen::Engine e(12);
  for (int t = 0; t < 2000; ++t) {
    const std::uint32_t q = gen::modulus(e);
    const Digits a = gen::digits(e, q), b = gen::digits(e, q), c = gen::digits(e, q);
    const Index n = gen::integer(e, -6, 6), k = gen::integer(e, -5, 5);
    REQUIRE(add(add(a, b), c) == add(a, add(b, c)));
    REQUIRE(add(a, negate(a)).empty());
    REQUIRE(shift(add(a, b), n) == add(shift(a, n), shift(b, n)));
    REQUIRE(shift(shift(a, n), -n) == a);
    REQUIRE(add(truncate_below(a, k), truncate_from(a, k)) == a);
    Digits in_place = a;
    in_place.add_shifted(b, n);
    REQUIRE(in_place == add(a, shift(b, n)));
  }
}

TEST_CASE("first_difference")
{
  CHECK_FALSE(first_difference(Digits(2, {{1, 1}}), Digits(2, {{1, 1}})).has_value());
  CHECK(*first_difference(Digits(2, {{1, 1}, {4, 1}}), Digits(2, {{1, 1}})) == 4);
  CHECK(*first_difference(Digits(3, {{-2, 1}}), Digits(3, {{-2, 2}})) == -2);
}
