#include <doctest.h>

#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "generators.hpp"
#include "treewalk/text.hpp"
#include "treewalk/tree.hpp"

using namespace treewalk;

namespace {

Vertex V(const char *text) { return parse_vertex(text); }

// Breadth-first distances inside an explicitly materialized ball.
std::unordered_map<Vertex, Index> bfs(const Vertex &from, Index radius)
{
  std::unordered_map<Vertex, Index> dist{{from, 0}};
  std::deque<Vertex> queue{from};
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    if (dist[v] == radius)
      continue;
    for (auto const &w : neighbors(v))
      if (dist.emplace(w, dist[v] + 1).second)
        queue.push_back(w);
  }
  return dist;
}

// Root geodesic toward a vertex: up the parent chain of o to the first
// ancestor shared with v, then down v's parent chain.
std::vector<Vertex> geodesic_to(const Vertex &target, Index)
{
  const Vertex o = Vertex::root(target.modulus());
  std::vector<Vertex> up_o{o}, up_v{target};
  for (int i = 0; i < 64; ++i) {
    up_o.push_back(parent(up_o.back()));
    up_v.push_back(parent(up_v.back()));
  }
  for (std::size_t i = 0; i < up_o.size(); ++i)
    for (std::size_t k = 0; k < up_v.size(); ++k)
      if (up_o[i] == up_v[k]) {
        std::vector<Vertex> path(up_o.begin(), up_o.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        for (std::size_t r = k; r-- > 0;)
          path.push_back(up_v[r]);
        return path;
      }
  FAIL("no common ancestor");
  return {};
}

// Root geodesic toward an end, stepping parent-by-parent and then
// child-by-child along the stream digits.
std::vector<Vertex> geodesic_to(const End &xi, Index steps)
{
  const std::uint32_t q = xi.modulus();
  std::vector<Vertex> path{Vertex::root(q)};
  if (xi.is_omega()) {
    while (static_cast<Index>(path.size()) <= steps)
      path.push_back(parent(path.back()));
    return path;
  }
  Index top = 0;
  if (auto v = xi.valuation())
    top = std::min<Index>(0, *v);
  while (path.back().level() > top)
    path.push_back(parent(path.back()));
  while (static_cast<Index>(path.size()) <= steps) {
    const Vertex &v = path.back();
    for (auto const &c : children(v))
      if (c.residue().at(v.level()) == xi.digit_at(v.level())) {
        path.push_back(c);
        break;
      }
  }
  return path;
}

std::vector<Vertex> geodesic_to(const Point &x, Index steps)
{
  if (auto const *v = std::get_if<Vertex>(&x))
    return geodesic_to(*v, steps);
  return geodesic_to(std::get<End>(x), steps);
}

Point confluent_oracle(const Point &x, const Point &y)
{
  if (std::holds_alternative<End>(x) && x == y)
    return x;
  const auto a = geodesic_to(x, 60), b = geodesic_to(y, 60);
  std::size_t i = 0;
  while (i + 1 < a.size() && i + 1 < b.size() && a[i + 1] == b[i + 1])
    ++i;
  return a[i];
}

} // namespace

TEST_CASE("parent and children examples")
{
  const Vertex o = Vertex::root(2);
  CHECK(parent(o) == V("2:(-1; {})"));
  CHECK(parent(V("2:(2; {0:1})")) == V("2:(1; {0:1})"));
  CHECK(parent(V("2:(1; {0:1})")) == o);
  CHECK(children(o) == std::vector<Vertex>{V("2:(1; {})"), V("2:(1; {0:1})")});
  gen::Engine e(21);
  for (int t = 0; t < 100; ++t) {
    const Vertex v = gen::vertex(e, 3);
    const auto cs = children(v);
    CHECK(cs.size() == 3);
    for (auto const &c : cs)
      CHECK(parent(c) == v);
  }
  const auto up = children(parent(o));
  CHECK(std::find(up.begin(), up.end(), o) != up.end());
}

TEST_CASE("vertex residues must lie below the level")
{
  CHECK_THROWS_AS(Vertex(0, Digits(2, {{0, 1}})), std::invalid_argument);
}

TEST_CASE("distance examples against breadth-first search")
{
  const Vertex o = Vertex::root(2);
  CHECK(distance(o, o) == 0);
  CHECK(distance(o, V("2:(2; {0:1,1:1})")) == 2);
  CHECK(distance(V("2:(1; {})"), V("2:(1; {0:1})")) == 2);

  const auto ball3 = bfs(o, 3);
  CHECK(ball3.at(V("2:(1; {0:1})")) == 1);
  for (auto const &[u, du] : ball3) {
    const auto from_u = bfs(u, 6);
    for (auto const &[v, dv] : ball3)
      REQUIRE(distance(u, v) == from_u.at(v));
  }
}

TEST_CASE("distance rejects mixed moduli")
{
  CHECK_THROWS_AS(distance(Vertex::root(2), Vertex::root(3)), ModulusMismatch);
}

TEST_CASE("busemann matches the confluent formula on the radius-4 ball")
{
  CHECK(busemann(Vertex::root(2)) == 0);
  CHECK(busemann(parent(Vertex::root(2))) == -1);
  CHECK(busemann(V("2:(3; {0:1})")) == 3);
  for (std::uint32_t q : {2u, 3u}) {
    const Vertex o = Vertex::root(q);
    for (auto const &v : ball(o, 4)) {
      // c: first common vertex of the parent chains of v and o.
      std::vector<Vertex> up_v{v}, up_o{o};
      for (int i = 0; i < 10; ++i) {
        up_v.push_back(parent(up_v.back()));
        up_o.push_back(parent(up_o.back()));
      }
      Index dv = -1, dc = -1;
      for (std::size_t i = 0; i < up_v.size() && dv < 0; ++i)
        for (std::size_t k = 0; k < up_o.size(); ++k)
          if (up_v[i] == up_o[k]) {
            dv = static_cast<Index>(i);
            dc = static_cast<Index>(k);
            break;
          }
      REQUIRE(dv >= 0);
      CHECK(busemann(v) == dv - dc);
    }
  }
}

TEST_CASE("radius-4 ball is a (q+1)-regular tree")
{
  for (std::uint32_t q : {2u, 3u}) {
    const Vertex o = Vertex::root(q);
    const auto vs = ball(o, 4);
    std::unordered_set<Vertex> inside(vs.begin(), vs.end());
    REQUIRE(inside.size() == vs.size());
    std::size_t edge_ends = 0;
    for (auto const &v : vs) {
      std::size_t deg = 0;
      for (auto const &w : neighbors(v))
        deg += inside.count(w);
      edge_ends += deg;
      CHECK(neighbors(v).size() == q + 1);
      if (distance(o, v) < 4)
        CHECK(deg == q + 1);
    }
    // Connected by construction (BFS); acyclic iff |E| = |V| - 1.
    CHECK(edge_ends / 2 + 1 == vs.size());
    std::size_t expect = 1, sphere = q + 1;
    for (int r = 1; r <= 4; ++r, sphere *= q)
      expect += sphere;
    CHECK(vs.size() == expect);
  }
}

TEST_CASE("distance dominates the Busemann value")
{
  gen::Engine e(22);
  for (int t = 0; t < 2000; ++t) {
    const Vertex v = gen::vertex(e, gen::modulus(e), 8);
    REQUIRE(norm(v) >= std::abs(busemann(v)));
  }
}

TEST_CASE("confluent examples")
{
  const End xi = End::stream(Digits(2, {{-1, 1}}), 0, {1, 0});
  CHECK(confluent_from_root(xi, xi) == Point(xi));
  const Point c = confluent_from_root(V("2:(2; {0:1})"), V("2:(2; {0:1,1:1})"));
  CHECK(c == confluent_oracle(V("2:(2; {0:1})"), V("2:(2; {0:1,1:1})")));
  CHECK(c == Point(V("2:(1; {0:1})")));

  const Vertex below = V("2:(3; {1:1})");
  CHECK(confluent_from_root(End::omega(2), below) == confluent_oracle(End::omega(2), below));
  CHECK(confluent_from_root(End::omega(2), below) == Point(Vertex::root(2)));
}

TEST_CASE("confluent agrees with explicit geodesic enumeration")
{
  gen::Engine e(23);
  for (int t = 0; t < 400; ++t) {
    const std::uint32_t q = e() % 2 ? 2 : 3;
    const Point x = gen::point(e, q), y = gen::point(e, q);
    REQUIRE(confluent_from_root(x, y) == confluent_oracle(x, y));
  }
}

TEST_CASE("theta examples and ultrametric axioms")
{
  const End zero = End::zero_stream(2);
  CHECK(theta(zero, zero).is_zero());
  const Theta t = theta(End::omega(2), zero);
  CHECK(t.exponent == Index{0});
  CHECK(t.to_double() == 1.0);

  gen::Engine e(24);
  for (int k = 0; k < 10000; ++k) {
    const std::uint32_t q = e() % 2 ? 2 : 3;
    const Point x = gen::point(e, q), y = gen::point(e, q), z = gen::point(e, q);
    REQUIRE(theta(x, y) == theta(y, x));
    REQUIRE(theta(x, y).is_zero() == (x == y));
    REQUIRE(theta(x, z) <= std::max(theta(x, y), theta(y, z)));
  }
}

TEST_CASE("ray_vertex examples and adjacency")
{
  const Vertex o = Vertex::root(2);
  const End zero = End::zero_stream(2);
  CHECK(ray_vertex(zero, 0, o) == o);
  CHECK(ray_vertex(End::omega(2), 5, o) == Vertex(-5, Digits(2)));
  CHECK(ray_vertex(zero, 3, o) == Vertex(3, Digits(2)));

  gen::Engine e(25);
  for (int t = 0; t < 300; ++t) {
    const std::uint32_t q = e() % 2 ? 2 : 3;
    const End xi = gen::end(e, q);
    const Vertex from = gen::vertex(e, q);
    for (Index n = 0; n < 12; ++n) {
      REQUIRE(distance(ray_vertex(xi, n, from), ray_vertex(xi, n + 1, from)) == 1);
      REQUIRE(distance(from, ray_vertex(xi, n, from)) == n);
    }
    const auto path = geodesic_to(xi, 12);
    for (Index n = 0; n <= 12; ++n)
      REQUIRE(ray_vertex(xi, n, Vertex::root(q)) == path[static_cast<std::size_t>(n)]);
  }
}

TEST_CASE("end normalization")
{
  // Digits 1 at -1 then 0 1 0 1 ... from 0: periodic from -2 onward.
  const End a = End::stream(Digits(2, {{-1, 1}}), 0, {0, 1});
  CHECK(a.period_start() == -2);
  CHECK(a.period() == std::vector<Digit>{0, 1});
  CHECK(a.pre().empty());
  CHECK(End::stream(Digits(3), 2, {1, 1, 1}).period() == std::vector<Digit>{1});
  CHECK(End::stream(Digits(2, {{3, 1}}), 5, {0}) == End::stream(Digits(2, {{3, 1}}), 4, {0, 0}));
  CHECK(End::stream(Digits(2, {{3, 1}}), 7, {0}).period_start() == 4);
  CHECK(End::zero_stream(2).period_start() == 0);

  gen::Engine e(26);
  for (int t = 0; t < 1000; ++t) {
    const End xi = gen::end(e, 3);
    if (xi.is_omega())
      continue;
    const End again = End::stream(xi.prefix_below(xi.period_start() + 7), xi.period_start() + 7,
                                  [&] {
                                    std::vector<Digit> p;
                                    for (std::size_t i = 0; i < xi.period().size(); ++i)
                                      p.push_back(xi.digit_at(xi.period_start() + 7 + static_cast<Index>(i)));
                                    return p;
                                  }());
    REQUIRE(again == xi);
  }
}

TEST_CASE("text forms round-trip")
{
  gen::Engine e(27);
  for (int t = 0; t < 200; ++t) {
    const Vertex v = gen::vertex(e, 5);
    CHECK(parse_vertex(to_string(v)) == v);
    const End xi = gen::end(e, 3);
    CHECK(parse_end(to_string(xi)) == xi);
  }
  CHECK(to_string(Vertex(2, Digits(2, {{0, 1}}))) == "2:(2; {0:1})");
  CHECK(to_string(End::omega(3)) == "3:omega");
  // The prefix digit is absorbed into the period.
  CHECK(to_string(End::stream(Digits(2, {{-2, 1}}), 0, {1, 0})) == "2:stream(pre={}, p=-3, period=[0,1])");
}
