#include <doctest.h>

#include <cmath>
#include <map>
#include <optional>

#include "generators.hpp"
#include "treewalk/walk.hpp"

using namespace treewalk;

namespace {

ProductElem P(const char *text) { return parse_product(text); }

Measure delta(const char *element)
{
  const ProductElem g = P(element);
  return Measure(g.moduli(), {{g, Rational(1)}});
}

Measure drift04()
{
  return Measure({2}, {{P("2:(1; {})"), Rational(7, 10)}, {P("2:(-1; {0:1})"), Rational(3, 10)}});
}

Measure balanced()
{
  return Measure({2}, {{P("2:(1; {})"), Rational(1, 2)}, {P("2:(-1; {0:1})"), Rational(1, 2)}});
}

} // namespace

TEST_CASE("measure validation")
{
  const ProductElem a = P("2:(1; {})"), b = P("2:(-1; {})");
  CHECK_THROWS_AS(Measure({2}, {{a, Rational(1, 2)}, {b, Rational(1, 3)}}), std::invalid_argument);
  CHECK_THROWS_AS(Measure({2}, {{a, Rational(1, 2)}, {a, Rational(1, 2)}}), std::invalid_argument);
  CHECK_THROWS_AS(Measure({2}, {{a, Rational(3, 2)}, {b, Rational(-1, 2)}}), std::invalid_argument);
  CHECK_THROWS_AS(Measure({3}, {{a, Rational(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(Measure({2}, {}), std::invalid_argument);
}

TEST_CASE("drift and first moment examples")
{
  CHECK(drift(delta("[2:(0; {})]"), 0) == Rational(0));
  CHECK(drift(drift04(), 0) == Rational(2, 5));
  const Measure two = delta("[2:(1; {}), 3:(-2; {})]");
  CHECK(drift(two, 0) == Rational(1));
  CHECK(drift(two, 1) == Rational(-2));

  CHECK(first_moment(delta("[2:(0; {})]")) == Rational(0));
  CHECK(first_moment(delta("[2:(1; {})]")) == Rational(1));
  // gauge_T((-1, {0:1})) = 1, so the balanced measure has first moment 1.
  CHECK(first_moment(balanced()) == Rational(1));
}

TEST_CASE("sampling thresholds are exact")
{
  const Measure mu = balanced();
  CHECK(mu.sample(0) == 0);
  CHECK(mu.sample((std::uint64_t{1} << 63) - 1) == 0);
  CHECK(mu.sample(std::uint64_t{1} << 63) == 1);
  CHECK(mu.sample(~std::uint64_t{5592132763777985307ULL}) == 1);
  const Measure thirds({2}, {{P("2:(1; {})"), Rational(1, 3)},
                             {P("2:(-1; {})"), Rational(1, 3)},
                             {P("2:(0; {0:1})"), Rational(1, 3)}});
  // floor(2^64 / 3) = 0x5555555555555555; 3 * that < 2^64.
  CHECK(thirds.sample(0x5555555555555555ULL) == 0);
  CHECK(thirds.sample(0x5555555555555556ULL) == 1);
  CHECK(thirds.sample(0xAAAAAAAAAAAAAAAAULL) == 1);
  CHECK(thirds.sample(0xAAAAAAAAAAAAAAABULL) == 2);
}

TEST_CASE("point mass walks are powers")
{
  const Measure mu = delta("[2:(1; {0:1}), 3:(-1; {2:2})]");
  TrajectoryOptions opt;
  opt.keep_all = true;
  const Trajectory t = run_trajectory(mu, 12, 5, opt);
  REQUIRE(t.all.size() == 13);
  for (Index n = 0; n <= 12; ++n)
    CHECK(t.all[static_cast<std::size_t>(n)] == power(mu.atoms()[0].element, n));

  const WalkReport r = rate_of_escape(delta("[2:(1; {})]"), 500, 7, 3, 20);
  CHECK(r.factors[0].rate_mean == 1.0);
  CHECK(r.factors[0].rate_stderr == 0.0);
  CHECK(r.factors[0].random_end == 7);
  const WalkReport down = rate_of_escape(delta("[2:(-1; {})]"), 500, 7, 3, 20);
  CHECK(down.factors[0].omega == 7);
}

TEST_CASE("right-walk recursion and series invariants")
{
  gen::Engine e(41);
  for (int t = 0; t < 20; ++t) {
    const auto moduli = gen::moduli(e);
    std::vector<Atom> atoms;
    const int k = static_cast<int>(gen::integer(e, 1, 4));
    for (int i = 0; i < k; ++i)
      atoms.push_back({gen::product(e, moduli, 2), Rational(1, k)});
    std::optional<Measure> maybe;
    try {
      maybe.emplace(moduli, atoms);
    } catch (const std::invalid_argument &) {
      continue; // duplicate atom drawn
    }
    const Measure &mu = *maybe;
    TrajectoryOptions opt;
    opt.keep_all = true;
    const Trajectory tr = run_trajectory(mu, 200, e(), opt);
    Index bound = 0;
    std::vector<Index> h(moduli.size(), 0);
    for (std::size_t m = 1; m <= 200; ++m) {
      const ProductElem &x = mu.atoms()[tr.steps[m - 1]].element;
      REQUIRE(tr.all[m] == compose(tr.all[m - 1], x));
      bound += gauge_P(x);
      for (std::size_t j = 0; j < moduli.size(); ++j) {
        h[j] += horocyclic(x.factors[j]);
        const auto &s = tr.factors[j];
        REQUIRE(s.h[m] == h[j]);
        REQUIRE(s.dist[m] == gauge_T(tr.all[m].factors[j]));
        REQUIRE(std::abs(s.h[m]) <= s.dist[m]);
        REQUIRE(s.dist[m] <= bound);
      }
    }
    REQUIRE(tr.position == tr.all.back());
  }
}

TEST_CASE("trajectories are deterministic and frozen")
{
  const Measure mu = drift04();
  const Trajectory a = run_trajectory(mu, 1000, 99), b = run_trajectory(mu, 1000, 99);
  CHECK(a.steps == b.steps);
  CHECK(a.position == b.position);
  CHECK(trial_seed(42, 0) != trial_seed(42, 1));
  CHECK(trial_seed(42, 7) == trial_seed(42, 7));

  // Golden values: the seed -> trajectory map must not drift.
  const Trajectory g = run_trajectory(mu, 24, trial_seed(42, 0));
  std::string steps;
  for (auto s : g.steps)
    steps += static_cast<char>('0' + s);
  CHECK(trial_seed(42, 0) == std::uint64_t{5592132763777985307ULL});
  CHECK(steps == "110000000101000000000001");
}

TEST_CASE("two-step distribution matches the exact convolution")
{
  const Measure mu = drift04();
  std::map<std::string, Rational> exact;
  for (auto const &x : mu.atoms())
    for (auto const &y : mu.atoms())
      exact[to_string(compose(x.element, y.element))] += x.weight * y.weight;
  REQUIRE(exact.size() == 4);

  const std::size_t N = 100000;
  std::map<std::string, std::size_t> counts;
  for (std::size_t s = 0; s < N; ++s)
    ++counts[to_string(run_trajectory(mu, 2, trial_seed(7, s)).position)];
  REQUIRE(counts.size() == 4);
  for (auto const &[g, p] : exact) {
    const double pv = boost::rational_cast<double>(p);
    const double sigma = std::sqrt(pv * (1 - pv) / N);
    CHECK(std::abs(static_cast<double>(counts[g]) / N - pv) <= 3 * sigma);
  }
}

TEST_CASE("rate of escape examples")
{
  const WalkReport r = rate_of_escape(drift04(), 20000, 200, 42, 20);
  CHECK(std::abs(r.factors[0].rate_mean - 0.4) <= 0.05);
  CHECK(std::abs(r.factors[0].h_drift_mean - 0.4) <= 0.05);
  CHECK(r.factors[0].random_end >= 190);

  const WalkReport z = rate_of_escape(balanced(), 20000, 100, 43, 20);
  CHECK(std::abs(z.factors[0].rate_mean) <= 0.05);
}

TEST_CASE("reports are independent of the thread count")
{
  const Measure mu = drift04();
  CHECK(to_json(rate_of_escape(mu, 3000, 40, 5, 10, 1)) == to_json(rate_of_escape(mu, 3000, 40, 5, 10, 4)));
  const std::string csv = to_csv(rate_of_escape(mu, 100, 3, 5, 10));
  CHECK(csv.rfind("factor,", 0) == 0);
}

TEST_CASE("regularity statistics")
{
  const Trajectory d = run_trajectory(delta("[2:(2; {0:1})]"), 100, 1);
  const RegularityStats s = regularity_stats(d, 0);
  CHECK(s.max_step == 2);
  CHECK(s.step_distance.back() == doctest::Approx(2.0 / 100));
  CHECK(s.escape.back() == doctest::Approx(2.0));

  const Measure mu = drift04();
  Index max_gauge = 0;
  for (auto const &a : mu.atoms())
    max_gauge = std::max(max_gauge, gauge_P(a.element));
  const RegularityStats long_run = regularity_stats(run_trajectory(mu, 20000, 8), 0);
  CHECK(long_run.max_step <= max_gauge);
  CHECK(std::abs(long_run.escape.back() - 0.4) <= 0.05);

  TrajectoryOptions opt;
  opt.keep_all = true;
  const Trajectory t = run_trajectory(mu, 200, 8, opt);
  const RegularityStats r = regularity_stats(t, 0);
  for (std::size_t m = 1; m <= 200; ++m) {
    const Index step = distance(act_vertex(t.all[m - 1].factors[0], Vertex::root(2)),
                                act_vertex(t.all[m].factors[0], Vertex::root(2)));
    REQUIRE(r.step_distance[m - 1] == doctest::Approx(static_cast<double>(step) / static_cast<double>(m)));
  }
}

TEST_CASE("verdicts")
{
  CHECK(convergence_verdict(run_trajectory(delta("[2:(1; {})]"), 30, 1), 0, 30) == Verdict::random_end);
  CHECK(convergence_verdict(run_trajectory(delta("[2:(-1; {})]"), 30, 1), 0, 20) == Verdict::omega);
  CHECK(convergence_verdict(run_trajectory(delta("[2:(0; {0:1})]"), 30, 1), 0, 5) == Verdict::undecided);
  CHECK_THROWS_AS(convergence_verdict(run_trajectory(delta("[2:(1; {})]"), 3, 1), 0, 0), std::invalid_argument);
  CHECK(to_string(Verdict::random_end) == "random_end");
}

TEST_CASE("mean and standard error")
{
  auto [m, se] = mean_stderr({1.0, 2.0, 3.0, 4.0});
  CHECK(m == doctest::Approx(2.5));
  CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}
