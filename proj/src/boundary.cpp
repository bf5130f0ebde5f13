#include "treewalk/boundary.hpp"

#include <cmath>
#include <optional>
#include <set>
#include <sstream>

namespace treewalk {

namespace {

Index floor_abs_times(const Rational &r, Index n)
{
  const std::int64_t num = r.numerator() < 0 ? -r.numerator() : r.numerator();
  return static_cast<Index>(static_cast<__int128>(num) * n / r.denominator());
}

std::vector<SeriesPoint> gauge_series(const Measure &mu, const std::vector<Index> &n_grid, std::size_t trials,
                                      std::uint64_t master_seed, Index margin, unsigned threads,
                                      bool approximation)
{
  if (n_grid.empty())
    throw std::invalid_argument("empty horizon grid");
  const Index horizon = *std::max_element(n_grid.begin(), n_grid.end()) + margin;
  std::vector<Rational> m1;
  for (std::size_t j = 0; j < mu.factor_count(); ++j)
    m1.push_back(drift(mu, j));

  std::vector<std::vector<double>> values(trials, std::vector<double>(n_grid.size()));
  for_each_trial(trials, threads, [&](std::size_t trial) {
    TrajectoryOptions opts;
    opts.checkpoints = n_grid;
    const Trajectory t = run_trajectory(mu, horizon, trial_seed(master_seed, trial), opts);
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
      const Index n = n_grid[g];
      const ProductElem *rn = nullptr;
      for (auto const &[step, elem] : t.checkpoints)
        if (step == n)
          rn = &elem;
      TemperateGaugeSpec spec;
      spec.n = n;
      spec.m1 = m1;
      for (std::size_t j = 0; j < mu.factor_count(); ++j)
        spec.u.factors.push_back(estimated_limit(mu, t, j, n));
      const Index value =
          approximation ? gauge_P(compose(inverse(*rn), approximation_map(spec))) : gauge_value(*rn, spec);
      values[trial][g] = static_cast<double>(value) / static_cast<double>(n);
    }
  });

  std::vector<SeriesPoint> out;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    std::vector<double> xs;
    for (auto const &row : values)
      xs.push_back(row[g]);
    auto [mean, se] = mean_stderr(xs);
    out.push_back({n_grid[g], mean, se});
  }
  return out;
}

} // namespace

HittingData hitting_data(const Measure &mu, Index n, std::size_t trials, Index depth, std::uint64_t master_seed,
                         unsigned threads)
{
  if (depth < 1)
    throw std::invalid_argument("histogram depth must be at least 1");
  if (depth > 16)
    throw std::invalid_argument("histogram depth above 16 is not supported");
  if (n <= depth)
    throw std::invalid_argument("walk length must exceed the histogram depth");
  const Index pad = mu.max_reach();
  const Index stable = depth + pad;
  const std::size_t k = mu.factor_count();

  struct Outcome {
    Verdict verdict;
    Word word;
  };
  std::vector<std::vector<Outcome>> outcomes(trials);
  for_each_trial(trials, threads, [&](std::size_t trial) {
    const Trajectory t = run_trajectory(mu, n, trial_seed(master_seed, trial));
    for (std::size_t j = 0; j < k; ++j) {
      Outcome o{convergence_verdict(t, j, stable), {}};
      if (o.verdict == Verdict::random_end)
        for (Index i = -pad; i < depth + pad; ++i)
          o.word.push_back(t.position.factors[j].translation().at(i));
      outcomes[trial].push_back(std::move(o));
    }
  });

  HittingData data;
  data.depth = depth;
  data.pad = pad;
  for (std::size_t j = 0; j < k; ++j) {
    CylinderHistogram h;
    h.factor = j;
    h.q = mu.moduli()[j];
    h.low = -pad;
    h.depth = depth + 2 * pad;
    h.total = trials;
    for (auto const &row : outcomes) {
      switch (row[j].verdict) {
      case Verdict::omega:
        ++h.omega;
        break;
      case Verdict::undecided:
        ++h.undecided;
        break;
      case Verdict::random_end:
        ++h.counts[row[j].word];
        break;
      }
    }
    data.padded.push_back(std::move(h));
  }
  return data;
}

CylinderHistogram marginal(const HittingData &data, std::size_t j, Index d)
{
  if (d < 0 || d > data.depth)
    throw std::invalid_argument("marginal depth outside the histogram");
  const CylinderHistogram &src = data.padded.at(j);
  CylinderHistogram out = src;
  out.low = 0;
  out.depth = d;
  out.counts.clear();
  for (auto const &[w, c] : src.counts) {
    auto first = w.begin() + static_cast<std::ptrdiff_t>(data.pad);
    out.counts[Word(first, first + static_cast<std::ptrdiff_t>(d))] += c;
  }
  return out;
}

std::vector<CylinderHistogram> hitting_histogram(const Measure &mu, Index n, std::size_t trials, Index depth,
                                                 std::uint64_t master_seed, unsigned threads)
{
  const HittingData data = hitting_data(mu, n, trials, depth, master_seed, threads);
  std::vector<CylinderHistogram> out;
  for (std::size_t j = 0; j < data.padded.size(); ++j)
    out.push_back(marginal(data, j, depth));
  return out;
}

std::string word_text(const Word &w, std::uint32_t q)
{
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (q > 10 && i)
      out += '.';
    out += std::to_string(w[i]);
  }
  return out;
}

std::string histogram_csv(const HittingData &data, std::size_t j)
{
  std::ostringstream os;
  os << "depth,word,count\n";
  for (Index d = 1; d <= data.depth; ++d) {
    const CylinderHistogram h = marginal(data, j, d);
    for (auto const &[w, c] : h.counts)
      os << d << ',' << word_text(w, h.q) << ',' << c << '\n';
    os << d << ",omega," << h.omega << '\n';
    os << d << ",undecided," << h.undecided << '\n';
  }
  return os.str();
}

StationarityResult stationarity_gap(const Measure &mu, const HittingData &data, std::size_t j)
{
  const CylinderHistogram &padded = data.padded.at(j);
  const CylinderHistogram cyl = marginal(data, j, data.depth);
  const std::uint64_t decided = padded.decided();
  StationarityResult r;
  r.undecided_mass = padded.total ? static_cast<double>(padded.undecided) / static_cast<double>(padded.total) : 0;
  r.undecided_flag = r.undecided_mass > 0.01;
  if (decided == 0)
    return r;

  using Key = std::optional<Word>; // nullopt is omega
  const auto N = static_cast<std::int64_t>(decided);
  std::map<Key, Rational> nu, pushed;
  for (auto const &[w, c] : cyl.counts)
    nu[w] += Rational(static_cast<std::int64_t>(c), N);
  if (cyl.omega)
    nu[std::nullopt] += Rational(static_cast<std::int64_t>(cyl.omega), N);

  const std::uint32_t q = padded.q;
  for (auto const &atom : mu.atoms()) {
    const AffineElem &g = atom.element.factors[j];
    if (padded.omega)
      pushed[std::nullopt] += atom.weight * Rational(static_cast<std::int64_t>(padded.omega), N);
    for (auto const &[w, c] : padded.counts) {
      Word image;
      for (Index i = 0; i < data.depth; ++i) {
        const Index src = i - g.shift() + data.pad;
        image.push_back((w.at(static_cast<std::size_t>(src)) + g.translation().at(i)) % q);
      }
      pushed[image] += atom.weight * Rational(static_cast<std::int64_t>(c), N);
    }
  }

  std::set<Key> keys;
  for (auto const &[k, v] : nu)
    keys.insert(k);
  for (auto const &[k, v] : pushed)
    keys.insert(k);
  Rational tv = 0;
  for (auto const &k : keys) {
    const Rational a = nu.count(k) ? nu[k] : Rational(0);
    const Rational b = pushed.count(k) ? pushed[k] : Rational(0);
    tv += a > b ? a - b : b - a;
  }
  r.tv_gap = tv / 2;

  const double n = static_cast<double>(decided);
  double sigma_sum = 0;
  for (auto const &[k, v] : nu) {
    const double p = boost::rational_cast<double>(v);
    sigma_sum += std::sqrt(p * (1 - p) / n);
    if (k && p > r.max_cylinder_mass) {
      r.max_cylinder_mass = p;
      r.max_cylinder_stderr = std::sqrt(p * (1 - p) / n);
    }
  }
  r.radius = 1.5 * sigma_sum;
  const double total = static_cast<double>(padded.total);
  r.omega_mass = static_cast<double>(padded.omega) / total;
  r.omega_stderr = std::sqrt(r.omega_mass * (1 - r.omega_mass) / total);
  return r;
}

std::vector<Index> TemperateGaugeSpec::anchor_index() const
{
  std::vector<Index> out;
  for (auto const &m : m1)
    out.push_back(floor_abs_times(m, n));
  return out;
}

std::vector<Vertex> TemperateGaugeSpec::anchors() const
{
  if (u.factors.size() != m1.size())
    throw std::invalid_argument("boundary point and drift vector differ in length");
  const auto idx = anchor_index();
  std::vector<Vertex> out;
  for (std::size_t j = 0; j < m1.size(); ++j)
    out.push_back(ray_vertex(u.factors[j], idx[j], Vertex::root(u.factors[j].modulus())));
  return out;
}

Index gauge_value(const ProductElem &g, const TemperateGaugeSpec &spec)
{
  const auto anchors = spec.anchors();
  if (anchors.size() != g.size())
    throw std::invalid_argument("gauge spec does not match the element");
  Index total = 0;
  for (std::size_t j = 0; j < g.size(); ++j)
    total += distance(anchors[j], act_vertex(g.factors[j], Vertex::root(g.factors[j].modulus())));
  return total;
}

ProductElem approximation_map(const TemperateGaugeSpec &spec)
{
  ProductElem out;
  for (auto const &x : spec.anchors())
    out.factors.emplace_back(x.level(), x.residue());
  return out;
}

End estimated_limit(const Measure &mu, const Trajectory &t, std::size_t j, Index n)
{
  const std::uint32_t q = mu.moduli().at(j);
  if (drift(mu, j) <= Rational(0))
    return End::omega(q);
  const auto &h = t.factors.at(j).h;
  if (n < 0 || static_cast<std::size_t>(n) >= h.size())
    throw std::invalid_argument("estimate step outside the trajectory");
  Index low = h[static_cast<std::size_t>(n)];
  for (std::size_t m = static_cast<std::size_t>(n); m < h.size(); ++m)
    low = std::min(low, h[m]);
  low += mu.min_offset(j);
  return End::stream(truncate_below(t.position.factors[j].translation(), low), low, {0});
}

std::vector<SeriesPoint> gauge_sublinearity(const Measure &mu, const std::vector<Index> &n_grid,
                                            std::size_t trials, std::uint64_t master_seed, Index margin,
                                            unsigned threads)
{
  return gauge_series(mu, n_grid, trials, master_seed, margin, threads, false);
}

std::vector<SeriesPoint> approximation_gap(const Measure &mu, const std::vector<Index> &n_grid,
                                           std::size_t trials, std::uint64_t master_seed, Index margin,
                                           unsigned threads)
{
  return gauge_series(mu, n_grid, trials, master_seed, margin, threads, true);
}

std::vector<std::uint64_t> ball_growth(const std::vector<std::uint32_t> &moduli, Index radius)
{
  std::vector<std::uint64_t> tuples(static_cast<std::size_t>(radius) + 1, 0);
  tuples[0] = 1;
  for (auto q : moduli) {
    std::vector<std::uint64_t> sphere(static_cast<std::size_t>(radius) + 1, 0);
    for (auto const &v : ball(Vertex::root(q), radius))
      ++sphere[static_cast<std::size_t>(norm(v))];
    std::vector<std::uint64_t> next(tuples.size(), 0);
    for (std::size_t a = 0; a < tuples.size(); ++a)
      for (std::size_t b = 0; a + b < tuples.size(); ++b)
        next[a + b] += tuples[a] * sphere[b];
    tuples = std::move(next);
  }
  for (std::size_t j = 1; j < tuples.size(); ++j)
    tuples[j] += tuples[j - 1];
  return tuples;
}

TrivialityResult triviality_check(const Measure &mu)
{
  if (!transience_hypothesis(mu))
    throw HypothesisFailure("fully exceptional support");
  TrivialityResult r;
  r.trivial = true;
  std::ostringstream os;
  for (std::size_t j = 0; j < mu.factor_count(); ++j) {
    const Rational m = drift(mu, j);
    r.drifts.push_back(m);
    if (m > Rational(0))
      r.trivial = false;
    os << (j ? "; " : "") << "factor " << j << ": drift " << to_string(m) << (m > Rational(0) ? " > 0" : " <= 0");
  }
  os << (r.trivial ? " => trivial boundary" : " => non-trivial boundary");
  r.explanation = os.str();
  return r;
}

} // namespace treewalk
