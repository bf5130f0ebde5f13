#include "treewalk/walk.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace treewalk {

Measure::Measure(std::vector<std::uint32_t> moduli, std::vector<Atom> atoms)
    : moduli_(std::move(moduli)), atoms_(std::move(atoms))
{
  if (moduli_.empty())
    throw std::invalid_argument("measure needs at least one factor");
  if (atoms_.empty())
    throw std::invalid_argument("measure needs at least one atom");
  Rational total = 0;
  std::set<std::string> seen;
  for (auto const &a : atoms_) {
    if (a.element.moduli() != moduli_)
      throw std::invalid_argument("atom " + to_string(a.element) + " does not match the product moduli");
    if (a.weight <= Rational(0))
      throw std::invalid_argument("atom weights must be positive");
    if (!seen.insert(to_string(a.element)).second)
      throw std::invalid_argument("duplicate atom " + to_string(a.element));
    total += a.weight;
    cumulative_.push_back(total);
  }
  if (total != Rational(1))
    throw std::invalid_argument("atom weights sum to " + to_string(total) + ", not 1");
}

std::size_t Measure::sample(std::uint64_t u) const
{
  using u128 = unsigned __int128;
  for (std::size_t i = 0; i + 1 < cumulative_.size(); ++i) {
    const auto &c = cumulative_[i];
    // u < 2^64 * num / den  <=>  u * den < num * 2^64
    if (static_cast<u128>(u) * static_cast<u128>(c.denominator()) <
        (static_cast<u128>(c.numerator()) << 64))
      return i;
  }
  return cumulative_.size() - 1;
}

Index Measure::max_reach() const
{
  Index reach = 0;
  for (auto const &a : atoms_)
    for (auto const &f : a.element.factors) {
      reach = std::max(reach, std::abs(f.shift()));
      if (!f.translation().empty()) {
        reach = std::max(reach, std::abs(*f.translation().valuation()));
        reach = std::max(reach, std::abs(*f.translation().top()));
      }
    }
  return reach;
}

Index Measure::min_offset(std::size_t j) const
{
  Index lo = 0;
  for (auto const &a : atoms_)
    lo = std::min(lo, valuation_or_inf(a.element.factors.at(j).translation()));
  return lo;
}

Rational drift(const Measure &mu, std::size_t j)
{
  Rational m = 0;
  for (auto const &a : mu.atoms())
    m += a.weight * a.element.factors.at(j).shift();
  return m;
}

Rational first_moment(const Measure &mu)
{
  Rational m = 0;
  for (auto const &a : mu.atoms())
    m += a.weight * gauge_P(a.element);
  return m;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial)
{
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(master_seed ^ mix(trial));
}

Trajectory run_trajectory(const Measure &mu, Index n, std::uint64_t seed, const TrajectoryOptions &options)
{
  if (n < 1)
    throw std::invalid_argument("trajectory length must be at least 1");
  const std::size_t k = mu.factor_count();
  Trajectory t;
  t.seed = seed;
  t.position = ProductElem::identity(mu.moduli());
  t.steps.reserve(static_cast<std::size_t>(n));
  t.factors.resize(k);
  for (auto &f : t.factors) {
    f.h.reserve(static_cast<std::size_t>(n) + 1);
    f.dist.reserve(static_cast<std::size_t>(n) + 1);
    f.low_touch.reserve(static_cast<std::size_t>(n) + 1);
    f.h.push_back(0);
    f.dist.push_back(0);
    f.low_touch.push_back(kInfiniteValuation);
  }
  std::set<Index> wanted(options.checkpoints.begin(), options.checkpoints.end());
  if (wanted.count(0))
    t.checkpoints.emplace_back(0, t.position);
  if (options.keep_all)
    t.all.push_back(t.position);

  std::mt19937_64 gen(seed);
  for (Index m = 1; m <= n; ++m) {
    const std::size_t i = mu.sample(gen());
    t.steps.push_back(static_cast<std::uint32_t>(i));
    const ProductElem &x = mu.atoms()[i].element;
    for (std::size_t j = 0; j < k; ++j) {
      AffineElem &r = t.position.factors[j];
      const Digits &b = x.factors[j].translation();
      auto &series = t.factors[j];
      series.low_touch.push_back(b.empty() ? kInfiniteValuation : *b.valuation() + r.shift());
      r.compose_in_place(x.factors[j]);
      const Index level = r.shift();
      const Index low = std::min<Index>({0, level, valuation_or_inf(r.translation())});
      series.h.push_back(level);
      series.dist.push_back(level - 2 * low);
    }
    if (wanted.count(m))
      t.checkpoints.emplace_back(m, t.position);
    if (options.keep_all)
      t.all.push_back(t.position);
  }
  return t;
}

std::string to_string(Verdict v)
{
  switch (v) {
  case Verdict::omega:
    return "omega";
  case Verdict::random_end:
    return "random_end";
  case Verdict::undecided:
    break;
  }
  return "undecided";
}

Verdict convergence_verdict(const Trajectory &t, std::size_t j, Index D)
{
  if (D < 1)
    throw std::invalid_argument("stabilization depth must be at least 1");
  const auto &s = t.factors.at(j);
  const std::size_t n = s.h.size() - 1;
  if (s.h[n] >= D) {
    std::size_t crossing = n;
    while (crossing > 0 && s.h[crossing - 1] >= D)
      --crossing;
    for (std::size_t m = n; m > crossing; --m)
      if (s.low_touch[m] < D)
        return Verdict::undecided;
    return Verdict::random_end;
  }
  if (s.h[n] < -D && s.h[n] < s.h[n / 2])
    return Verdict::omega;
  return Verdict::undecided;
}

RegularityStats regularity_stats(const Trajectory &t, std::size_t j)
{
  const auto &s = t.factors.at(j);
  RegularityStats out;
  for (std::size_t m = 1; m < s.h.size(); ++m) {
    const Index low = std::min({s.h[m - 1], s.h[m], s.low_touch[m]});
    const Index step = s.h[m - 1] + s.h[m] - 2 * low;
    out.max_step = std::max(out.max_step, step);
    out.step_distance.push_back(static_cast<double>(step) / static_cast<double>(m));
    out.escape.push_back(static_cast<double>(s.dist[m]) / static_cast<double>(m));
  }
  return out;
}

void for_each_trial(std::size_t trials, unsigned threads, const std::function<void(std::size_t)> &body)
{
  if (threads <= 1 || trials <= 1) {
    for (std::size_t i = 0; i < trials; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, trials); ++w)
    pool.emplace_back(worker);
  for (auto &th : pool)
    th.join();
  if (error)
    std::rethrow_exception(error);
}

std::pair<double, double> mean_stderr(const std::vector<double> &xs)
{
  if (xs.empty())
    return {0.0, 0.0};
  double mean = 0;
  for (double x : xs)
    mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2)
    return {mean, 0.0};
  double ss = 0;
  for (double x : xs)
    ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

WalkReport rate_of_escape(const Measure &mu, Index n, std::size_t trials, std::uint64_t master_seed,
                          Index depth, unsigned threads)
{
  if (trials < 1)
    throw std::invalid_argument("at least one trial is required");
  const std::size_t k = mu.factor_count();
  struct TrialResult {
    std::vector<double> rate, hdrift;
    std::vector<Verdict> verdict;
  };
  std::vector<TrialResult> results(trials);
  for_each_trial(trials, threads, [&](std::size_t trial) {
    Trajectory t = run_trajectory(mu, n, trial_seed(master_seed, trial));
    auto &r = results[trial];
    for (std::size_t j = 0; j < k; ++j) {
      r.rate.push_back(static_cast<double>(t.factors[j].dist.back()) / static_cast<double>(n));
      r.hdrift.push_back(static_cast<double>(t.factors[j].h.back()) / static_cast<double>(n));
      r.verdict.push_back(convergence_verdict(t, j, depth));
    }
  });

  WalkReport report;
  report.trials = trials;
  report.horizon = n;
  report.depth = depth;
  report.master_seed = master_seed;
  for (std::size_t j = 0; j < k; ++j) {
    FactorReport f;
    f.factor = j;
    f.drift_exact = drift(mu, j);
    std::vector<double> rate, hdrift;
    for (auto const &r : results) {
      rate.push_back(r.rate[j]);
      hdrift.push_back(r.hdrift[j]);
      switch (r.verdict[j]) {
      case Verdict::omega:
        ++f.omega;
        break;
      case Verdict::random_end:
        ++f.random_end;
        break;
      case Verdict::undecided:
        ++f.undecided;
        break;
      }
    }
    std::tie(f.rate_mean, f.rate_stderr) = mean_stderr(rate);
    std::tie(f.h_drift_mean, f.h_drift_stderr) = mean_stderr(hdrift);
    report.factors.push_back(f);
  }
  return report;
}

std::string to_json(const WalkReport &r)
{
  nlohmann::ordered_json j;
  j["trials"] = r.trials;
  j["horizon"] = r.horizon;
  j["depth"] = r.depth;
  j["master_seed"] = r.master_seed;
  j["factors"] = nlohmann::ordered_json::array();
  for (auto const &f : r.factors) {
    nlohmann::ordered_json row;
    row["factor"] = f.factor;
    row["rate_mean"] = f.rate_mean;
    row["rate_stderr"] = f.rate_stderr;
    row["h_drift_mean"] = f.h_drift_mean;
    row["h_drift_stderr"] = f.h_drift_stderr;
    row["drift_exact"] = to_string(f.drift_exact);
    row["verdict_counts"] = {{"omega", f.omega}, {"random_end", f.random_end}, {"undecided", f.undecided}};
    j["factors"].push_back(row);
  }
  return j.dump(2) + "\n";
}

std::string to_csv(const WalkReport &r)
{
  std::ostringstream os;
  os << std::setprecision(12);
  os << "factor,rate_mean,rate_stderr,h_drift_mean,h_drift_stderr,drift_exact,omega,random_end,undecided\n";
  for (auto const &f : r.factors)
    os << f.factor << ',' << f.rate_mean << ',' << f.rate_stderr << ',' << f.h_drift_mean << ','
       << f.h_drift_stderr << ',' << to_string(f.drift_exact) << ',' << f.omega << ',' << f.random_end
       << ',' << f.undecided << '\n';
  return os.str();
}

} // namespace treewalk
