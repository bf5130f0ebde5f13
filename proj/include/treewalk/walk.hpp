#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "treewalk/group.hpp"
#include "treewalk/text.hpp"

namespace treewalk {

struct Atom {
  ProductElem element;
  Rational weight;
};

/**
 * A finitely supported probability measure on the product group.
 *
 * Weights are exact rationals summing to 1. Sampling maps a uniform 64-bit
 * integer u to the first atom i with u < 2^64 * (w_0 + ... + w_i), compared
 * by cross-multiplication so balanced measures stay exactly balanced.
 */
class Measure {
public:
  Measure(std::vector<std::uint32_t> moduli, std::vector<Atom> atoms);

  const std::vector<std::uint32_t> &moduli() const noexcept { return moduli_; }
  const std::vector<Atom> &atoms() const noexcept { return atoms_; }
  std::size_t factor_count() const noexcept { return moduli_.size(); }

  std::size_t sample(std::uint64_t u) const;

  /// Largest |index offset| of a translation digit or shift among the atoms.
  Index max_reach() const;
  /// Smallest translation index over all atoms in factor j (0 if none is negative).
  Index min_offset(std::size_t j) const;

private:
  std::vector<std::uint32_t> moduli_;
  std::vector<Atom> atoms_;
  std::vector<Rational> cumulative_;
};

Rational drift(const Measure &mu, std::size_t j);
Rational first_moment(const Measure &mu);

/// Seed of the per-trial generator: a SplitMix64 hash of (master_seed, trial).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial);

struct FactorSeries {
  std::vector<Index> h;         ///< h_j(R_m o_j), m = 0..n
  std::vector<Index> dist;      ///< d(o_j, R_m o_j), m = 0..n
  std::vector<Index> low_touch; ///< lowest translation index written at step m (kInfiniteValuation if none)
};

struct TrajectoryOptions {
  std::vector<Index> checkpoints; ///< steps at which R_m is copied out
  bool keep_all = false;          ///< keep every R_m (memory heavy)
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> steps; ///< sampled atom index of X_1..X_n
  std::vector<FactorSeries> factors;
  ProductElem position;             ///< R_n
  std::vector<std::pair<Index, ProductElem>> checkpoints;
  std::vector<ProductElem> all;     ///< R_0..R_n when keep_all
};

/// Right random walk R_{m+1} = R_m X_{m+1}, X_m i.i.d. mu.
Trajectory run_trajectory(const Measure &mu, Index n, std::uint64_t seed,
                          const TrajectoryOptions &options = {});

enum class Verdict { omega, random_end, undecided };
std::string to_string(Verdict v);

/// Per-factor verdict at stabilization depth D.
///
/// random end: h_n >= D, and no translation digit below D was written after
/// the last up-crossing of D (h stays >= D from that crossing on).
/// omega: h_n < -D and h_n < h_{floor(n/2)}.
Verdict convergence_verdict(const Trajectory &t, std::size_t j, Index D);

struct RegularityStats {
  std::vector<double> step_distance; ///< (1/m) d(R_{m-1} o, R_m o), m = 1..n
  std::vector<double> escape;        ///< (1/m) |R_m o|, m = 1..n
  Index max_step = 0;
};
RegularityStats regularity_stats(const Trajectory &t, std::size_t j);

struct FactorReport {
  std::size_t factor = 0;
  double rate_mean = 0, rate_stderr = 0;
  double h_drift_mean = 0, h_drift_stderr = 0;
  Rational drift_exact;
  std::size_t omega = 0, random_end = 0, undecided = 0;
};

struct WalkReport {
  std::size_t trials = 0;
  Index horizon = 0;
  Index depth = 0;
  std::uint64_t master_seed = 0;
  std::vector<FactorReport> factors;
};

/// Runs `body(trial)` for trial = 0..trials-1 on `threads` workers.
void for_each_trial(std::size_t trials, unsigned threads, const std::function<void(std::size_t)> &body);

WalkReport rate_of_escape(const Measure &mu, Index n, std::size_t trials, std::uint64_t master_seed,
                          Index depth = 20, unsigned threads = 1);

std::string to_json(const WalkReport &r);
std::string to_csv(const WalkReport &r);

/// Sample mean and standard error of the mean.
std::pair<double, double> mean_stderr(const std::vector<double> &xs);

} // namespace treewalk
