#pragma once

#include <map>
#include <string>
#include <vector>

#include "treewalk/scale.hpp"
#include "treewalk/walk.hpp"

namespace treewalk {

using Word = std::vector<Digit>;

/// Empirical hitting measure of one factor on cylinders of a fixed depth.
struct CylinderHistogram {
  std::size_t factor = 0;
  std::uint32_t q = 2;
  Index low = 0;   ///< index of the first digit of each word
  Index depth = 0; ///< word length
  std::map<Word, std::uint64_t> counts;
  std::uint64_t total = 0, omega = 0, undecided = 0;

  std::uint64_t decided() const { return total - undecided; }
};

/**
 * Hitting data for depth D: per factor, the limit words over
 * [-W, D + W), where W bounds every atom's shift and translation offsets, so
 * that one step of the walk can be applied to a cylinder exactly. Verdicts use
 * stabilization depth D + W.
 */
struct HittingData {
  Index depth = 0;
  Index pad = 0;
  std::vector<CylinderHistogram> padded;
};

HittingData hitting_data(const Measure &mu, Index n, std::size_t trials, Index depth,
                         std::uint64_t master_seed, unsigned threads = 1);

/// The marginal on the digits [0, d) of a padded histogram.
CylinderHistogram marginal(const HittingData &data, std::size_t j, Index d);

/// Depth-D histograms, one per factor.
std::vector<CylinderHistogram> hitting_histogram(const Measure &mu, Index n, std::size_t trials, Index depth,
                                                 std::uint64_t master_seed, unsigned threads = 1);

std::string word_text(const Word &w, std::uint32_t q);
/// `depth,word,count` rows for depths 1..D of one factor.
std::string histogram_csv(const HittingData &data, std::size_t j);

struct StationarityResult {
  Rational tv_gap;
  double radius = 0;          ///< 3 sigma multinomial radius: 1.5 * sum_c sqrt(p(1-p)/N)
  double max_cylinder_mass = 0;
  double max_cylinder_stderr = 0;
  double omega_mass = 0, omega_stderr = 0;
  double undecided_mass = 0;
  bool undecided_flag = false; ///< undecided mass above 1%
};

/// TV distance between nu and sum_g mu(g) g_* nu on the depth-D cylinders
/// (and omega) of factor j, over the decided trials.
StationarityResult stationarity_gap(const Measure &mu, const HittingData &data, std::size_t j);

struct TemperateGaugeSpec {
  BoundaryPoint u;
  Index n = 0;
  std::vector<Rational> m1;

  /// floor(n |m1_j|): the ray index of the anchor in factor j.
  std::vector<Index> anchor_index() const;
  std::vector<Vertex> anchors() const;
};

Index gauge_value(const ProductElem &g, const TemperateGaugeSpec &spec);
/// Pi_n(u): per factor the element (k, r) taking o to the anchor (k; r).
ProductElem approximation_map(const TemperateGaugeSpec &spec);

/// Limit-point estimate of factor j from a trajectory run to step N: digits
/// below the lowest level reached after step n (less the atoms' reach below
/// their shift), padded with zeros. omega for non-positive drift.
End estimated_limit(const Measure &mu, const Trajectory &t, std::size_t j, Index n);

struct SeriesPoint {
  Index n = 0;
  double mean = 0, std_error = 0;
};

/// Mean over trials of (1/n) |R_n|_{A(n)(u)} with u the trial's estimated limit.
std::vector<SeriesPoint> gauge_sublinearity(const Measure &mu, const std::vector<Index> &n_grid,
                                            std::size_t trials, std::uint64_t master_seed, Index margin = 2000,
                                            unsigned threads = 1);
/// Mean over trials of (1/n) |R_n^{-1} Pi_n(u)|_P.
std::vector<SeriesPoint> approximation_gap(const Measure &mu, const std::vector<Index> &n_grid,
                                           std::size_t trials, std::uint64_t master_seed, Index margin = 2000,
                                           unsigned threads = 1);

/// Number of vertex tuples x with sum_i d(o_i, x_i) <= j, for j = 0..radius.
/// Haar measure normalized on stab(o) equals this count.
std::vector<std::uint64_t> ball_growth(const std::vector<std::uint32_t> &moduli, Index radius);

struct TrivialityResult {
  bool trivial = false;
  std::vector<Rational> drifts;
  std::string explanation;
};

/// Trivial iff every factor drift is <= 0. Throws HypothesisFailure when the
/// support is fully exceptional.
TrivialityResult triviality_check(const Measure &mu);

} // namespace treewalk
