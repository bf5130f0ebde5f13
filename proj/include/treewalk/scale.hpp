#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "treewalk/walk.hpp"

namespace treewalk {

/// The hypotheses of a theorem do not hold for the given input.
class HypothesisFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SubgroupSpec {
  std::vector<std::uint32_t> moduli;
  std::vector<ProductElem> generators;

  SubgroupSpec(std::vector<std::uint32_t> moduli, std::vector<ProductElem> generators);
};

struct ScaleResult {
  ProductElem element;
  std::vector<std::uint64_t> factor_scale;
  std::uint64_t total = 1;
  Rational modular; ///< Delta(g) = prod q_i^{-n_i}
};

/// Scale in the closed ambient affine group: s_i = q_i^{max(-n_i, 0)}.
ScaleResult scale_element(const ProductElem &g);

/// Brute-force [alpha(V) : V ∩ alpha(V)] per factor for V = stab(o) and
/// alpha = conjugation by g, counted modulo the digits at indices >= depth.
std::vector<std::uint64_t> scale_oracle(const ProductElem &g, Index depth);

enum class FactorClass { exceptional_horocyclic, exceptional_fixed_end, non_exceptional };
enum class SubgroupClass { fully_exceptional, partially_exceptional, not_partially_exceptional };

std::string to_string(FactorClass c);
std::string to_string(SubgroupClass c);
inline bool is_exceptional(FactorClass c) { return c != FactorClass::non_exceptional; }

FactorClass classify_factor(const SubgroupSpec &spec, std::size_t j);
SubgroupClass classify_subgroup(const SubgroupSpec &spec);

/// Distinct elements given by words of length 1..bound in the generators and
/// their inverses, in order of first appearance.
std::vector<ProductElem> sample_words(const SubgroupSpec &spec, std::size_t bound);

/**
 * Scale relative to the closed subgroup generated by a spec.
 *
 * Uses s(x) = lim_k |stab(o) x^{-k} o|^{1/k} with stab(o) taken inside the
 * subgroup. The zero-shift part of the subgroup is a space of digit tuples
 * over F_q spanned by the translation parts of zero-shift words and their
 * conjugates by reachable shift vectors; orbit sizes are q^rank of its
 * non-negative part projected below the orbit levels. The span is grown until
 * the rank increments stop changing. All moduli must be the same prime.
 */
class SubgroupScale {
public:
  explicit SubgroupScale(const SubgroupSpec &spec, std::size_t word_length = 4);

  std::uint64_t scale(const ProductElem &x);
  Rational modular(const ProductElem &x);

private:
  struct Basis;
  std::int64_t rank_increment(const std::vector<Index> &shift, Index radius);
  Basis &basis(Index radius);

  std::uint32_t q_;
  std::size_t factors_;
  std::vector<std::vector<Index>> generator_shifts_;
  std::vector<std::vector<Digits>> zero_shift_parts_;
  std::map<Index, std::shared_ptr<Basis>> cache_;
  std::map<std::vector<Index>, std::uint64_t> memo_;
};

enum class ScaleFrame { ambient, subgroup };

/// True iff every sampled word (and inverse) has scale 1 in the given frame.
bool is_uniscalar(const SubgroupSpec &spec, std::size_t bound, ScaleFrame frame = ScaleFrame::ambient);
/// True iff Delta(w) == 1 for every sampled word in the given frame.
bool is_unimodular_on_words(const SubgroupSpec &spec, std::size_t bound,
                            ScaleFrame frame = ScaleFrame::ambient);

SubgroupSpec support_spec(const Measure &mu);
/// Not fully exceptional support, which makes the walk transient.
bool transience_hypothesis(const Measure &mu);

} // namespace treewalk
