#pragma once

#include <string>
#include <vector>

#include "treewalk/boundary.hpp"

namespace treewalk {

/**
 * G = finitely supported digits over Z/q, alpha = shift by +m, and
 * V = digits supported in [0, inf). Then alpha contracts V into itself,
 * V_- = V, V_+ is trivial, V_{--} is all of G and s(alpha^{-1}) = q^m.
 */
struct AlphaModel {
  std::uint32_t q = 2;
  Index m = 1;
  Index depth = 0; ///< truncation depth D; 0 selects 64 m

  AlphaModel(std::uint32_t q, Index m, Index depth = 0);
};

struct TidyReport {
  Index window = 0;                  ///< quotient taken modulo digits at indices >= window
  std::uint64_t v_size = 0;          ///< |V| in the quotient
  std::uint64_t v_plus_size = 0;
  std::uint64_t v_minus_size = 0;
  bool tidy_above = false;           ///< V == V_+ V_-
  bool v_minus_is_v = false;
  bool v_plus_trivial = false;
  bool v_minus_minus_exhausts = false; ///< union of alpha^{-k}(V_-) covers the window
  std::uint64_t index_alpha = 0;      ///< [alpha(V) : V ∩ alpha(V)]
  std::uint64_t index_alpha_inv = 0;  ///< [alpha^{-1}(V) : V ∩ alpha^{-1}(V)]
  std::uint64_t scale_from_v_plus = 0;      ///< [alpha(V_+) : V_+]
  std::uint64_t scale_inv_from_v_minus = 0; ///< [alpha^{-1}(V_-) : V_-]
};

TidyReport tidy_subgroups(const AlphaModel &model, Index window = 6);

/// The left coset v alpha^j(V_-) = v + (digits at indices >= j m).
struct CosetVertex {
  Digits rep; ///< canonical: no digits at indices >= j m
  Index j = 0;

  friend bool operator==(const CosetVertex &, const CosetVertex &) = default;
};

CosetVertex make_coset(const AlphaModel &model, const Digits &v, Index j);
Index coset_distance(const AlphaModel &model, const CosetVertex &x, const CosetVertex &y);
std::string to_string(const CosetVertex &x);

struct CosetTree {
  Index j_min = 0, j_max = 0;
  std::vector<CosetVertex> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges; ///< (from, to), to one level further
  std::vector<std::size_t> in_degree, out_degree;
  bool is_tree = false; ///< connected and |E| = |V| - 1
};

/// The descendants of (e, j_min) down to level j_max, with every edge found
/// by testing all pairs on consecutive levels.
CosetTree build_coset_tree(const AlphaModel &model, Index j_min, Index j_max);

/// (v, j) in V_{--} x| <alpha>: (v1, j1)(v2, j2) = (v1 + alpha^{j1}(v2), j1 + j2).
struct VmmElem {
  Digits v;
  Index j = 0;

  friend bool operator==(const VmmElem &, const VmmElem &) = default;
};

VmmElem vmm_compose(const AlphaModel &model, const VmmElem &a, const VmmElem &b);
VmmElem vmm_inverse(const AlphaModel &model, const VmmElem &a);
CosetVertex vmm_act(const AlphaModel &model, const VmmElem &g, const CosetVertex &x);

/// The action on the coset tree as an affine map of the (q+1)-regular tree
/// containing it: (j m, v). Coset (v, j) sits at the vertex (j m; v).
AffineElem pi_map(const AlphaModel &model, const VmmElem &g);
Vertex coset_to_vertex(const AlphaModel &model, const CosetVertex &x);
inline Index eta(const VmmElem &g) { return g.j; }
/// d(V_-, g V_-) in the coset tree.
Index vmma_gauge(const AlphaModel &model, const VmmElem &g);

struct VmmAtom {
  VmmElem element;
  Rational weight;
};

Measure pushforward(const AlphaModel &model, const std::vector<VmmAtom> &atoms);

struct VmmaWalkResult {
  WalkReport report; ///< on the pi-image, distances in the (q+1)-regular tree
  Rational eta_drift;
  bool trivial = false;
};

/// Walk through the pi-image. Throws HypothesisFailure when the image is exceptional.
VmmaWalkResult vmma_walk(const AlphaModel &model, const std::vector<VmmAtom> &atoms, Index n, std::size_t trials,
                         std::uint64_t master_seed, Index depth = 20, unsigned threads = 1);

} // namespace treewalk
