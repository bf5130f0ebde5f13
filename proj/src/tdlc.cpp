#include "treewalk/tdlc.hpp"

#include <deque>
#include <set>
#include <unordered_set>

namespace treewalk {

namespace {

Index floor_div(Index a, Index b)
{
  Index d = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? d - 1 : d;
}

std::uint64_t count_of(std::uint32_t q, Index width)
{
  std::uint64_t n = 1;
  for (Index i = 0; i < width; ++i) {
    n *= q;
    if (n > (std::uint64_t{1} << 22))
      throw std::invalid_argument("tidy window too large to enumerate");
  }
  return n;
}

/// All digit sequences supported in [lo, lo + width).
std::vector<Digits> enumerate(std::uint32_t q, Index lo, Index width)
{
  const std::uint64_t n = count_of(q, width);
  std::vector<Digits> out;
  out.reserve(n);
  for (std::uint64_t code = 0; code < n; ++code) {
    Digits v(q);
    std::uint64_t c = code;
    for (Index i = 0; i < width; ++i, c /= q)
      v.add_at(lo + i, static_cast<Digit>(c % q));
    out.push_back(std::move(v));
  }
  return out;
}

bool in_v(const Digits &x) { return valuation_or_inf(x) >= 0; }

std::uint64_t index_in(const std::unordered_set<Digits> &image, const std::function<bool(const Digits &)> &member)
{
  std::uint64_t inside = 0;
  for (auto const &x : image)
    inside += member(x);
  if (inside == 0 || image.size() % inside != 0)
    throw std::logic_error("subgroup index is not an integer");
  return image.size() / inside;
}

} // namespace

AlphaModel::AlphaModel(std::uint32_t q_, Index m_, Index depth_) : q(q_), m(m_), depth(depth_ ? depth_ : 64 * m_)
{
  if (q < 2)
    throw std::invalid_argument("modulus must be at least 2");
  if (m < 1)
    throw std::invalid_argument("alpha shift must be at least 1");
  if (depth < m)
    throw std::invalid_argument("truncation depth must be at least m");
}

TidyReport tidy_subgroups(const AlphaModel &model, Index window)
{
  const Index m = model.m;
  if (window < 2 * m)
    throw std::invalid_argument("tidy window must be at least 2 m");
  const Index K = window / m;
  TidyReport r;
  r.window = window;

  auto alpha = [&](const Digits &x, Index k) { return shift(x, k * m); };
  // Membership tests are well defined modulo the window because
  // alpha^{-k} maps digits at indices >= window into V for k <= K.
  auto in_v_plus = [&](const Digits &x) {
    for (Index k = 0; k <= K; ++k)
      if (!in_v(alpha(x, -k)))
        return false;
    return in_v(x);
  };
  auto in_v_minus = [&](const Digits &x) {
    for (Index k = 0; k <= K; ++k)
      if (!in_v(alpha(x, k)))
        return false;
    return in_v(x);
  };

  const auto v = enumerate(model.q, 0, window);
  std::unordered_set<Digits> v_set(v.begin(), v.end()), v_plus, v_minus;
  for (auto const &x : v) {
    if (in_v_plus(x))
      v_plus.insert(x);
    if (in_v_minus(x))
      v_minus.insert(x);
  }
  r.v_size = v_set.size();
  r.v_plus_size = v_plus.size();
  r.v_minus_size = v_minus.size();
  r.v_minus_is_v = v_minus == v_set;
  r.v_plus_trivial = v_plus.size() == 1;

  std::unordered_set<Digits> product;
  for (auto const &a : v_plus)
    for (auto const &b : v_minus)
      product.insert(add(a, b));
  r.tidy_above = product == v_set;

  auto image_of = [&](const std::vector<Digits> &source, Index k, const std::function<bool(const Digits &)> &keep) {
    std::unordered_set<Digits> out;
    for (auto const &x : source)
      if (keep(x))
        out.insert(truncate_below(alpha(x, k), window));
    return out;
  };
  const auto wide = enumerate(model.q, 0, window + m);
  auto all = [](const Digits &) { return true; };
  auto wide_in_v_minus = [&](const Digits &x) {
    return in_v_minus(truncate_below(x, window));
  };
  r.index_alpha = index_in(image_of(v, 1, all), in_v);
  r.index_alpha_inv = index_in(image_of(wide, -1, all), in_v);
  r.scale_from_v_plus = index_in(image_of(v, 1, in_v_plus),
                                 [&](const Digits &x) { return v_plus.count(x) > 0; });
  r.scale_inv_from_v_minus = index_in(image_of(wide, -1, wide_in_v_minus),
                                      [&](const Digits &x) { return v_minus.count(x) > 0; });

  // The union of alpha^{-k}(V_-) is a nested union of subgroups, so it covers
  // the window once it contains every unit digit.
  r.v_minus_minus_exhausts = true;
  for (Index i = -K * m; i < window; ++i) {
    bool found = false;
    for (Index k = 0; k <= K && !found; ++k)
      found = in_v(alpha(Digits(model.q, {{i, 1}}), k));
    r.v_minus_minus_exhausts = r.v_minus_minus_exhausts && found;
  }
  return r;
}

CosetVertex make_coset(const AlphaModel &model, const Digits &v, Index j)
{
  if (v.modulus() != model.q)
    throw ModulusMismatch(v.modulus(), model.q);
  return CosetVertex{truncate_below(v, j * model.m), j};
}

Index coset_distance(const AlphaModel &model, const CosetVertex &x, const CosetVertex &y)
{
  Index c = std::min(x.j, y.j);
  if (auto fd = first_difference(x.rep, y.rep))
    c = std::min(c, floor_div(*fd, model.m));
  return (x.j - c) + (y.j - c);
}

std::string to_string(const CosetVertex &x)
{
  std::string rep = to_string(x.rep);
  rep.erase(0, rep.find(':') + 1);
  return "(" + rep + "; " + std::to_string(x.j) + ")";
}

CosetTree build_coset_tree(const AlphaModel &model, Index j_min, Index j_max)
{
  if (j_max < j_min)
    throw std::invalid_argument("empty level window");
  if (j_max - j_min > model.depth / model.m - 1)
    throw std::invalid_argument("level window deeper than the truncation depth allows");
  std::uint64_t leaves = 1;
  for (Index k = 0; k < model.m * (j_max - j_min); ++k) {
    leaves *= model.q;
    if (leaves > (std::uint64_t{1} << 16))
      throw std::invalid_argument("level window too deep to materialize");
  }

  CosetTree t;
  t.j_min = j_min;
  t.j_max = j_max;
  std::vector<std::vector<std::size_t>> levels{{0}};
  t.vertices.push_back(make_coset(model, Digits(model.q), j_min));
  const auto blocks = enumerate(model.q, 0, model.m);
  for (Index j = j_min; j < j_max; ++j) {
    std::vector<std::size_t> next;
    for (std::size_t idx : levels.back())
      for (auto const &blk : blocks) {
        Digits rep = t.vertices[idx].rep;
        rep.add_shifted(blk, j * model.m);
        next.push_back(t.vertices.size());
        t.vertices.push_back(make_coset(model, rep, j + 1));
      }
    levels.push_back(std::move(next));
  }

  // Edge (v, j) -> (w, j+1) iff w lies in the coset v alpha^j(V_-).
  for (std::size_t l = 0; l + 1 < levels.size(); ++l)
    for (std::size_t a : levels[l])
      for (std::size_t b : levels[l + 1]) {
        const auto &x = t.vertices[a];
        const auto &y = t.vertices[b];
        if (truncate_below(y.rep, x.j * model.m) == x.rep)
          t.edges.emplace_back(a, b);
      }

  t.in_degree.assign(t.vertices.size(), 0);
  t.out_degree.assign(t.vertices.size(), 0);
  std::vector<std::vector<std::size_t>> adj(t.vertices.size());
  for (auto [a, b] : t.edges) {
    ++t.out_degree[a];
    ++t.in_degree[b];
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(t.vertices.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    auto a = queue.front();
    queue.pop_front();
    for (auto b : adj[a])
      if (!seen[b]) {
        seen[b] = true;
        ++reached;
        queue.push_back(b);
      }
  }
  t.is_tree = reached == t.vertices.size() && t.edges.size() + 1 == t.vertices.size();
  return t;
}

VmmElem vmm_compose(const AlphaModel &model, const VmmElem &a, const VmmElem &b)
{
  VmmElem out = a;
  out.v.add_shifted(b.v, a.j * model.m);
  out.j += b.j;
  return out;
}

VmmElem vmm_inverse(const AlphaModel &model, const VmmElem &a)
{
  return VmmElem{negate(shift(a.v, -a.j * model.m)), -a.j};
}

CosetVertex vmm_act(const AlphaModel &model, const VmmElem &g, const CosetVertex &x)
{
  Digits rep = g.v;
  rep.add_shifted(x.rep, g.j * model.m);
  return make_coset(model, rep, g.j + x.j);
}

AffineElem pi_map(const AlphaModel &model, const VmmElem &g) { return AffineElem(g.j * model.m, g.v); }

Vertex coset_to_vertex(const AlphaModel &model, const CosetVertex &x) { return Vertex(x.j * model.m, x.rep); }

Index vmma_gauge(const AlphaModel &model, const VmmElem &g)
{
  const CosetVertex root = make_coset(model, Digits(model.q), 0);
  return coset_distance(model, root, vmm_act(model, g, root));
}

Measure pushforward(const AlphaModel &model, const std::vector<VmmAtom> &atoms)
{
  std::vector<Atom> out;
  for (auto const &a : atoms)
    out.push_back({ProductElem{{pi_map(model, a.element)}}, a.weight});
  return Measure({model.q}, std::move(out));
}

VmmaWalkResult vmma_walk(const AlphaModel &model, const std::vector<VmmAtom> &atoms, Index n, std::size_t trials,
                         std::uint64_t master_seed, Index depth, unsigned threads)
{
  const Measure mu = pushforward(model, atoms);
  const FactorClass image = classify_factor(support_spec(mu), 0);
  if (is_exceptional(image))
    throw HypothesisFailure("exceptional image under pi (" + to_string(image) + ")");
  VmmaWalkResult r;
  r.report = rate_of_escape(mu, n, trials, master_seed, depth * model.m, threads);
  r.eta_drift = Rational(0);
  for (auto const &a : atoms)
    r.eta_drift += a.weight * eta(a.element);
  r.trivial = r.eta_drift <= Rational(0);
  return r;
}

} // namespace treewalk
