#include "treewalk/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace treewalk::cli {

namespace {

using ojson = nlohmann::ordered_json;

void write_file(const std::filesystem::path &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
}

const Measure &require_measure(const RunConfig &cfg)
{
  if (!cfg.measure)
    throw ConfigError("config has no \"measure\"");
  if (!cfg.master_seed)
    throw ConfigError("config has no \"master_seed\"; randomness is never seeded implicitly");
  return *cfg.measure;
}

void require_transient(const Measure &mu)
{
  if (!transience_hypothesis(mu))
    throw HypothesisFailure("fully exceptional support");
}

ojson rational_json(const Rational &r)
{
  return ojson{{"exact", to_string(r)}, {"value", boost::rational_cast<double>(r)}};
}

int cmd_walk(const RunConfig &cfg, const Options &opt, std::ostream &log)
{
  const Measure &mu = require_measure(cfg);
  require_transient(mu);
  const WalkReport r = rate_of_escape(mu, cfg.walk.n, cfg.walk.trials, *cfg.master_seed, cfg.walk.depth, opt.threads);
  write_file(opt.out / "walk_report.json", to_json(r));
  write_file(opt.out / "walk_report.csv", to_csv(r));
  const TrivialityResult t = triviality_check(mu);
  log << "walk: " << r.trials << " trials of length " << r.horizon << "; " << t.explanation << '\n';
  return ok;
}

int cmd_hitting(const RunConfig &cfg, const Options &opt, std::ostream &log)
{
  const Measure &mu = require_measure(cfg);
  if (cfg.hitting.depth > 16)
    throw ConfigError("hitting depth " + std::to_string(cfg.hitting.depth) + " exceeds the maximum of 16");
  if (cfg.hitting.n <= cfg.hitting.depth)
    throw ConfigError("hitting n must exceed the depth");
  require_transient(mu);
  const HittingData data =
      hitting_data(mu, cfg.hitting.n, cfg.hitting.trials, cfg.hitting.depth, *cfg.master_seed, opt.threads);
  ojson report;
  report["n"] = cfg.hitting.n;
  report["trials"] = cfg.hitting.trials;
  report["depth"] = cfg.hitting.depth;
  report["master_seed"] = *cfg.master_seed;
  report["factors"] = ojson::array();
  for (std::size_t j = 0; j < mu.factor_count(); ++j) {
    write_file(opt.out / ("histogram_factor" + std::to_string(j) + ".csv"), histogram_csv(data, j));
    const StationarityResult s = stationarity_gap(mu, data, j);
    ojson f;
    f["factor"] = j;
    f["tv_gap"] = rational_json(s.tv_gap);
    f["tv_radius"] = s.radius;
    f["max_cylinder_mass"] = s.max_cylinder_mass;
    f["max_cylinder_stderr"] = s.max_cylinder_stderr;
    f["omega_mass"] = s.omega_mass;
    f["omega_stderr"] = s.omega_stderr;
    f["undecided_mass"] = s.undecided_mass;
    f["undecided_flag"] = s.undecided_flag;
    report["factors"].push_back(f);
  }
  write_file(opt.out / "stationarity.json", report.dump(2) + "\n");
  log << "hitting: wrote " << mu.factor_count() << " histogram(s) at depth " << cfg.hitting.depth << '\n';
  return ok;
}

int cmd_classify(const RunConfig &cfg, const Options &opt, std::ostream &log)
{
  if (cfg.generators.empty())
    throw ConfigError("config has neither \"generators\" nor \"measure\"");
  const SubgroupSpec spec(cfg.moduli, cfg.generators);
  ojson report;
  report["generators"] = ojson::array();
  for (auto const &g : cfg.generators)
    report["generators"].push_back(to_string(g));
  report["factor_verdicts"] = ojson::array();
  for (std::size_t j = 0; j < cfg.moduli.size(); ++j)
    report["factor_verdicts"].push_back(to_string(classify_factor(spec, j)));
  report["subgroup"] = to_string(classify_subgroup(spec));
  report["sample_bound"] = cfg.sample_bound;
  report["uniscalar"] = is_uniscalar(spec, cfg.sample_bound);
  report["unimodular_sampled"] = is_unimodular_on_words(spec, cfg.sample_bound);
  try {
    report["uniscalar_in_subgroup"] = is_uniscalar(spec, cfg.sample_bound, ScaleFrame::subgroup);
    report["unimodular_in_subgroup"] = is_unimodular_on_words(spec, cfg.sample_bound, ScaleFrame::subgroup);
  } catch (const std::domain_error &) {
    report["uniscalar_in_subgroup"] = nullptr;
    report["unimodular_in_subgroup"] = nullptr;
  }
  report["note"] = "word-level results are a sampled necessary condition";
  write_file(opt.out / "classify.json", report.dump(2) + "\n");
  log << "classify: " << report["subgroup"].get<std::string>() << '\n';
  return ok;
}

int cmd_scale(const RunConfig &cfg, const Options &opt, std::ostream &log)
{
  std::vector<ProductElem> elements = cfg.scale_elements;
  if (elements.empty())
    elements = cfg.generators;
  if (elements.empty())
    throw ConfigError("config has no \"scale.elements\", \"generators\" or \"measure\"");
  ojson report = ojson::array();
  for (auto const &g : elements) {
    const ScaleResult s = scale_element(g);
    const ScaleResult si = scale_element(inverse(g));
    ojson row;
    row["element"] = to_string(g);
    row["factor_scale"] = s.factor_scale;
    row["scale"] = s.total;
    row["inverse_scale"] = si.total;
    row["modular"] = rational_json(s.modular);
    Index depth = cfg.oracle_depth;
    if (depth == 0)
      for (auto const &f : g.factors)
        depth = std::max(depth, std::abs(f.shift()) + 2);
    try {
      row["oracle"] = scale_oracle(g, depth);
      row["oracle_depth"] = depth;
    } catch (const std::invalid_argument &e) {
      row["oracle"] = nullptr;
      row["oracle_note"] = e.what();
    }
    report.push_back(row);
  }
  write_file(opt.out / "scale.json", report.dump(2) + "\n");
  log << "scale: " << elements.size() << " element(s)\n";
  return ok;
}

int cmd_coset_tree(const RunConfig &cfg, const Options &opt, std::ostream &log)
{
  const auto &c = cfg.coset;
  std::optional<AlphaModel> model;
  try {
    model.emplace(c.q, c.m, c.depth);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  CosetTree tree;
  try {
    tree = build_coset_tree(*model, c.j_min, c.j_max);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  std::ostringstream csv;
  csv << "level,rep,parent_level,parent_rep\n";
  for (auto [a, b] : tree.edges) {
    const auto &p = tree.vertices[a];
    const auto &v = tree.vertices[b];
    csv << v.j << ',' << '"' << to_string(v.rep) << '"' << ',' << p.j << ',' << '"' << to_string(p.rep) << '"'
        << '\n';
  }
  write_file(opt.out / "coset_tree_edges.csv", csv.str());

  std::size_t out_min = SIZE_MAX, out_max = 0, in_min = SIZE_MAX, in_max = 0;
  for (std::size_t i = 0; i < tree.vertices.size(); ++i) {
    if (tree.vertices[i].j < c.j_max) {
      out_min = std::min(out_min, tree.out_degree[i]);
      out_max = std::max(out_max, tree.out_degree[i]);
    }
    if (tree.vertices[i].j > c.j_min) {
      in_min = std::min(in_min, tree.in_degree[i]);
      in_max = std::max(in_max, tree.in_degree[i]);
    }
  }
  std::uint64_t expected = 1;
  for (Index k = 0; k < c.m; ++k)
    expected *= c.q;
  ojson report;
  report["q"] = c.q;
  report["m"] = c.m;
  report["j_min"] = c.j_min;
  report["j_max"] = c.j_max;
  report["vertices"] = tree.vertices.size();
  report["edges"] = tree.edges.size();
  report["is_tree"] = tree.is_tree;
  report["expected_out_degree"] = expected;
  if (c.j_max > c.j_min) {
    report["out_degree"] = {{"min", out_min}, {"max", out_max}};
    report["in_degree"] = {{"min", in_min}, {"max", in_max}};
  }
  try {
    const TidyReport t = tidy_subgroups(*model, c.tidy_window);
    report["tidy"] = {{"window", t.window},
                      {"tidy_above", t.tidy_above},
                      {"v_minus_is_v", t.v_minus_is_v},
                      {"v_plus_trivial", t.v_plus_trivial},
                      {"v_minus_minus_exhausts", t.v_minus_minus_exhausts},
                      {"index_alpha", t.index_alpha},
                      {"index_alpha_inverse", t.index_alpha_inv},
                      {"scale_alpha", t.scale_from_v_plus},
                      {"scale_alpha_inverse", t.scale_inv_from_v_minus}};
  } catch (const std::invalid_argument &e) {
    report["tidy"] = nullptr;
    report["tidy_note"] = e.what();
  }
  write_file(opt.out / "coset_tree_degrees.json", report.dump(2) + "\n");
  log << "coset-tree: " << tree.vertices.size() << " vertices, out-degree " << out_max << '\n';
  return ok;
}

} // namespace

int run_command(const std::string &name, const Options &options, std::ostream &log, std::ostream &err)
{
  try {
    const RunConfig cfg = load_config(options.config);
    std::filesystem::create_directories(options.out);
    if (name == "walk")
      return cmd_walk(cfg, options, log);
    if (name == "hitting")
      return cmd_hitting(cfg, options, log);
    if (name == "classify")
      return cmd_classify(cfg, options, log);
    if (name == "scale")
      return cmd_scale(cfg, options, log);
    if (name == "coset-tree")
      return cmd_coset_tree(cfg, options, log);
    err << "unknown subcommand " << name << '\n';
    return config_error;
  } catch (const HypothesisFailure &e) {
    err << "hypothesis failure: " << e.what() << '\n';
    return hypothesis_failure;
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::invalid_argument &e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  }
}

} // namespace treewalk::cli
