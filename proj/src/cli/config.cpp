#include "treewalk/cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace treewalk::cli {

namespace {

using json = nlohmann::json;

template <class T> T get_or(const json &obj, const char *key, T fallback)
{
  if (!obj.contains(key))
    return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

Rational weight_of(const json &w)
{
  if (w.is_string())
    return parse_rational(w.get<std::string>());
  if (w.is_number_integer())
    return Rational(w.get<std::int64_t>());
  if (w.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", w.get<double>());
    return parse_rational(buf);
  }
  throw ConfigError("weight must be a string such as \"7/10\" or a number");
}

std::vector<ProductElem> elements_of(const json &arr, const char *what)
{
  if (!arr.is_array())
    throw ConfigError(std::string(what) + " must be an array of element strings");
  std::vector<ProductElem> out;
  for (auto const &e : arr) {
    if (!e.is_string())
      throw ConfigError(std::string(what) + " entries must be strings");
    out.push_back(parse_product(e.get<std::string>()));
  }
  return out;
}

} // namespace

RunConfig parse_config(const std::string &json_text)
{
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw ConfigError("config must be a JSON object");

  RunConfig cfg;
  try {
    cfg.moduli = get_or<std::vector<std::uint32_t>>(doc, "moduli", {});
    if (doc.contains("master_seed"))
      cfg.master_seed = get_or<std::uint64_t>(doc, "master_seed", 0);

    if (doc.contains("measure")) {
      if (cfg.moduli.empty())
        throw ConfigError("\"measure\" needs \"moduli\"");
      std::vector<Atom> atoms;
      for (auto const &a : doc.at("measure")) {
        if (!a.is_object() || !a.contains("element") || !a.contains("weight"))
          throw ConfigError("measure atoms need \"element\" and \"weight\"");
        atoms.push_back({parse_product(a.at("element").get<std::string>()), weight_of(a.at("weight"))});
      }
      try {
        cfg.measure.emplace(cfg.moduli, std::move(atoms));
      } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("invalid measure: ") + e.what());
      }
    }

    if (doc.contains("generators"))
      cfg.generators = elements_of(doc.at("generators"), "generators");
    else if (cfg.measure)
      for (auto const &a : cfg.measure->atoms())
        cfg.generators.push_back(a.element);

    const json empty = json::object();
    const json &walk = doc.contains("walk") ? doc.at("walk") : empty;
    cfg.walk.n = get_or<Index>(walk, "n", cfg.walk.n);
    cfg.walk.trials = get_or<std::size_t>(walk, "trials", cfg.walk.trials);
    cfg.walk.depth = get_or<Index>(walk, "depth", cfg.walk.depth);

    const json &hit = doc.contains("hitting") ? doc.at("hitting") : empty;
    cfg.hitting.n = get_or<Index>(hit, "n", cfg.hitting.n);
    cfg.hitting.trials = get_or<std::size_t>(hit, "trials", cfg.hitting.trials);
    cfg.hitting.depth = get_or<Index>(hit, "depth", cfg.hitting.depth);

    const json &cls = doc.contains("classify") ? doc.at("classify") : empty;
    cfg.sample_bound = get_or<std::size_t>(cls, "sample_bound", cfg.sample_bound);

    const json &sc = doc.contains("scale") ? doc.at("scale") : empty;
    if (sc.contains("elements"))
      cfg.scale_elements = elements_of(sc.at("elements"), "scale.elements");
    cfg.oracle_depth = get_or<Index>(sc, "oracle_depth", 0);

    const json &ct = doc.contains("coset_tree") ? doc.at("coset_tree") : empty;
    cfg.coset.q = get_or<std::uint32_t>(ct, "q", cfg.coset.q);
    cfg.coset.m = get_or<Index>(ct, "m", cfg.coset.m);
    cfg.coset.j_min = get_or<Index>(ct, "j_min", cfg.coset.j_min);
    cfg.coset.j_max = get_or<Index>(ct, "j_max", cfg.coset.j_max);
    cfg.coset.depth = get_or<Index>(ct, "depth", cfg.coset.depth);
    cfg.coset.tidy_window = get_or<Index>(ct, "tidy_window", cfg.coset.tidy_window);
  } catch (const ParseError &e) {
    throw ConfigError(e.what());
  } catch (const json::exception &e) {
    throw ConfigError(e.what());
  }

  for (auto const &g : cfg.generators)
    if (g.moduli() != cfg.moduli)
      throw ConfigError("generator " + to_string(g) + " does not match \"moduli\"");
  if (cfg.walk.n < 1 || cfg.walk.trials < 1 || cfg.walk.depth < 1)
    throw ConfigError("walk parameters n, trials and depth must be positive");
  if (cfg.hitting.n < 1 || cfg.hitting.trials < 1 || cfg.hitting.depth < 1)
    throw ConfigError("hitting parameters n, trials and depth must be positive");
  return cfg;
}

RunConfig load_config(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

} // namespace treewalk::cli
