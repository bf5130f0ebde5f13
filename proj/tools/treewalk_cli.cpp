#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "treewalk/cli.hpp"

int main(int argc, char **argv)
{
  CLI::App app{"Random walks on products of trees: rates, boundaries, scale and coset trees"};
  app.require_subcommand(1);

  treewalk::cli::Options options;
  std::string out;
  for (const char *name : {"walk", "hitting", "classify", "scale", "coset-tree"}) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--config", options.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (default: $TREEWALK_OUT or .)");
    sub->add_option("--threads", options.threads, "worker threads")->default_val(1)->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : treewalk::cli::config_error;
  }

  if (!out.empty())
    options.out = out;
  else if (const char *env = std::getenv("TREEWALK_OUT"))
    options.out = env;

  const std::string name = app.get_subcommands().front()->get_name();
  return treewalk::cli::run_command(name, options, std::cout, std::cerr);
}
