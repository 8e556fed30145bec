#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "srcf/cli.hpp"

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-regular continued fractions: expansions, pressure and dimension certificates"};
  app.set_version_flag("--version", std::string(srcf::kToolName) + " " + srcf::kToolVersion);
  app.require_subcommand(1);

  srcf::CliFlags flags;
  std::uint64_t seed = 0, depth = 0;
  unsigned bits = 0;
  double tolerance = 0;
  std::string deterministic = "on";
  app.add_option("--seed", seed, "Seed for sampled quantities");
  app.add_option("--depth", depth, "Depth override");
  app.add_option("--precision-bits", bits, "Dyadic grid for decimal inputs");
  app.add_option("--tolerance", tolerance, "Tolerance override");
  app.add_option("--threads", flags.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--deterministic", deterministic, "Fixed-order reductions (on|off)")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_flag("--csv", flags.csv, "Table view instead of JSON");

  std::string path;
  std::string chosen;
  for (const std::string& name : srcf::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("instance", path, "Instance document (JSON), or - for stdin")->required();
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (app.count("--seed")) flags.seed = seed;
  if (app.count("--depth")) flags.depth = depth;
  if (app.count("--precision-bits")) flags.precision_bits = bits;
  if (app.count("--tolerance")) flags.tolerance = tolerance;
  flags.deterministic = deterministic == "on";

  std::string text;
  try {
    text = read_input(path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  const srcf::CliResult r = srcf::run_command(chosen, text, flags);
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}
