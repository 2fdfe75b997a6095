#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

std::uint64_t seed_from_env() {
  const char* s = std::getenv("TREESHIFT_SEED");
  if (s == nullptr || *s == '\0') return treeshift::kDefaultSeed;
  return std::stoull(s);
}

}  // namespace

int main(int argc, char** argv) {
  using treeshift::cli::Options;
  Options o;
  CLI::App app{"Dirichlet shifts on rooted directed trees"};
  app.require_subcommand(1);

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* validate = app.add_subcommand("validate", "check a tree file and summarize it");
  validate->add_option("tree", o.files, "tree file")->required()->expected(1);
  add_format(validate);

  auto* profile = app.add_subcommand("profile", "depth profile and cokernel dimension");
  profile->add_option("tree", o.files, "tree file")->required()->expected(1);
  profile->add_option("--horizon", o.horizon, "largest depth to report");
  add_format(profile);

  auto* equiv = app.add_subcommand("equiv", "decide unitary equivalence of two Dirichlet shifts");
  equiv->add_option("trees", o.files, "two tree files")->required()->expected(2);
  equiv->add_option("--q", o.q, "order q >= 1");
  equiv->add_option("--horizon", o.horizon, "profile horizon");
  equiv->add_option("--verify-depth", o.verify_depth, "truncation depth for the intertwining check");
  add_format(equiv);

  auto* moments = app.add_subcommand("moments", "exact moments ||S^k e_v||^2");
  moments->add_option("tree", o.files, "tree file")->required()->expected(1);
  moments->add_option("--q", o.q, "order q >= 1");
  moments->add_option("--vertex", o.vertex, "vertex id (default: root)");
  moments->add_option("--kmax", o.kmax, "largest power");
  moments->add_option("--kind", o.kind, "dirichlet or dual")->check(CLI::IsMember({"dirichlet", "dual"}));
  moments->add_option("--horizon", o.horizon, "truncation depth of the matrix cross-check");
  add_format(moments);

  auto* checks = app.add_subcommand("checks", "run an invariant suite");
  checks->add_option("tree", o.files, "tree file")->required()->expected(1);
  checks->add_option("--q", o.q, "order q >= 1");
  checks->add_option("--suite", o.suite, "defect|hausdorff|pick|cardid|kernel")
      ->required()
      ->check(CLI::IsMember({"defect", "hausdorff", "pick", "cardid", "kernel"}));
  checks->add_option("--horizon", o.horizon, "largest vertex depth examined");
  add_format(checks);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return treeshift::cli::exit_code::kMalformed;
  }

  try {
    o.seed = seed_from_env();
  } catch (const std::exception&) {
    std::cerr << "TREESHIFT_SEED must be an unsigned integer\n";
    return treeshift::cli::exit_code::kMalformed;
  }
  o.command = app.get_subcommands().front()->get_name();
  const auto out = treeshift::cli::run(o);
  std::cout << out.output;
  return out.exit_code;
}
