#include <CLI11.hpp>

#include <string>
#include <utility>
#include <vector>

#include "borelcalc/cli.hpp"

namespace {

void add_common(CLI::App* sub, borelcalc::JobConfig& job) {
  sub->add_option("--matrix", job.matrix_paths, "matrix JSON file (repeatable)")
      ->expected(-1);
  sub->add_option("--expr", job.expr, "Borel function expression");
  sub->add_option("--tol", job.tol, "tolerance override");
  sub->add_option("--seed", job.seed, "seed for sampled-function audits");
  sub->add_option("--format", job.format, "report format")
      ->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--out", job.out, "output file (default stdout)");
  sub->add_option("--cheb-degree", job.cheb_degree,
                  "apply: use the Chebyshev route at this degree");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Borel functional calculus toolkit for normal matrices"};
  app.require_subcommand(1);

  borelcalc::JobConfig job;
  using borelcalc::Command;
  const std::pair<const char*, Command> commands[] = {
      {"apply", Command::Apply},         {"spectrum", Command::Spectrum},
      {"joint", Command::Joint},         {"commute", Command::Commute},
      {"transform", Command::Transform}, {"verify", Command::Verify},
      {"represent", Command::Represent}};
  const char* descriptions[] = {
      "evaluate f(A) through the spectral measure",
      "spectrum, point spectrum and eigenprojections of f(A)",
      "joint calculus of commuting normal matrices",
      "strong-commutativity battery for a pair",
      "bounded transform (T, S, Z) of a normal matrix",
      "PVM and calculus axiom reports for one matrix",
      "multiplication-operator representation"};

  for (std::size_t k = 0; k < std::size(commands); ++k) {
    CLI::App* sub = app.add_subcommand(commands[k].first, descriptions[k]);
    add_common(sub, job);
    const Command cmd = commands[k].second;
    sub->callback([&job, cmd] { job.command = cmd; });
  }

  CLI11_PARSE(app, argc, argv);
  return borelcalc::run(job);
}
