#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sharpspec/cli/commands.hpp"

using namespace sharpspec;

int main(int argc, char** argv) {
  CLI::App app{"Sharp-operator spectra on voxel domains"};
  app.require_subcommand(1);

  std::string suite = "all", domain, op, out, export_dir, h_list, equation, data, times;
  int count = 20, modes = -1;
  double tol = 0.0;
  std::uint64_t seed = 42;

  auto* verify = app.add_subcommand("verify", "Run invariant suites and write a report CSV");
  verify->add_option("--suite", suite, "linrel | complex | spectra | all")->capture_default_str();
  verify->add_option("--seed", seed, "Random seed")->capture_default_str();
  verify->add_option("--tol", tol, "Subspace tolerance and CG tolerance (default 1e-10)");
  verify->add_option("--out", out, "Report CSV path (default stdout)");

  auto* spectrum = app.add_subcommand("spectrum", "Compute an eigenvalue window");
  spectrum->add_option("--domain", domain, "Domain JSON file")->required();
  spectrum->add_option("--operator", op, "curl-sharp | laplace-sharp | d-sharp-1d")->required();
  spectrum->add_option("--count", count, "Number of eigenvalues")->capture_default_str();
  spectrum->add_option("--tol", tol, "Residual tolerance");
  spectrum->add_option("--seed", seed, "Random seed (default: the domain seed)");
  spectrum->add_option("--out", out, "Spectrum CSV path (default stdout)");
  spectrum->add_option("--export-fields", export_dir, "Directory for VTK eigenfields");

  auto* convergence = app.add_subcommand("convergence", "Eigenvalues under grid refinement");
  convergence->add_option("--domain", domain, "Domain JSON file; its h is replaced by each level")->required();
  convergence->add_option("--operator", op, "curl-sharp | laplace-sharp | d-sharp-1d")->required();
  convergence->add_option("--h-list", h_list, "Comma separated grid sizes, e.g. 1/12,1/16,1/24")->required();
  convergence->add_option("--count", count, "Number of tracked eigenvalues")->default_val(3);
  convergence->add_option("--tol", tol, "Residual tolerance");
  convergence->add_option("--seed", seed, "Random seed (default: the domain seed)");
  convergence->add_option("--out", out, "Convergence CSV path (default stdout)");

  auto* evolve = app.add_subcommand("evolve", "Heat or wave evolution by eigen-expansion");
  evolve->add_option("--domain", domain, "Domain JSON file (1D or 2D)")->required();
  evolve->add_option("--equation", equation, "heat | wave")->required();
  evolve->add_option("--data", data, "CSV with columns dof_index,u0[,v0][,f]")->required();
  evolve->add_option("--times", times, "Comma separated output times")->required();
  evolve->add_option("--modes", modes, "Number of nonzero modes kept (default all)");
  evolve->add_option("--out", out, "Snapshot CSV path; energies go to <stem>_energy.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitUsage;
  }

  try {
    if (verify->parsed()) {
      cli::SuiteOptions o;
      o.seed = seed;
      if (verify->count("--tol")) o.tol = tol;
      return cli::cmd_verify(suite, o, out, std::cerr);
    }
    if (spectrum->parsed()) {
      cli::SpectrumOptions o;
      o.domain = domain;
      o.op = op;
      o.count = count;
      if (spectrum->count("--tol")) o.tol = tol;
      if (spectrum->count("--seed")) o.seed = seed;
      o.out = out;
      o.export_dir = export_dir;
      return cli::cmd_spectrum(o, std::cerr);
    }
    if (convergence->parsed()) {
      cli::ConvergenceOptions o;
      o.domain = domain;
      o.op = op;
      o.h_list = cli::parse_real_list(h_list, "--h-list");
      o.track = count;
      if (convergence->count("--tol")) o.tol = tol;
      if (convergence->count("--seed")) o.seed = seed;
      o.out = out;
      return cli::cmd_convergence(o, std::cerr);
    }
    cli::EvolveOptions o;
    o.domain = domain;
    o.equation = equation;
    o.data = data;
    o.times = cli::parse_real_list(times, "--times");
    o.modes = modes;
    o.out = out;
    return cli::cmd_evolve(o, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitFail;
  }
}
