#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "orlicz/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fractional Orlicz-Sobolev modulars, limit densities and the fractional g-Laplacian"};
  std::string command, config, out = ".";
  app.add_option("command", command, "tilde | bbm | poincare | solve | gamma | check")->required();
  app.add_option("--config", config, "experiment config (key = value lines)")->required();
  app.add_option("--out", out, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return orlicz::run_file(command, config, out, std::cerr);
}
