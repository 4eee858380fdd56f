#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "casimir/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Casimir free energy, entropy and cavity modes between two mirrors"};
  std::string config_file;
  std::string output;
  std::vector<std::string> pairs;
  app.add_option("-c,--config", config_file, "key=value configuration file");
  app.add_option("-o,--output", output, "write CSV here instead of stdout");
  app.add_option("pairs", pairs, "key=value overrides, applied after the file");
  app.set_version_flag("--version", casimir::cli::version());
  CLI11_PARSE(app, argc, argv);

  using casimir::cli::ConfigError;
  casimir::cli::RunConfig cfg;
  try {
    std::string text;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw ConfigError("config", "cannot read " + config_file);
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    for (const auto& p : pairs) text += "\n" + p;
    if (!output.empty()) text += "\noutput=" + output;
    cfg = casimir::cli::parse_config(text);
  } catch (const ConfigError& e) {
    std::cerr << "error=invalid-config key=" << e.key() << " message=" << e.what() << '\n';
    return 2;
  }

  if (cfg.output.empty()) return casimir::cli::run(cfg, std::cout, std::cerr);
  std::ostringstream buf;
  const int status = casimir::cli::run(cfg, buf, std::cerr);
  if (status == 0) {
    std::ofstream out(cfg.output);
    if (!out) {
      std::cerr << "error=io message=cannot write " << cfg.output << '\n';
      return 2;
    }
    out << buf.str();
  }
  return status;
}
