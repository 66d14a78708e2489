#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <pfaff/cli.hpp>

int main(int argc, char** argv) {
  CLI::App app{"Pfaffian fibrations: integrability, prolongation, relative algebroids and symmetries"};
  std::string command, file;
  pfaff::CliFlags flags;
  app.add_option("command", command, "one of validate, analyze, tableau, prolong, algebroid, correspond, symmetry, action-check, identity-check")
      ->required();
  app.add_option("file", file, "problem file")->required();
  app.add_option("--samples", flags.samples, "sampled points")->capture_default_str();
  app.add_option("--seed", flags.seed, "random seed")->capture_default_str();
  app.add_option("--height", flags.height, "height bound of sampled rationals")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--trials", flags.trials, "random flags tried by the involutivity test")->capture_default_str();
  app.add_flag("--json", flags.json, "print the report as JSON");
  app.add_option("--fibration", flags.fibration, "fibration, jet or pde section to analyze");
  app.add_option("--diffeo", flags.diffeo, "diffeo section for symmetry");
  app.add_option("--jet", flags.jet, "jet-element section for symmetry");
  app.add_option("--action", flags.action, "action section for action-check");
  app.add_option("--map", flags.map, "coordinate projection for identity-check");
  app.add_option("--point", flags.point, "point section for tableau and correspond");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::ifstream in(file, std::ios::binary);
  pfaff::CliResult res;
  if (!in) {
    res.report = pfaff::detail::empty_report(command, flags.seed);
    res.report["errors"].push_back({{"kind", "InvalidInput"}, {"message", "cannot read " + file}});
    res.exit_code = 2;
  } else {
    std::ostringstream buf;
    buf << in.rdbuf();
    res = pfaff::execute(command, buf.str(), flags);
  }
  if (flags.json) std::cout << res.report.dump(2) << "\n";
  else std::cout << pfaff::render_text(res.report);
  return res.exit_code;
}
