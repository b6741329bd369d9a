#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hbss/cli.hpp"
#include "hbss/errors.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hbss::IoError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> split(const std::string& text, char delimiter) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, delimiter)) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

struct Overrides {
  std::string window;
  std::optional<int> max_filtration;
  std::optional<int> max_page;
  std::string mode;
  std::string emit;
  std::string out;
};

// Overrides go through the text form so they are validated like a file.
hbss::ProblemSpec apply(hbss::ProblemSpec spec, const Overrides& o) {
  if (!o.window.empty()) {
    const auto dots = o.window.find("..");
    if (dots == std::string::npos) throw hbss::ValidationError("--window expects a..b");
    try {
      spec.window.degree_min = std::stoi(o.window.substr(0, dots));
      spec.window.degree_max = std::stoi(o.window.substr(dots + 2));
    } catch (const std::logic_error&) {
      throw hbss::ValidationError("--window expects integers a..b");
    }
  }
  if (o.max_filtration) spec.window.max_filtration = *o.max_filtration;
  if (o.max_page) spec.window.max_page = *o.max_page;
  if (!o.mode.empty() && o.mode != spec.input.mode) {
    if (o.mode == "presentation") {
      // The abutment presentation becomes the input module.
      spec.input.mode = "presentation";
      spec.input.relations = spec.input.abutment_relations;
      spec.input.abutment_relations.clear();
      spec.input.basis.clear();
      spec.input.operators.clear();
      spec.input.comodule_relations.clear();
    } else if (o.mode == "comodule") {
      throw hbss::ValidationError("a presentation cannot be turned into a comodule; write the basis and operators");
    } else {
      throw hbss::ValidationError("--mode expects comodule or presentation");
    }
  }
  if (!o.emit.empty()) spec.output.formats = split(o.emit, ',');
  if (!o.out.empty()) spec.output.path = o.out;
  return hbss::parse_spec(hbss::print_spec(spec));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bockstein spectral sequence calculator"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Compute the pages of a problem description");
  std::string spec_path;
  std::string preset;
  Overrides overrides;
  bool quiet = false;
  run_cmd->add_option("spec", spec_path, "Problem description file");
  run_cmd->add_option("--preset", preset, "Use a built-in problem instead of a file");
  run_cmd->add_option("--window", overrides.window, "Degree range a..b");
  run_cmd->add_option("--max-filtration", overrides.max_filtration, "Largest filtration s");
  run_cmd->add_option("--max-page", overrides.max_page, "Largest page r");
  run_cmd->add_option("--mode", overrides.mode, "comodule or presentation");
  run_cmd->add_option("--emit", overrides.emit, "Comma-separated formats: json, table, svg");
  run_cmd->add_option("--out", overrides.out, "Output directory");
  run_cmd->add_flag("--quiet", quiet, "Do not print the tables");

  auto* presets_cmd = app.add_subcommand("presets", "List built-in problems");
  auto* show_cmd = app.add_subcommand("show", "Print a built-in problem description");
  std::string show_name;
  show_cmd->add_option("name", show_name)->required();
  auto* check_cmd = app.add_subcommand("check", "Validate a problem description and print its canonical form");
  std::string check_path;
  check_cmd->add_option("spec", check_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (presets_cmd->parsed()) {
      for (const auto& name : hbss::preset_names()) std::cout << name << "\n";
      return 0;
    }
    if (show_cmd->parsed()) {
      std::cout << hbss::preset_text(show_name);
      return 0;
    }
    if (check_cmd->parsed()) {
      std::cout << hbss::print_spec(hbss::parse_spec(read_file(check_path)));
      return 0;
    }
    if (preset.empty() == spec_path.empty())
      throw hbss::ValidationError("give exactly one of a spec file or --preset");
    const std::string text = preset.empty() ? read_file(spec_path) : hbss::preset_text(preset);
    const hbss::ProblemSpec spec = apply(hbss::parse_spec(text), overrides);
    const hbss::RunReport report = hbss::run(spec);
    if (!quiet) std::cout << hbss::to_table(report);
    for (const auto& path : hbss::emit(report, spec.output.formats, spec.output.path))
      std::cout << "wrote " << path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hbss::exit_code_for(e);
  }
}
