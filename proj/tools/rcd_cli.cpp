// Command-line front end. All observable behavior lives in cli_core.hpp;
// this file only maps flags onto a RunConfig and picks the subcommand.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "cli_core.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Certified local geometry for triangular coordinate domains"};
  app.require_subcommand(1);

  rcdcli::RunConfig cfg;

  auto add_common = [&cfg](CLI::App* c) {
    c->add_option("input", cfg.input, "system file, one component per line")
        ->required();
    c->add_option("--p", cfg.point,
                  "base point: re[,im] per coordinate, joined by ';'");
    c->add_option("--mu", cfg.mu, "envelope weight parameter, > 1")
        ->capture_default_str();
    c->add_option("--delta", cfg.delta,
                  "scale; defaults to the strict gate, or 1e-8 relaxed");
    c->add_option("--delta-ladder", cfg.ladder,
                  "scale ladder START:COUNT, e.g. 1e-4:6");
    c->add_option("--grid", cfg.grid, "points per axis for grid sweeps");
    c->add_option("--samples", cfg.samples,
                  "sample count per certification sweep")
        ->capture_default_str();
    c->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
    auto* relaxed =
        c->add_flag("--relaxed", cfg.relaxed, "relaxed scale gate");
    c->add_flag("--strict", "strict scale gate (the default)")
        ->excludes(relaxed);
    c->add_option("--json", cfg.json_path, "write the JSON document here");
    c->add_option("--csv", cfg.csv_path, "write the tabular view here");
  };

  add_common(app.add_subcommand(
      "analyze", "constants ledger and gain prediction for a system"));
  add_common(app.add_subcommand(
      "tau", "approximate radii at a point, or a whole scale ladder"));
  add_common(app.add_subcommand(
      "types", "type signatures over a grid, against the finiteness bound"));
  add_common(app.add_subcommand(
      "scaling", "radius scaling law margins under scale shrinking"));
  add_common(app.add_subcommand(
      "stability", "radius and coefficient stability under a box nudge"));
  add_common(app.add_subcommand(
      "verify", "full certification: floors, bounds, covering, certificate"));
  add_common(app.add_subcommand(
      "cover", "stratified covering of a grid by stability boxes"));
  auto* contact = app.add_subcommand(
      "contact", "contact order of a boundary curve against the sharp target");
  add_common(contact);
  contact->add_option("--curve", cfg.curve_path,
                      "curve file, one component per line in w");

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  return rcdcli::run_command(name, cfg, std::cout, std::cerr);
}
