#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "experiments.hpp"
#include "optstab/errors.hpp"
#include "optstab/instances.hpp"

namespace fs = std::filesystem;
using optstab::Json;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kConfigError = 2, kInternalError = 3 };

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run(const std::string& config_path, const std::string& out_dir) {
  Json config;
  try {
    std::ifstream in(config_path);
    if (!in) throw optstab::cli::ConfigError("cannot open " + config_path);
    config = Json::parse(in);
  } catch (const Json::parse_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const optstab::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  const fs::path base = fs::path(config_path).parent_path();
  const std::string stem = fs::path(config_path).stem().string();
  fs::path table_path = fs::path(out_dir.empty() ? base : fs::path(out_dir)) / (stem + ".csv");
  fs::path pairs_path = fs::path(out_dir.empty() ? base : fs::path(out_dir)) / (stem + ".pairs.csv");
  fs::path summary_path = fs::path(out_dir.empty() ? base : fs::path(out_dir)) / (stem + ".summary.json");
  try {
    if (config.contains("output")) {
      const auto& o = config["output"];
      if (!o.is_object()) throw optstab::cli::ConfigError("output must be an object");
      for (const auto& [key, value] : o.items()) {
        if (!value.is_string()) throw optstab::cli::ConfigError("output." + key + " must be a path string");
        fs::path p(value.get<std::string>());
        if (p.is_relative()) p = (out_dir.empty() ? base : fs::path(out_dir)) / p;
        if (key == "table") table_path = p;
        else if (key == "pairs_table") pairs_path = p;
        else if (key == "summary") summary_path = p;
        else throw optstab::cli::ConfigError("output: unknown field '" + key + "'");
      }
    }
    auto result = optstab::cli::run_experiment(config);
    write_file(table_path, result.table.str());
    if (result.pairs) write_file(pairs_path, result.pairs->str());
    Json summary = {{"kind", result.kind}, {"pass", result.pass}, {"rows", result.table.size()}};
    if (config.contains("seed")) summary["seed"] = config["seed"];
    summary["table"] = table_path.filename().string();
    summary["details"] = result.summary;
    write_file(summary_path, summary.dump(2) + "\n");
    std::cout << result.kind << ": " << (result.pass ? "pass" : "FAIL") << " (" << result.table.size()
              << " rows) -> " << table_path.string() << '\n';
    return result.pass ? kPass : kCheckFailed;
  } catch (const optstab::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const optstab::InconsistencyError& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const optstab::CertificateError& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability of optimal values under constraint-set perturbation"};
  app.require_subcommand(1);

  std::string config_path, out_dir, instance;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON configuration");
  run_cmd->add_option("config", config_path, "Configuration file")->required();
  run_cmd->add_option("-o,--out", out_dir, "Directory for tables and summary (default: next to the config)");

  auto* list_cmd = app.add_subcommand("list-instances", "List the instance catalog");
  auto* describe_cmd = app.add_subcommand("describe", "Build an instance and print its golden values");
  describe_cmd->add_option("instance", instance, "Instance name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*run_cmd) return run(config_path, out_dir);
    if (*list_cmd) {
      for (const auto& name : optstab::catalog_names())
        std::cout << name << "  " << optstab::describe_instance(name) << '\n';
      return kPass;
    }
    if (*describe_cmd) {
      const auto entry = optstab::build(instance);
      std::cout << entry.name << ": " << entry.description << '\n';
      optstab::Table t({"quantity", "expected", "computed", "tol", "pass"});
      for (const auto& g : entry.goldens)
        t.add_row({g.quantity, optstab::fmt(g.expected), optstab::fmt(g.computed), optstab::fmt(g.tol),
                   optstab::fmt(g.pass)});
      t.write(std::cout);
      return entry.self_test() ? kPass : kCheckFailed;
    }
  } catch (const optstab::CatalogError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}
