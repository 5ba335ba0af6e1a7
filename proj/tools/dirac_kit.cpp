#include "dirackit/analysis.hpp"
#include "dirackit/catalog.hpp"
#include "dirackit/errors.hpp"
#include "dirackit/verification.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitRank = 3;

dk::ParamMap parse_params(const std::vector<std::string>& kv) {
  dk::ParamMap out;
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw dk::InputError("parameter '" + s + "' is not of the form k=v");
    const std::string key = s.substr(0, eq);
    const std::string val = s.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size()) throw dk::InputError("parameter '" + key + "' has a non-numeric value");
    out[key] = v;
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dk::InputError("cannot write '" + path + "'");
  out << text;
}

int finish(const dk::AnalysisReport& r, const std::string& out) {
  write_text(out, dk::report_text(r));
  int fails = 0;
  for (const auto& c : r.checks) {
    if (c.status == dk::CheckStatus::Fail) {
      ++fails;
      std::cerr << "FAIL " << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    }
  }
  std::cerr << r.system << ": " << r.checks.size() << " checks, " << fails << " failed\n";
  return fails ? kExitCheckFailure : kExitPass;
}

void write_abort(const std::string& out, const std::string& system, const dk::RankError& e) {
  nlohmann::ordered_json j;
  j["schema"] = "dirac-kit/1";
  j["system"] = system;
  j["aborted"] = {{"stage", e.stage()}, {"message", e.what()}};
  if (!out.empty() && out != "-") write_text(out, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirac structures, symmetry reduction and nonholonomic systems"};
  app.require_subcommand(1);

  dk::AnalysisOptions opt;
  std::string system, action, out, file, only;
  std::vector<std::string> params;
  bool paper = false;

  auto add_sampling = [&](CLI::App* c) {
    c->add_option("--samples", opt.samples, "number of sample points")->check(CLI::PositiveNumber);
    c->add_option("--seed", opt.seed, "random seed");
    c->add_option("--tol", opt.tol, "relative rank and residual tolerance")->check(CLI::PositiveNumber);
  };

  auto* analyze = app.add_subcommand("analyze", "analyze a built-in system under one of its actions");
  analyze->add_option("--system", system, "system name")->required();
  analyze->add_option("--action", action, "action name (all actions when omitted)");
  analyze->add_option("--params", params, "physical parameters as k=v");
  analyze->add_option("--out", out, "report path ('-' for stdout)")->required();
  add_sampling(analyze);

  auto* verify = app.add_subcommand("verify", "run the reference criteria");
  verify->add_flag("--paper", paper, "run the reference criteria of the built-in catalog")->required();
  verify->add_option("--only", only, "criterion id (1-8) or name");
  add_sampling(verify);

  auto* list = app.add_subcommand("list-systems", "list built-in systems and their actions");

  auto* custom = app.add_subcommand("custom", "analyze a system described by a JSON file");
  custom->add_option("--file", file, "system description")->required();
  custom->add_option("--out", out, "report path ('-' for stdout)")->required();
  add_sampling(custom);

  auto* exporter = app.add_subcommand("export", "write a built-in system in the JSON input format");
  exporter->add_option("--system", system, "system name")->required();
  exporter->add_option("--params", params, "physical parameters as k=v");
  exporter->add_option("--out", out, "output path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitInput;
  }

  try {
    dk::set_default_tolerance(opt.tol);
    if (*list) {
      for (const auto& name : dk::catalog_names()) {
        const dk::SystemSpec s = dk::catalog_spec(name);
        std::cout << name;
        std::string sep = ": ";
        for (const auto& a : s.actions) {
          std::cout << sep << a.name;
          sep = ", ";
        }
        if (!s.params.empty()) {
          std::cout << " (params";
          for (const auto& [k, v] : s.params) std::cout << " " << k << "=" << v;
          std::cout << ")";
        }
        std::cout << "\n";
      }
      return kExitPass;
    }
    if (*exporter) {
      write_text(out, dk::to_json(dk::catalog_spec(system, parse_params(params))).dump(2) + "\n");
      return kExitPass;
    }
    if (*analyze) {
      const dk::CatalogEntry entry = dk::load(system, parse_params(params));
      std::vector<std::string> acts;
      if (!action.empty()) acts.push_back(action);
      try {
        return finish(dk::run_analysis(entry, acts, opt), out);
      } catch (const dk::RankError& e) {
        write_abort(out, system, e);
        throw;
      }
    }
    if (*custom) {
      const dk::SystemSpec spec = dk::load_system_file(file);
      try {
        return finish(dk::run_analysis(dk::build_entry(spec), {}, opt), out);
      } catch (const dk::RankError& e) {
        write_abort(out, spec.name, e);
        throw;
      }
    }
    if (*verify) {
      (void)paper;
      dk::CatalogRuns runs(opt);
      std::vector<std::string> handles;
      if (only.empty()) {
        for (const auto& c : dk::paper_criteria()) handles.push_back(c.id);
      } else {
        handles.push_back(only);
      }
      bool all = true;
      for (const auto& h : handles) {
        const dk::CriterionResult r = dk::run_criterion(h, runs);
        all = all && r.passed;
        std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name << "): " << r.title
                  << "\n";
        for (const auto& l : r.lines)
          std::cout << "    " << (l.ok ? "ok  " : "FAIL") << " " << l.check << ": " << l.detail << "\n";
      }
      return all ? kExitPass : kExitCheckFailure;
    }
  } catch (const dk::RankError& e) {
    std::cerr << "rank abort in stage '" << e.stage() << "': " << e.what() << "\n";
    return kExitRank;
  } catch (const dk::Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
