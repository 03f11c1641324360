// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include "surfcut/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <set>

#include "surfcut/error.hpp"
#include "surfcut/solve.hpp"

namespace surfcut {

namespace fs = std::filesystem;

namespace {

struct Level {
  BackgroundMesh mesh;
  CutSurfaceMesh cut;
  LinearSystem system;
  AssemblyParams params;
};

std::shared_ptr<Torus> make_torus(const ExperimentConfig& c) {
  return std::make_shared<Torus>(c.major_radius, c.minor_radius);
}

Level build_level(const ExperimentConfig& c, const Torus& torus, const ProblemData& data,
                  double h, double c_F) {
  Level level;
  level.mesh = build_background(c.box_lo, c.box_hi, h);
  level.cut = extract_cut_surface(level.mesh, interpolate_levelset(level.mesh, torus));
  if (level.cut.empty())
    throw GeometryError("the surface does not cut the background mesh at h = " +
                        format_shortest(h) + " (box does not contain it?)");
  level.params.h = h;
  level.params.c_F = c_F;
  level.params.mode = c.mode;
  level.system = assemble(level.mesh, level.cut, data, level.params);
  return level;
}

fs::path prepare_output(const ExperimentConfig& c) {
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("output_dir: cannot create '" + c.output_dir + "'");
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void write_preamble(std::ostream& out, const ExperimentConfig& c, std::string_view command) {
  out << "# surfcut " << version() << '\n';
  out << "# command = " << command << '\n';
  for (const auto& [key, value] : echo(c)) out << "# " << key << " = " << value << '\n';
}

void require_decreasing(const std::vector<double>& h, std::string_view command) {
  if (h.size() < 2)
    throw ConfigError("h: " + std::string(command) + " needs at least two mesh sizes");
  for (std::size_t i = 1; i < h.size(); ++i)
    if (!(h[i] < h[i - 1]))
      throw ConfigError("h: " + std::string(command) + " needs strictly decreasing values");
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_full(*v) : std::string();
}

}  // namespace

void cmd_solve(const ExperimentConfig& c, std::ostream& log) {
  validate(c);
  if (c.h.size() != 1) throw ConfigError("h: solve takes a single mesh size");
  if (c.c_F.size() != 1) throw ConfigError("c_F: solve takes a single value");
  const auto torus = make_torus(c);
  const ProblemData data(torus, benchmark_fields());
  const auto dir = prepare_output(c);

  const Level level = build_level(c, *torus, data, c.h[0], c.c_F[0]);
  if (c.export_obj) {
    auto out = open_output(dir / "gamma_h.obj");
    write_obj(out, level.cut);
  }
  if (c.export_matrix) {
    auto mtx = open_output(dir / "matrix.mtx");
    write_matrix_market(mtx, level.system.A);
    auto rhs = open_output(dir / "rhs.txt");
    write_vector(rhs, level.system.b);
  }

  const auto u = solve(level.system, c.rel_tol);
  const double residual = relative_residual(level.system.A, u, level.system.b);
  if (c.export_solution) {
    auto out = open_output(dir / "solution.txt");
    for (std::size_t i = 0; i < u.size(); ++i)
      out << level.system.dofs.vertex_of_dof[i] << ' ' << format_full(u[i]) << '\n';
  }
  const auto err = error_norms(u, level.system.dofs, level.mesh, level.cut, data, level.params);

  auto report = open_output(dir / "report.csv");
  write_preamble(report, c, "solve");
  report << "h,N,l2_error,energy_error,grad_error,residual\n";
  report << format_full(c.h[0]) << ',' << u.size() << ',' << format_full(err.l2_error) << ','
         << format_full(err.energy_error) << ',' << format_full(err.grad_error) << ','
         << format_full(residual) << '\n';

  log << "h = " << format_shortest(c.h[0]) << "  N = " << u.size()
      << "  l2 = " << format_full(err.l2_error) << "  energy = " << format_full(err.energy_error)
      << "  grad = " << format_full(err.grad_error) << "  residual = " << format_full(residual)
      << '\n';
}

void cmd_convergence(const ExperimentConfig& c, std::ostream& log) {
  validate(c);
  require_decreasing(c.h, "convergence");
  if (c.c_F.size() != 1) throw ConfigError("c_F: convergence takes a single value");
  const auto torus = make_torus(c);
  const ProblemData data(torus, benchmark_fields());
  const auto dir = prepare_output(c);

  auto csv = open_output(dir / "convergence.csv");
  write_preamble(csv, c, "convergence");
  csv << "h,N,l2_error,energy_error,grad_error,eoc_l2,eoc_energy,eoc_grad\n";
  csv.flush();

  std::optional<ConvergenceRow> previous;
  for (double h : c.h) {
    ConvergenceRow row;
    try {
      const Level level = build_level(c, *torus, data, h, c.c_F[0]);
      const auto u = solve(level.system, c.rel_tol);
      row.h = h;
      row.dofs = u.size();
      row.errors = error_norms(u, level.system.dofs, level.mesh, level.cut, data, level.params);
    } catch (const Error& e) {
      csv << "# FAILED h = " << format_shortest(h) << ": " << e.what() << '\n';
      csv.flush();
      throw;
    }
    if (previous) {
      row.eoc_l2 = eoc(previous->errors.l2_error, row.errors.l2_error, previous->h, h);
      row.eoc_energy =
          eoc(previous->errors.energy_error, row.errors.energy_error, previous->h, h);
      row.eoc_grad = eoc(previous->errors.grad_error, row.errors.grad_error, previous->h, h);
    }
    csv << format_full(h) << ',' << row.dofs << ',' << format_full(row.errors.l2_error) << ','
        << format_full(row.errors.energy_error) << ',' << format_full(row.errors.grad_error)
        << ',' << optional_cell(row.eoc_l2) << ',' << optional_cell(row.eoc_energy) << ','
        << optional_cell(row.eoc_grad) << '\n';
    csv.flush();
    log << "h = " << format_shortest(h) << "  N = " << row.dofs
        << "  l2 = " << format_full(row.errors.l2_error)
        << "  energy = " << format_full(row.errors.energy_error)
        << "  grad = " << format_full(row.errors.grad_error) << '\n';
    previous = row;
  }
}

void cmd_condition(const ExperimentConfig& c, std::ostream& log) {
  validate(c);
  require_decreasing(c.h, "condition");
  for (double cf : c.c_F)
    if (!(cf > 0.0)) throw ConfigError("c_F: condition needs positive values");
  const auto torus = make_torus(c);
  const ProblemData data(torus, benchmark_fields());
  const auto dir = prepare_output(c);
  const ConditionOptions options{c.max_iterations, c.rel_change};

  auto csv = open_output(dir / "condition.csv");
  write_preamble(csv, c, "condition");
  csv << "c_F,h,N,sigma_max,sigma_min,kappa,status\n";

  int failures = 0;
  std::string first_failure;
  for (double cf : c.c_F) {
    std::vector<double> hs;
    std::vector<double> kappas;
    for (double h : c.h) {
      const Level level = build_level(c, *torus, data, h, cf);
      const auto n = level.system.dofs.size();
      csv << format_full(cf) << ',' << format_full(h) << ',' << n << ',';
      try {
        const auto report = condition_number(level.system.A, options);
        csv << format_full(report.sigma_max) << ',' << format_full(report.sigma_min) << ','
            << format_full(report.kappa) << ",ok\n";
        hs.push_back(h);
        kappas.push_back(report.kappa);
        log << "c_F = " << format_shortest(cf) << "  h = " << format_shortest(h) << "  N = " << n
            << "  kappa = " << format_full(report.kappa) << '\n';
      } catch (const ConvergenceError& e) {
        csv << ",,,not_converged\n";
        if (failures++ == 0) first_failure = e.what();
        log << "c_F = " << format_shortest(cf) << "  h = " << format_shortest(h)
            << "  estimator did not converge: " << e.what() << '\n';
      }
      csv.flush();
    }
    csv << format_full(cf) << ",,,,,";
    if (hs.size() >= 2) {
      const double slope = loglog_slope(hs, kappas);
      csv << format_full(slope);
      log << "c_F = " << format_shortest(cf) << "  slope = " << format_full(slope) << '\n';
    }
    csv << ",slope\n";
    csv.flush();
  }
  if (failures > 0)
    throw ConvergenceError(std::to_string(failures) + " condition estimate(s) did not converge; "
                               "first: " + first_failure,
                           0.0, 0);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Stabilized cut finite elements for surface convection on a torus", "surfcut");
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  std::string config_path;
  std::vector<CLI::App*> commands;
  for (const char* name : {"solve", "convergence", "condition"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key = value file");
    sub->allow_extras();
    sub->footer(
        "Any config key may be overridden with --key value, e.g. --h 0.1 or "
        "--c_F \"1e-2, 1\".\nFlags: --export-matrix, --allow-unstabilized.");
    commands.push_back(sub);
  }
  commands[0]->description("single solve: gamma_h.obj, solution.txt, report.csv");
  commands[1]->description("convergence study over the h list: convergence.csv");
  commands[2]->description("condition numbers over h and c_F lists: condition.csv");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return 0;
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::config);
  }

  CLI::App* command = nullptr;
  for (auto* sub : commands)
    if (sub->parsed()) command = sub;

  try {
    ExperimentConfig config;
    if (!config_path.empty()) load_config_file(config_path, config);

    static const std::set<std::string> flags = {"export_obj", "export_solution", "export_matrix",
                                                "allow_unstabilized"};
    const auto extras = command->remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      const std::string& token = extras[i];
      if (token.rfind("--", 0) != 0 || token.size() < 3)
        throw ConfigError("unexpected argument '" + token + "'");
      std::string key = token.substr(2);
      std::string value;
      if (const auto eq = key.find('='); eq != std::string::npos) {
        value = key.substr(eq + 1);
        key.resize(eq);
      } else {
        std::string norm = key;
        for (char& ch : norm)
          if (ch == '-') ch = '_';
        const bool has_value = i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0;
        if (has_value)
          value = extras[++i];
        else if (flags.count(norm))
          value = "true";
        else
          throw ConfigError("--" + key + ": missing value");
      }
      apply_setting(config, key, value, "command line");
    }

    const std::string name = command->get_name();
    if (name == "solve")
      cmd_solve(config, out);
    else if (name == "convergence")
      cmd_convergence(config, out);
    else
      cmd_condition(config, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::config);
  }
  return 0;
}

}  // namespace surfcut
