// metricconn: build and verify metric nonlinear connections for a system of
// second-order ODEs and a generalized Lagrange metric, from a flat problem
// definition file. Exit codes: 0 all checks pass, 1 a tolerance check
// failed or an orbit aborted, 2 invalid input.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mconn/driver.hpp"
#include "mconn/errors.hpp"
#include "mconn/problem.hpp"

namespace {

using namespace mconn;

struct CommonArgs {
  std::string def_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol_algebraic;
  std::optional<double> tol_derived;
  bool json = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("def", args.def_path, "problem definition file")->required();
  cmd->add_option("--seed", [&args](const CLI::results_t& r) {
    args.seed = std::stoull(r[0]);
    return true;
  }, "override the definition seed");
  cmd->add_option("--samples", [&args](const CLI::results_t& r) {
    args.samples = std::stoi(r[0]);
    return true;
  }, "override the sample count");
  cmd->add_option("--tol-algebraic", [&args](const CLI::results_t& r) {
    args.tol_algebraic = std::stod(r[0]);
    return true;
  }, "override the identity-check tolerance");
  cmd->add_option("--tol-derived", [&args](const CLI::results_t& r) {
    args.tol_derived = std::stod(r[0]);
    return true;
  }, "override the derived-check tolerance");
  cmd->add_flag("--json", args.json, "emit newline-delimited records instead of tables");
  cmd->add_option("--threads", args.threads, "worker threads for point sweeps (0 = auto)");
}

RunOptions to_run_options(const CommonArgs& args) {
  RunOptions options;
  options.seed = args.seed;
  options.samples = args.samples;
  options.tol_algebraic = args.tol_algebraic;
  options.tol_derived = args.tol_derived;
  options.threads = args.threads;
  return options;
}

std::vector<double> parse_csv_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
        ++used;
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ValidationError(what + ": malformed number '" + token + "'");
    }
  }
  return out;
}

Point parse_point_arg(const std::string& text, int n, const std::string& what) {
  const auto nums = parse_csv_numbers(text, what);
  if (static_cast<int>(nums.size()) != 2 * n)
    throw ValidationError(what + ": expected " + std::to_string(2 * n) +
                          " comma-separated coordinates (x first, then y)");
  Point u;
  u.x.assign(nums.begin(), nums.begin() + n);
  u.y.assign(nums.begin() + n, nums.end());
  return u;
}

Tensor11Field parse_tensor_arg(const std::string& text, int n) {
  std::string body = text;
  if (!text.empty() && std::filesystem::exists(text)) {
    std::ifstream in(text, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    body = buf.str();
  }
  std::vector<Expr> entries;
  std::string row;
  std::istringstream rows(body);
  while (std::getline(rows, row, ';')) {
    std::string cell;
    std::istringstream cells(row);
    while (std::getline(cells, cell, ',')) {
      try {
        entries.push_back(parse_expression(cell, n));
      } catch (const ParseError& err) {
        throw ValidationError(std::string("--tensor: ") + err.what());
      }
    }
  }
  if (entries.size() != static_cast<std::size_t>(n) * n)
    throw ValidationError("--tensor: expected " + std::to_string(n * n) +
                          " entries ('a,b;c,d' rows or a file holding them)");
  return Tensor11Field(n, std::move(entries));
}

int run(int argc, char** argv) {
  CLI::App app{
      "metric nonlinear connections for sprays and generalized Lagrange metrics"};
  // --help only: the short -h would shadow the integrate --h step flag.
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  CommonArgs check_args;
  bool expect_helmholtz_fail = false;
  CLI::App* check = app.add_subcommand(
      "check", "run the verification battery for a problem definition");
  add_common(check, check_args);
  check->add_flag("--expect-helmholtz-fail", expect_helmholtz_fail,
                  "report a Helmholtz failure as informational");

  CommonArgs conn_args;
  std::string at_arg;
  CLI::App* conn = app.add_subcommand("connection",
                                      "evaluate the metric (or canonic) connection");
  add_common(conn, conn_args);
  conn->add_option("--at", at_arg, "single point 'x1,..,xn,y1,..,yn'");

  CommonArgs family_args;
  std::string tensor_arg;
  CLI::App* family = app.add_subcommand(
      "family", "evaluate a member of the metric-connection family");
  add_common(family, family_args);
  family->add_option("--tensor", tensor_arg, "deformation tensor, inline 'a,b;c,d' or a file")
      ->required();

  CommonArgs herm_args;
  CLI::App* herm = app.add_subcommand(
      "hermitian", "check the almost-Hermitian identities (lagrangian mode)");
  add_common(herm, herm_args);

  CommonArgs integ_args;
  std::string from_arg, transport_arg, out_path;
  double step = 1e-3;
  int steps = 1000;
  CLI::App* integ = app.add_subcommand("integrate", "integrate the SODE orbit");
  add_common(integ, integ_args);
  integ->add_option("--from", from_arg, "start point 'x1,..,xn,y1,..,yn'")->required();
  integ->add_option("--h", step, "step size")->check(CLI::PositiveNumber);
  integ->add_option("--steps", steps, "step count")->check(CLI::NonNegativeNumber);
  integ->add_option("--transport", transport_arg, "initial vertical vector 'v1,..,vn'");
  integ->add_option("--out", out_path, "write the table/stream to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  auto emit = [&out_path](const std::string& text) {
    if (out_path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file '" + out_path + "'");
    out << text;
  };

  if (check->parsed()) {
    const ProblemInstance instance(load_problem(check_args.def_path));
    RunOptions options = to_run_options(check_args);
    options.expect_helmholtz_fail = expect_helmholtz_fail;
    const Report report = run_check(instance, options);
    std::cout << (check_args.json ? render_report_json(report) : render_report_table(report));
    return report.exit_code();
  }

  if (conn->parsed()) {
    const ProblemInstance instance(load_problem(conn_args.def_path));
    std::vector<Point> points;
    if (!at_arg.empty())
      points.push_back(parse_point_arg(at_arg, instance.dim(), "--at"));
    else
      points = instance.sample(conn_args.samples.value_or(-1), conn_args.seed);
    const ConnectionTable table = run_connection(instance, points);
    std::cout << (conn_args.json ? render_connection_json(table)
                                 : render_connection_table(table));
    return 0;
  }

  if (family->parsed()) {
    const ProblemInstance instance(load_problem(family_args.def_path));
    const Tensor11Field tensor = parse_tensor_arg(tensor_arg, instance.dim());
    const std::vector<Point> points =
        instance.sample(family_args.samples.value_or(-1), family_args.seed);
    const FamilyTable table =
        run_family(instance, tensor, points, to_run_options(family_args));
    std::cout << (family_args.json ? render_family_json(table) : render_family_table(table));
    for (const FamilyRow& row : table.rows)
      if (!row.skipped && !row.pass) return 1;
    return 0;
  }

  if (herm->parsed()) {
    const ProblemInstance instance(load_problem(herm_args.def_path));
    const std::vector<Point> points =
        instance.sample(herm_args.samples.value_or(-1), herm_args.seed);
    const HermitianTable table = run_hermitian(instance, points, to_run_options(herm_args));
    std::cout << (herm_args.json ? render_hermitian_json(table)
                                 : render_hermitian_table(table));
    for (const HermitianRow& row : table.rows)
      if (!row.skipped && !row.pass) return 1;
    return 0;
  }

  // integrate
  const ProblemInstance instance(load_problem(integ_args.def_path));
  const Point start = parse_point_arg(from_arg, instance.dim(), "--from");
  std::optional<Eigen::VectorXd> x0;
  if (!transport_arg.empty()) {
    const auto nums = parse_csv_numbers(transport_arg, "--transport");
    if (static_cast<int>(nums.size()) != instance.dim())
      throw ValidationError("--transport: expected " + std::to_string(instance.dim()) +
                            " components");
    Eigen::VectorXd v(instance.dim());
    for (int i = 0; i < instance.dim(); ++i) v(i) = nums[static_cast<std::size_t>(i)];
    x0 = v;
  }
  const IntegrateOutcome outcome = run_integrate(instance, start, step, steps, x0);
  emit(integ_args.json ? render_integrate_json(outcome) : render_integrate_table(outcome));
  return outcome.sode.abort ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
