#include "commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ccres/continuation.hpp"
#include "ccres/errors.hpp"
#include "ccres/rootfinding.hpp"
#include "ccres/scattering.hpp"

namespace ccres::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Writes to the --output file, or standard output when none was given.
class CsvSink {
public:
  explicit CsvSink(CommandIo& io) : io_(io) {
    if (io.csv) {
      file_.open(*io.csv, std::ios::out | std::ios::trunc);
      if (!file_) throw Error(ErrorKind::config, "--output: cannot open '" + io.csv->string() + "'");
    }
  }
  std::ostream& stream() { return io_.csv ? static_cast<std::ostream&>(file_) : io_.out; }

private:
  CommandIo& io_;
  std::ofstream file_;
};

std::vector<RootResult> find_starts(const ResidualEvaluator& evaluator, const RunConfig& config) {
  if (config.scan_starts) {
    return scan_bound_states(evaluator, config.lambda(), config.scan_k_max, config.newton);
  }
  std::vector<RootResult> roots;
  for (const cplx& k0 : config.start_k) {
    roots.push_back(newton_complex(evaluator, config.lambda(), k0, config.newton));
  }
  return roots;
}

void describe(const RunConfig& c, std::ostream& err) {
  fmt::print(err, "channels l = {}, mu = {}; parameter lambda[{},{}] = {}\n",
             fmt::join(c.channels.l_values, " "), c.channels.mu, c.parameter.row + 1,
             c.parameter.col + 1, c.lambda());
  fmt::print(err, "grid r_max = {}, n_points = {}; kernel backend {}\n", c.grid.r_max,
             c.grid.n_points, kernels::backend_name(kernels::preferred_backend()));
}

}  // namespace

std::string format_k(cplx k) {
  if (std::abs(k.real()) < kAxisTolerance) return fmt::format("{:.6e}i", k.imag());
  return fmt::format("{:.6e}{:+.6e}i", k.real(), k.imag());
}

std::string csv_number(double x) { return fmt::format("{:.8e}", x); }

int cmd_roots(const RunConfig& config, CommandIo& io) {
  const auto start = Clock::now();
  if (io.verbose) describe(config, io.err);
  const ResidualEvaluator evaluator(config.model(), config.grid);
  const std::vector<RootResult> roots = find_starts(evaluator, config);

  for (const auto& r : roots) fmt::print(io.out, "{}\n", format_k(r.k));

  CsvSink sink(io);
  auto& csv = sink.stream();
  fmt::print(csv, "index,re_k,im_k,residual_norm,iterations,classification\n");
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto& r = roots[i];
    fmt::print(csv, "{},{},{},{},{},{}\n", i, csv_number(r.k.real()), csv_number(r.k.imag()),
               csv_number(r.residual_norm), r.iterations, to_string(r.classification));
  }
  if (io.verbose) {
    for (const auto& r : roots) {
      fmt::print(io.err, "  {:>28}  |det F| = {:.2e}  {} Newton steps  {}\n", format_k(r.k),
                 r.residual_norm, r.iterations, to_string(r.classification));
    }
    fmt::print(io.err, "{} root(s) in {:.3f} s\n", roots.size(), seconds_since(start));
  }
  return ExitCode::ok;
}

int cmd_continue(const RunConfig& config, CommandIo& io) {
  const auto start = Clock::now();
  if (io.verbose) describe(config, io.err);
  const double lambda0 = config.lambda();
  if (lambda0 < config.continuation.lambda_min || lambda0 > config.continuation.lambda_max) {
    throw Error(ErrorKind::config, "potential.strengths: the parameter entry lies outside "
                                   "[continuation.lambda_min, continuation.lambda_max]");
  }
  const ResidualEvaluator evaluator(config.model(), config.grid);
  const std::vector<RootResult> roots = find_starts(evaluator, config);

  CsvSink sink(io);
  auto& csv = sink.stream();
  fmt::print(csv, "branch_id,point_index,lambda,re_k,im_k,residual_norm,flag\n");
  int branch_id = 0;
  for (const auto& root : roots) {
    for (int direction : {-1, +1}) {
      const auto branch_start = Clock::now();
      Branch branch;
      try {
        branch = trace_branch(evaluator, root, lambda0, direction, config.continuation);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::config) throw;
        ContinuationPoint only;
        only.x = Vec3(root.k.real(), root.k.imag(), lambda0);
        only.residual_norm = root.residual_norm;
        only.flag = PointFlag::boundary;
        branch.points.push_back(only);
        if (io.verbose) fmt::print(io.err, "branch {}: stopped at the start ({})\n", branch_id, e.what());
      }
      for (std::size_t i = 0; i < branch.points.size(); ++i) {
        const auto& p = branch.points[i];
        fmt::print(csv, "{},{},{},{},{},{},{}\n", branch_id, i, csv_number(p.x(2)),
                   csv_number(p.x(0)), csv_number(p.x(1)), csv_number(p.residual_norm),
                   to_string(p.flag));
        if (p.flag == PointFlag::branch_point) {
          fmt::print(io.out, "branch {}: branch point at lambda = {:.7f}, k = {}\n", branch_id,
                     p.x(2), format_k({p.x(0), p.x(1)}));
        }
      }
      if (io.verbose) {
        const auto& last = branch.points.back();
        fmt::print(io.err, "branch {} from {} (dlambda {:+d}): {} points, ends at lambda = {:.6f}, k = {}, {:.2f} s\n",
                   branch_id, format_k(root.k), direction, branch.points.size(), last.x(2),
                   format_k({last.x(0), last.x(1)}), seconds_since(branch_start));
      }
      ++branch_id;
    }
  }
  if (io.verbose) fmt::print(io.err, "{} branch(es) in {:.2f} s\n", branch_id, seconds_since(start));
  return ExitCode::ok;
}

int cmd_check(const RunConfig& config, CommandIo& io) {
  const auto start = Clock::now();
  if (io.verbose) describe(config, io.err);
  const auto outcomes = run_checks(config, io.verbose, io.err);

  CsvSink sink(io);
  auto& csv = sink.stream();
  fmt::print(csv, "property,status,detail\n");
  int failed = 0;
  for (const auto& o : outcomes) {
    fmt::print(io.out, "{} {}: {}\n", o.passed ? "PASS" : "FAIL", o.name, o.detail);
    fmt::print(csv, "{},{},\"{}\"\n", o.name, o.passed ? "pass" : "fail", o.detail);
    if (!o.passed) ++failed;
  }
  if (failed > 0) {
    std::vector<std::string> names;
    for (const auto& o : outcomes) {
      if (!o.passed) names.push_back(o.name);
    }
    fmt::print(io.err, "{} check(s) failed: {}\n", failed, fmt::join(names, ", "));
  }
  if (io.verbose) fmt::print(io.err, "checks finished in {:.2f} s\n", seconds_since(start));
  return failed == 0 ? ExitCode::ok : ExitCode::numerical_failure;
}

}  // namespace ccres::cli
