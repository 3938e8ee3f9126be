#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrht/blas.hpp"
#include "qrht/dag.hpp"
#include "qrht/eig.hpp"
#include "qrht/errors.hpp"
#include "qrht/householder.hpp"
#include "qrht/matrix_market.hpp"
#include "qrht/modified.hpp"
#include "qrht/random.hpp"
#include "qrht/sim.hpp"

using nlohmann::ordered_json;
using namespace qrht;

namespace {

constexpr int kSchemaVersion = 1;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path, 0);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

QrFactorization run_routine(Routine r, const Matrix& a, std::size_t block) {
  switch (r) {
    case Routine::HT:
      return geqr2(a);
    case Routine::MHT:
      return geqr2ht(a);
    case Routine::BlockedHT:
      return geqrf(a, block);
    case Routine::BlockedMHT:
      return geqrfht(a, block);
  }
  throw ConfigError("unknown routine");
}

Matrix thin_q(const QrFactorization& f) {
  Matrix q = f.form_q();
  Matrix qt(q.rows(), f.n);
  for (std::size_t j = 0; j < f.n; ++j)
    for (std::size_t i = 0; i < q.rows(); ++i) qt(i, j) = q(i, j);
  return qt;
}

double residual(const Matrix& a, const QrFactorization& f) {
  Matrix qr = gemm(thin_q(f), f.r());
  double s = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double d = qr(i, j) - a(i, j);
      s += d * d;
    }
  const double na = a.frobenius_norm();
  return na > 0 ? std::sqrt(s) / na : std::sqrt(s);
}

double orthogonality(const QrFactorization& f) {
  Matrix q = f.form_q();
  double s = 0.0;
  for (std::size_t i = 0; i < q.cols(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < q.rows(); ++k) d += q(k, i) * q(k, j);
      if (i == j) d -= 1.0;
      s += d * d;
    }
  return std::sqrt(s);
}

ordered_json cycle_json(const CycleReport& r) {
  return {{"routine", r.routine},
          {"n", r.n},
          {"total_cycles", r.total_cycles},
          {"fp_busy_cycles", r.fp_busy_cycles},
          {"utilization", r.utilization},
          {"flops", r.flops},
          {"flops_per_cycle", r.flops_per_cycle}};
}

int cmd_factor(const std::string& input, const std::vector<std::size_t>& random_dims,
               const std::string& routine, std::size_t block, std::uint64_t seed,
               std::string output) {
  Matrix a(1, 1);
  if (!random_dims.empty())
    a = random_matrix(random_dims[0], random_dims[1], seed);
  else
    a = read_matrix_market(input);
  if (a.rows() < a.cols()) {
    std::cerr << "wide matrix unsupported\n";
    return 2;
  }
  const Routine r = routine_from_name(routine);
  if (block == 0) block = std::max<std::size_t>(1, std::min<std::size_t>(32, a.cols()));
  const QrFactorization f = run_routine(r, a, block);

  if (output.empty()) output = "factor";
  write_matrix_market(f.form_q(), output + "_q.mtx");
  write_matrix_market(f.r(), output + "_r.mtx");

  const Matrix rr = f.r();
  bool tri = true;
  for (std::size_t j = 0; j < rr.cols(); ++j)
    for (std::size_t i = j + 1; i < rr.rows(); ++i)
      if (rr(i, j) != 0.0) tri = false;

  ordered_json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["routine"] = routine;
  rep["m"] = a.rows();
  rep["n"] = a.cols();
  rep["residual"] = residual(a, f);
  rep["orthogonality"] = orthogonality(f);
  rep["triangular_ok"] = tri;
  if (!random_dims.empty()) {
    rep["seed"] = seed;
    rep["rng"] = kRngAlgorithm;
  }
  write_text(output + "_report.json", rep.dump(2));
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_analyze(std::vector<std::size_t> sizes, const std::string& format,
                const std::string& output) {
  if (sizes.empty())
    for (std::size_t s = 4; s <= 512; s *= 2) sizes.push_back(s);
  const std::vector<ThetaRow> rows = sweep_theta(sizes);
  if (format == "json") {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["rows"] = ordered_json::array();
    for (const ThetaRow& r : rows)
      j["rows"].push_back(
          {{"n", r.n}, {"theta", r.theta}, {"beta_ht", r.beta_ht}, {"beta_mht", r.beta_mht}});
    write_text(output, j.dump(2));
  } else {
    std::string csv = "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    csv += sweep_theta_csv(rows);
    write_text(output, csv);
  }
  if (!rows.empty())
    std::cerr << "theta saturates near " << rows.back().theta << " at n=" << rows.back().n
              << "\n";
  return 0;
}

int cmd_simulate(const std::string& routine, std::size_t n, std::size_t k,
                 const std::string& config, bool calibrate, const std::string& format,
                 const std::string& output) {
  CostConfig cfg;
  if (!config.empty()) cfg = CostConfig::from_json_file(config);
  if (calibrate) {
    write_text(output, calibrate_report(cfg));
    return 0;
  }
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  std::string csv;
  if (routine == "gemm") {
    const CycleReport r = simulate_gemm(n, cfg);
    j["report"] = cycle_json(r);
    csv = "routine,n,total_cycles,utilization\n" + r.routine + "," + std::to_string(r.n) + "," +
          std::to_string(r.total_cycles) + "," + std::to_string(r.utilization) + "\n";
  } else if (k <= 1) {
    const CycleReport r = simulate_pe(routine_from_name(routine), n, n, cfg);
    j["report"] = cycle_json(r);
    csv = "routine,n,total_cycles,utilization\n" + r.routine + "," + std::to_string(r.n) + "," +
          std::to_string(r.total_cycles) + "," + std::to_string(r.utilization) + "\n";
  } else {
    const ParallelReport r = simulate_tile_array(routine_from_name(routine), n, k, cfg);
    j["report"] = {{"k", r.k},
                   {"n", r.n},
                   {"speedup", r.speedup},
                   {"efficiency", r.efficiency},
                   {"per_tile", cycle_json(r.per_tile)}};
    csv = "routine,n,k,total_cycles,speedup,efficiency,utilization\n" + r.per_tile.routine +
          "," + std::to_string(r.n) + "," + std::to_string(r.k) + "," +
          std::to_string(r.per_tile.total_cycles) + "," + std::to_string(r.speedup) + "," +
          std::to_string(r.efficiency) + "," + std::to_string(r.per_tile.utilization) + "\n";
  }
  if (format == "csv")
    write_text(output, "# schema_version=" + std::to_string(kSchemaVersion) + "\n" + csv);
  else
    write_text(output, j.dump(2));
  return 0;
}

int cmd_eig(const std::string& input, std::size_t random_n, std::uint64_t seed,
            std::size_t iters, double tol, const std::string& output) {
  Matrix a = random_n ? random_symmetric(random_n, seed) : read_matrix_market(input);
  const EigResult r = qr_algorithm_eigenvalues(a, iters, tol);
  if (!r.symmetric_input) std::cerr << "warning: input is not symmetric within tolerance\n";
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["values"] = r.values;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["max_offdiag"] = r.max_offdiag;
  if (random_n) {
    j["seed"] = seed;
    j["rng"] = kRngAlgorithm;
  }
  write_text(output, j.dump(2));
  return 0;
}

int cmd_bench(const std::vector<std::string>& routines, const std::vector<std::size_t>& sizes,
              std::size_t repeats, std::uint64_t seed, bool parallel,
              const std::string& output) {
  struct Cell {
    std::string routine;
    std::size_t n;
    double median_ms = 0, min_ms = 0, max_ms = 0;
  };
  std::vector<Cell> cells;
  for (const std::string& rt : routines)
    for (std::size_t n : sizes) cells.push_back({rt, n, 0, 0, 0});

  const auto run_cell = [&](Cell& c) {
    const Routine r = routine_from_name(c.routine);
    const Matrix a = random_matrix(c.n, c.n, seed);
    const std::size_t block = std::max<std::size_t>(1, std::min<std::size_t>(32, c.n));
    std::vector<double> ms;
    for (std::size_t i = 0; i < repeats; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      run_routine(r, a, block);
      const auto t1 = std::chrono::steady_clock::now();
      ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(ms.begin(), ms.end());
    c.median_ms = ms[ms.size() / 2];
    c.min_ms = ms.front();
    c.max_ms = ms.back();
  };

  if (parallel) {
    std::vector<std::thread> pool;
    for (Cell& c : cells) pool.emplace_back(run_cell, std::ref(c));
    for (std::thread& t : pool) t.join();
  } else {
    for (Cell& c : cells) run_cell(c);
  }

  std::string csv = "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
  csv += "routine,n,median_ms,min_ms,max_ms\n";
  for (const Cell& c : cells) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%zu,%.3f,%.3f,%.3f\n", c.routine.c_str(), c.n,
                  c.median_ms, c.min_ms, c.max_ms);
    csv += buf;
  }
  write_text(output, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Householder QR toolkit: factorization, DAG analysis, PE and tile-array "
               "simulation, QR-iteration eigenvalues"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  std::string output;
  std::string format = "json";
  app.add_option("--seed", seed, "PRNG seed for generated inputs");
  app.add_option("--output", output, "output file (default: stdout or command prefix)");
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* factor = app.add_subcommand("factor", "factor a matrix and report backward error");
  std::string f_input, f_routine = "mht";
  std::vector<std::size_t> f_random;
  std::size_t f_block = 0;
  factor->add_option("input", f_input, "Matrix Market input file");
  factor->add_option("--random", f_random, "generate a random m x n input")->expected(2);
  factor->add_option("--routine", f_routine, "ht | mht | blocked-ht | blocked-mht");
  factor->add_option("--block", f_block, "panel width for blocked routines");

  auto* analyze = app.add_subcommand("analyze", "sweep the DAG depth ratio theta over sizes");
  std::vector<std::size_t> a_sizes;
  analyze->add_option("--sizes", a_sizes, "matrix sizes to sweep");

  auto* simulate = app.add_subcommand("simulate", "cycle model of one PE or a K x K tile array");
  std::string s_routine = "mht", s_config;
  std::size_t s_n = 128, s_k = 0;
  bool s_calibrate = false;
  simulate->add_option("--routine", s_routine, "ht | mht | blocked-ht | blocked-mht | gemm");
  simulate->add_option("--n", s_n, "matrix size");
  simulate->add_option("--k", s_k, "tile array dimension (omit for single PE)");
  simulate->add_option("--config", s_config, "cost config JSON file");
  simulate->add_flag("--calibrate", s_calibrate, "emit the headline-ratio calibration report");

  auto* eig = app.add_subcommand("eig", "QR-iteration eigenvalues of a symmetric matrix");
  std::string e_input;
  std::size_t e_random = 0, e_iters = 500;
  double e_tol = 1e-10;
  eig->add_option("input", e_input, "Matrix Market input file");
  eig->add_option("--random", e_random, "generate a random symmetric n x n input");
  eig->add_option("--iters", e_iters, "iteration cap");
  eig->add_option("--tol", e_tol, "off-diagonal convergence tolerance");

  auto* bench = app.add_subcommand("bench", "wall-clock timing of the factorization routines");
  std::vector<std::string> b_routines = {"mht"};
  std::vector<std::size_t> b_sizes = {128};
  std::size_t b_repeats = 3;
  bool b_parallel = false;
  bench->add_option("--routines", b_routines, "routines to time");
  bench->add_option("--sizes", b_sizes, "matrix sizes to time");
  bench->add_option("--repeats", b_repeats, "repetitions per cell (median reported)");
  bench->add_flag("--parallel", b_parallel, "run independent cells on separate threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (factor->parsed()) {
      if (f_input.empty() && f_random.empty()) {
        std::cerr << "factor: provide an input file or --random m n\n";
        return 1;
      }
      return cmd_factor(f_input, f_random, f_routine, f_block, seed, output);
    }
    if (analyze->parsed())
      return cmd_analyze(a_sizes, app.count("--format") ? format : "csv", output);
    if (simulate->parsed())
      return cmd_simulate(s_routine, s_n, s_k, s_config, s_calibrate, format, output);
    if (eig->parsed()) {
      if (e_input.empty() && e_random == 0) {
        std::cerr << "eig: provide an input file or --random n\n";
        return 1;
      }
      return cmd_eig(e_input, e_random, seed, e_iters, e_tol, output);
    }
    if (bench->parsed()) return cmd_bench(b_routines, b_sizes, b_repeats, seed, b_parallel, output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
