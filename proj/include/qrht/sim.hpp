#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrht/dag.hpp"
#include "qrht/errors.hpp"

namespace qrht {

/// Cycle costs of the PE's functional units plus capacities. All latencies in
/// cycles; loadable from JSON with exactly these key names.
struct CostConfig {
  std::uint32_t add = 4;
  std::uint32_t mul = 4;
  std::uint32_t div = 12;
  std::uint32_t sqrt = 16;
  std::uint32_t dot4 = 8;
  std::uint32_t fused_macro = 9;
  std::uint32_t reg_access = 1;
  std::uint32_t lm_access = 2;
  std::uint32_t gm_access = 40;
  std::uint32_t noc_hop = 4;
  std::uint32_t issue_width = 1;
  std::uint32_t register_file = 256;
  std::uint32_t lm_words = 16384;

  void validate() const;  // throws ConfigError
  static CostConfig from_json_file(const std::string& path);
  std::string to_json() const;
};

struct CycleReport {
  std::string routine;
  std::size_t n = 0;
  std::uint64_t total_cycles = 0;
  double fp_busy_cycles = 0.0;  // peak-equivalent busy cycles, flops / peak rate
  double utilization = 0.0;     // fp_busy_cycles / total_cycles
  double flops = 0.0;           // useful arithmetic (canonical operation count)
  double flops_per_cycle = 0.0;
};

struct ParallelReport {
  std::size_t k = 0;
  std::size_t n = 0;
  CycleReport per_tile;  // aggregate view of the array run
  double speedup = 0.0;  // vs the K=1 run of the same routine and cfg
  double efficiency = 0.0;  // speedup / K^2
};

/// 4-element inner product with the datapath's fixed tree order
/// ((p1+p2)+(p3+p4)).
double dot4(const double v[4], const double a[4]);

/// Reconfigured datapath pass: fused_macro_op(acc, v_i, dot4(v, a)), bitwise
/// equal to composing the two scalar routines.
double dot4_macro(double acc, double v_i, const double v[4], const double a[4]);

/// Latency-weighted list-scheduled replay of the routine's strip-mined DOT4
/// pass graph on the PE resources (pipelined FPS, unpipelined sqrt/div,
/// load-store unit).
CycleReport simulate_pe(Routine routine, std::size_t m, std::size_t n, const CostConfig& cfg);

/// DOT4-tiled n x n matrix multiply, closed-form cycle model; the peak
/// normalization baseline.
CycleReport simulate_gemm(std::size_t n, const CostConfig& cfg);

/// K x K tile array with 2D block-cyclic distribution, panel broadcast costed
/// at noc_hop x Manhattan distance. Requires N % K == 0, K in 1..4.
ParallelReport simulate_tile_array(Routine routine, std::size_t n, std::size_t k,
                                   const CostConfig& cfg);

/// JSON document with the model's headline ratios under cfg.
std::string calibrate_report(const CostConfig& cfg);

/// One issue-trace entry of the list scheduler, exposed for the independent
/// dependency-safety check.
struct IssueRecord {
  std::uint32_t node = 0;
  std::uint64_t issue = 0;
  std::uint64_t complete = 0;
};

/// Runs the PE schedule capturing the issue trace, then re-checks it without
/// the scheduler's bookkeeping: every node issues at or after the completion
/// of all its predecessors. Returns false on any violation.
bool check_pe_schedule(Routine routine, std::size_t m, std::size_t n, const CostConfig& cfg,
                       std::vector<IssueRecord>* trace_out = nullptr);

}  // namespace qrht
