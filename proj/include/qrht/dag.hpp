#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrht/errors.hpp"

namespace qrht {

enum class Routine { HT, MHT, BlockedHT, BlockedMHT };

std::string routine_name(Routine r);
Routine routine_from_name(const std::string& name);

enum class OpKind : std::uint8_t { Add, Sub, Mul, Div, Sqrt, DotStep, FusedMacro };

struct OpNode {
  std::uint32_t id;
  OpKind kind;
  std::vector<std::uint32_t> preds;
};

/// Operation DAG of a factorization routine with its ASAP level schedule.
/// Node lists are materialized only for small traces (recorded == true);
/// level/count bookkeeping is always exact.
struct OpDag {
  std::size_t total_ops = 0;   // node count
  std::size_t num_levels = 0;  // max ASAP level, sources at level 1
  std::size_t update_flops = 0;  // arithmetic subcount of the trailing updates
  bool recorded = false;
  std::vector<OpNode> nodes;
  std::vector<std::uint32_t> levels;  // per node, when recorded

  /// Full topological re-check: every edge points to an earlier id and ASAP
  /// levels respect every edge. Only meaningful when recorded.
  bool validate() const;
};

/// Symbolic execution of the routine at shape m x n, one node per scalar
/// operation; reductions trace as balanced binary trees.
OpDag trace_dag(Routine routine, std::size_t m, std::size_t n, std::size_t block_size = 0,
                bool record_nodes = false);

/// Average operations per level.
double beta(const OpDag& dag);

/// Level-count ratio MHT/HT for the m x n problem.
double theta(std::size_t m, std::size_t n);

struct ThetaRow {
  std::size_t n;
  double theta;
  double beta_ht;
  double beta_mht;
};

std::vector<ThetaRow> sweep_theta(const std::vector<std::size_t>& sizes);

/// CSV with header "n,theta,beta_ht,beta_mht".
std::string sweep_theta_csv(const std::vector<ThetaRow>& rows);

}  // namespace qrht
