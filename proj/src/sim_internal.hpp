#pragma once

#include <cstdint>
#include <vector>

#include "qrht/sim.hpp"

// Shared between the single-PE scheduler and the tile-array model: strip-mined
// DOT4 pass graphs and the list scheduler that prices them.

namespace qrht::sim_detail {

enum class Unit : std::uint8_t { Fps, Sqrt, Div, Ls };

struct PassGraph {
  std::vector<std::uint8_t> unit;
  std::vector<std::uint16_t> latency;
  std::vector<std::uint32_t> pred_off;  // size() + 1 offsets into preds
  std::vector<std::uint32_t> preds;

  std::size_t size() const { return unit.size(); }
};

inline constexpr std::uint32_t kNone = 0xFFFFFFFFu;

class GraphBuilder {
 public:
  GraphBuilder() { g_.pred_off.push_back(0); }

  std::uint32_t emit(Unit u, std::uint32_t lat, std::initializer_list<std::uint32_t> ps) {
    return emit(u, lat, ps.begin(), ps.size());
  }

  std::uint32_t emit(Unit u, std::uint32_t lat, const std::uint32_t* ps, std::size_t np) {
    g_.unit.push_back(static_cast<std::uint8_t>(u));
    g_.latency.push_back(static_cast<std::uint16_t>(lat));
    for (std::size_t i = 0; i < np; ++i)
      if (ps[i] != kNone) g_.preds.push_back(ps[i]);
    g_.pred_off.push_back(static_cast<std::uint32_t>(g_.preds.size()));
    return static_cast<std::uint32_t>(g_.unit.size() - 1);
  }

  std::size_t size() const { return g_.unit.size(); }
  PassGraph take() { return std::move(g_); }

 private:
  PassGraph g_;
};

struct ScheduleResult {
  std::uint64_t makespan = 0;
  std::uint64_t fp_issues = 0;
};

ScheduleResult schedule(const PassGraph& g, const CostConfig& cfg,
                        std::vector<IssueRecord>* trace = nullptr);

/// Full unblocked or blocked factorization pass graph for one PE.
PassGraph build_pe_graph(Routine routine, std::size_t m, std::size_t n, std::size_t block,
                         const CostConfig& cfg);

/// Micro-kernels priced individually for the tile-array model.
PassGraph build_qr_kernel(bool fused, std::size_t m, std::size_t n, const CostConfig& cfg);
PassGraph build_update_kernel(bool fused, std::size_t rows, std::size_t cols, std::size_t nref,
                              const CostConfig& cfg);
PassGraph build_aggregated_update_kernel(std::size_t rows, std::size_t cols, std::size_t nref,
                                         const CostConfig& cfg);

/// Canonical useful-flop count of an m x n Householder QR.
double flops_qr(std::size_t m, std::size_t n);

/// Panel width used when a blocked routine is priced on a single PE.
std::size_t default_block(std::size_t n);

}  // namespace qrht::sim_detail
