#include <algorithm>
#include <queue>
#include <utility>
#include <vector>

#include "qrht/sim.hpp"
#include "sim_internal.hpp"

// Tile-array model: the matrix is split into an addressable grid of square
// blocks distributed 2D-cyclically over the K x K array, and the block-level
// QR task graph (panel factor, stacked eliminations down the panel, trailing
// updates) is replayed with per-block kernel costs priced by the same pass
// scheduler as the single-PE model. Off-tile dependencies pay noc_hop times
// the Manhattan distance plus the block transfer itself.

namespace qrht {

namespace {

struct KernelCosts {
  std::uint64_t factor = 0;
  std::uint64_t elim = 0;
  std::uint64_t update = 0;
  std::uint64_t ts_update = 0;
};

KernelCosts price_kernels(Routine r, std::size_t nb, const CostConfig& cfg) {
  const bool fused = r == Routine::MHT || r == Routine::BlockedMHT;
  const bool aggregated = r == Routine::BlockedHT || r == Routine::BlockedMHT;
  KernelCosts k;
  k.factor = sim_detail::schedule(sim_detail::build_qr_kernel(fused, nb, nb, cfg), cfg).makespan;
  k.elim =
      sim_detail::schedule(sim_detail::build_qr_kernel(fused, 2 * nb, nb, cfg), cfg).makespan;
  if (aggregated) {
    k.update = sim_detail::schedule(
                   sim_detail::build_aggregated_update_kernel(nb, nb, nb, cfg), cfg)
                   .makespan;
    k.ts_update = sim_detail::schedule(
                      sim_detail::build_aggregated_update_kernel(2 * nb, nb, nb, cfg), cfg)
                      .makespan;
  } else {
    k.update =
        sim_detail::schedule(sim_detail::build_update_kernel(fused, nb, nb, nb, cfg), cfg)
            .makespan;
    k.ts_update =
        sim_detail::schedule(sim_detail::build_update_kernel(fused, 2 * nb, nb, nb, cfg), cfg)
            .makespan;
  }
  return k;
}

constexpr std::uint32_t kNoTask = 0xFFFFFFFFu;

struct TaskGraph {
  std::vector<std::uint64_t> cost;
  std::vector<std::uint32_t> tile_row, tile_col;
  std::vector<std::vector<std::uint32_t>> preds;

  std::uint32_t add(std::uint64_t c, std::uint32_t tr, std::uint32_t tc,
                    std::initializer_list<std::uint32_t> ps) {
    cost.push_back(c);
    tile_row.push_back(tr);
    tile_col.push_back(tc);
    std::vector<std::uint32_t> v;
    for (std::uint32_t p : ps)
      if (p != kNoTask) v.push_back(p);
    preds.push_back(std::move(v));
    return static_cast<std::uint32_t>(cost.size() - 1);
  }
};

std::uint64_t run_array(std::size_t grid, std::size_t k, std::size_t nb, const KernelCosts& kc,
                        const CostConfig& cfg) {
  TaskGraph tg;
  const auto owner_r = [&](std::size_t i) { return static_cast<std::uint32_t>(i % k); };
  const auto owner_c = [&](std::size_t j) { return static_cast<std::uint32_t>(j % k); };

  std::vector<std::uint32_t> state(grid * grid, kNoTask);
  const auto st = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return state[i * grid + j];
  };

  std::vector<std::uint32_t> elim_id(grid, kNoTask);
  for (std::size_t p = 0; p < grid; ++p) {
    const std::uint32_t f = tg.add(kc.factor, owner_r(p), owner_c(p), {st(p, p)});
    st(p, p) = f;
    std::uint32_t prev_elim = f;
    for (std::size_t i = p + 1; i < grid; ++i) {
      const std::uint32_t e = tg.add(kc.elim, owner_r(i), owner_c(p), {st(i, p), prev_elim});
      st(i, p) = e;
      elim_id[i] = e;
      prev_elim = e;
    }
    for (std::size_t j = p + 1; j < grid; ++j) {
      std::uint32_t prev = tg.add(kc.update, owner_r(p), owner_c(j), {st(p, p), st(p, j)});
      st(p, j) = prev;
      for (std::size_t i = p + 1; i < grid; ++i) {
        const std::uint32_t tu =
            tg.add(kc.ts_update, owner_r(i), owner_c(j), {elim_id[i], prev, st(i, j)});
        st(i, j) = tu;
        prev = tu;
      }
    }
  }

  const std::size_t ntasks = tg.cost.size();
  std::vector<std::vector<std::uint32_t>> succ(ntasks);
  std::vector<std::uint32_t> indeg(ntasks, 0);
  for (std::size_t v = 0; v < ntasks; ++v) {
    indeg[v] = static_cast<std::uint32_t>(tg.preds[v].size());
    for (std::uint32_t p : tg.preds[v]) succ[p].push_back(static_cast<std::uint32_t>(v));
  }

  const std::uint64_t block_words = static_cast<std::uint64_t>(nb) * nb;
  const auto comm = [&](std::uint32_t a, std::uint32_t b) -> std::uint64_t {
    const std::uint64_t dist =
        static_cast<std::uint64_t>(
            std::max(tg.tile_row[a], tg.tile_row[b]) - std::min(tg.tile_row[a], tg.tile_row[b])) +
        (std::max(tg.tile_col[a], tg.tile_col[b]) - std::min(tg.tile_col[a], tg.tile_col[b]));
    if (dist == 0) return 0;
    return cfg.noc_hop * dist + (block_words + 3) / 4;
  };

  // Each tile first streams its resident blocks in from the GM column on the
  // array's right edge; only the first block's arrival is exposed.
  std::vector<std::uint64_t> tile_free(k * k, 0);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c)
      tile_free[r * k + c] = cfg.gm_access + cfg.noc_hop * static_cast<std::uint64_t>(k - c) +
                             (block_words + 3) / 4;

  std::vector<std::uint64_t> ready(ntasks, 0), done(ntasks, 0);
  using Item = std::pair<std::uint64_t, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (std::size_t v = 0; v < ntasks; ++v)
    if (indeg[v] == 0) heap.emplace(0, static_cast<std::uint32_t>(v));

  std::uint64_t makespan = 0;
  while (!heap.empty()) {
    const auto [rt, v] = heap.top();
    heap.pop();
    std::uint64_t& tf = tile_free[tg.tile_row[v] * k + tg.tile_col[v]];
    const std::uint64_t start = std::max(rt, tf);
    done[v] = start + tg.cost[v];
    tf = done[v];
    makespan = std::max(makespan, done[v]);
    for (std::uint32_t s : succ[v]) {
      ready[s] = std::max(ready[s], done[v] + comm(v, s));
      if (--indeg[s] == 0) heap.emplace(ready[s], s);
    }
  }
  return makespan;
}

std::size_t pick_grid(std::size_t n, std::size_t k) {
  for (std::size_t g = std::min<std::size_t>(16, n); g > k; --g)
    if (n % g == 0 && g % k == 0) return g;
  return k;
}

}  // namespace

ParallelReport simulate_tile_array(Routine routine, std::size_t n, std::size_t k,
                                   const CostConfig& cfg) {
  cfg.validate();
  if (k < 1 || k > 4) throw ConfigError("tile array dimension must be between 1 and 4");
  if (n < 1 || n % k != 0) throw ConfigError("matrix size must be divisible by K");

  const std::size_t grid = pick_grid(n, k);
  const std::size_t nb = n / grid;
  if (cfg.lm_words < 2 * nb * nb)
    throw ConfigError("local memory cannot hold a working block pair");

  const KernelCosts kc = price_kernels(routine, nb, cfg);
  const std::uint64_t mk = run_array(grid, k, nb, kc, cfg);
  const std::uint64_t m1 = k == 1 ? mk : run_array(grid, 1, nb, kc, cfg);

  ParallelReport rep;
  rep.k = k;
  rep.n = n;
  rep.speedup = static_cast<double>(m1) / static_cast<double>(mk);
  rep.efficiency = rep.speedup / static_cast<double>(k * k);

  CycleReport& pt = rep.per_tile;
  pt.routine = routine_name(routine);
  pt.n = n;
  pt.total_cycles = mk;
  pt.flops = sim_detail::flops_qr(n, n);
  const double peak = 8.0 * cfg.issue_width;
  const double tiles = static_cast<double>(k * k);
  pt.fp_busy_cycles = pt.flops / (peak * tiles);
  pt.utilization = pt.fp_busy_cycles / static_cast<double>(mk);
  pt.flops_per_cycle = pt.flops / (tiles * static_cast<double>(mk));
  return rep;
}

}  // namespace qrht
