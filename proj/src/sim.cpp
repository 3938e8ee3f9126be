#include "qrht/sim.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <utility>

#include <json.hpp>

#include "qrht/modified.hpp"
#include "sim_internal.hpp"

namespace qrht {

double dot4(const double v[4], const double a[4]) {
  const double p1 = v[0] * a[0];
  const double p2 = v[1] * a[1];
  const double p3 = v[2] * a[2];
  const double p4 = v[3] * a[3];
  return (p1 + p2) + (p3 + p4);
}

double dot4_macro(double acc, double v_i, const double v[4], const double a[4]) {
  return fused_macro_op(acc, v_i, dot4(v, a));
}

void CostConfig::validate() const {
  const std::uint32_t lat[] = {add, mul,        div,       sqrt,      dot4,
                               fused_macro, reg_access, lm_access, gm_access, noc_hop};
  for (std::uint32_t l : lat)
    if (l < 1) throw ConfigError("latencies must be at least 1 cycle");
  if (issue_width < 1) throw ConfigError("issue width must be at least 1");
  if (register_file < 8) throw ConfigError("register file capacity must be at least 8");
  if (lm_words < 4) throw ConfigError("local memory must hold at least 4 words");
}

namespace {

struct KeySlot {
  const char* name;
  std::uint32_t CostConfig::* field;
};

constexpr KeySlot kConfigKeys[] = {
    {"add", &CostConfig::add},
    {"mul", &CostConfig::mul},
    {"div", &CostConfig::div},
    {"sqrt", &CostConfig::sqrt},
    {"dot4", &CostConfig::dot4},
    {"fused_macro", &CostConfig::fused_macro},
    {"reg_access", &CostConfig::reg_access},
    {"lm_access", &CostConfig::lm_access},
    {"gm_access", &CostConfig::gm_access},
    {"noc_hop", &CostConfig::noc_hop},
    {"issue_width", &CostConfig::issue_width},
    {"register_file", &CostConfig::register_file},
    {"lm_words", &CostConfig::lm_words},
};

}  // namespace

CostConfig CostConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  CostConfig cfg;
  for (const auto& item : j.items()) {
    bool known = false;
    for (const KeySlot& slot : kConfigKeys) {
      if (item.key() == slot.name) {
        if (!item.value().is_number_integer() && !item.value().is_number_unsigned())
          throw ConfigError("config key '" + item.key() + "' must be an integer");
        const auto v = item.value().get<std::int64_t>();
        if (v < 0 || v > 0xFFFF) throw ConfigError("config key '" + item.key() + "' out of range");
        cfg.*(slot.field) = static_cast<std::uint32_t>(v);
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown config key: " + item.key());
  }
  cfg.validate();
  return cfg;
}

std::string CostConfig::to_json() const {
  nlohmann::ordered_json j;
  for (const KeySlot& slot : kConfigKeys) j[slot.name] = this->*(slot.field);
  return j.dump(2);
}

namespace sim_detail {

double flops_qr(std::size_t m, std::size_t n) {
  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  return 2.0 * dn * dn * (dm - dn / 3.0);
}

std::size_t default_block(std::size_t n) {
  std::size_t b = 4 * ((n + 10) / 22);
  b = std::clamp<std::size_t>(b, 4, 48);
  return std::min(b, n);
}

namespace {

struct Ctx {
  GraphBuilder b;
  const CostConfig& cfg;
  std::size_t m;
  std::vector<std::uint32_t> col_ver;
};

std::size_t chunks(std::size_t len) { return (len + 3) / 4; }

// One classical reflector step at column k: norm chain, scalar formation,
// v and u = 2v passes, then per trailing column a dot chain plus the
// three-pass elementwise update. Trailing columns run to tend.
void step_classic(Ctx& c, std::size_t k, std::size_t tend, std::vector<std::uint32_t>* vout) {
  const CostConfig& q = c.cfg;
  const std::size_t L = c.m - k;
  const std::size_t C = chunks(L);

  std::uint32_t prev = kNone;
  for (std::size_t i = 0; i < C; ++i)
    prev = c.b.emit(Unit::Fps, q.dot4, {prev, c.col_ver[k]});
  const std::uint32_t sq = c.b.emit(Unit::Sqrt, q.sqrt, {prev});
  const std::uint32_t alpha = c.b.emit(Unit::Fps, q.mul, {sq});
  const std::uint32_t beta = c.b.emit(Unit::Fps, q.add, {alpha});
  const std::uint32_t rec = c.b.emit(Unit::Div, q.div, {beta});

  std::vector<std::uint32_t> vch(C), uch(C);
  for (std::size_t i = 0; i < C; ++i) {
    vch[i] = c.b.emit(Unit::Fps, q.mul, {rec, c.col_ver[k]});
    uch[i] = c.b.emit(Unit::Fps, q.add, {vch[i]});
  }
  c.col_ver[k] = vch[C - 1];

  for (std::size_t j = k + 1; j < tend; ++j) {
    prev = kNone;
    for (std::size_t i = 0; i < C; ++i)
      prev = c.b.emit(Unit::Fps, q.dot4, {prev, vch[i], c.col_ver[j]});
    const std::uint32_t w = prev;
    std::uint32_t last = w;
    for (std::size_t i = 0; i < C; ++i) {
      const std::uint32_t t1 = c.b.emit(Unit::Fps, q.mul, {w, uch[i], c.col_ver[j]});
      const std::uint32_t t2 = c.b.emit(Unit::Fps, q.add, {t1});
      last = c.b.emit(Unit::Fps, q.add, {t2});
    }
    c.col_ver[j] = last;
  }
  if (vout) *vout = std::move(vch);
}

// One fused reflector step: the trailing tail dots read the raw columns and
// issue before the pivot's norm chain resolves; per 4 trailing columns the
// normalization head packs into five vector stages; the update itself is one
// fused-macro pass per 4 elements.
void step_fused(Ctx& c, std::size_t k, std::size_t tend, std::vector<std::uint32_t>* vout) {
  const CostConfig& q = c.cfg;
  const std::size_t L = c.m - k;
  const std::size_t C = chunks(L);
  const std::size_t Ct = L > 1 ? chunks(L - 1) : 0;
  const std::size_t t = tend - k - 1;

  std::vector<std::uint32_t> dfin(t, kNone);
  for (std::size_t ji = 0; ji < t; ++ji) {
    const std::size_t j = k + 1 + ji;
    std::uint32_t prev = kNone;
    for (std::size_t i = 0; i < Ct; ++i)
      prev = c.b.emit(Unit::Fps, q.dot4, {prev, c.col_ver[j]});
    dfin[ji] = prev;
  }

  std::uint32_t prev = kNone;
  for (std::size_t i = 0; i < C; ++i)
    prev = c.b.emit(Unit::Fps, q.dot4, {prev, c.col_ver[k]});
  const std::uint32_t sq = c.b.emit(Unit::Sqrt, q.sqrt, {prev});
  const std::uint32_t alpha = c.b.emit(Unit::Fps, q.mul, {sq});
  const std::uint32_t beta = c.b.emit(Unit::Fps, q.add, {alpha});
  const std::uint32_t tau = c.b.emit(Unit::Div, q.div, {alpha, beta});
  const std::uint32_t nb = c.b.emit(Unit::Fps, q.mul, {tau});
  const std::uint32_t rec = c.b.emit(Unit::Div, q.div, {nb});

  std::vector<std::uint32_t> vch;
  for (std::size_t i = 0; i < Ct; ++i)
    vch.push_back(c.b.emit(Unit::Fps, q.mul, {tau, c.col_ver[k]}));
  if (vch.empty()) vch.push_back(beta);
  c.col_ver[k] = vch.back();

  std::vector<std::uint32_t> bready(t), rowdone(t);
  for (std::size_t g = 0; g < t; g += 4) {
    std::vector<std::uint32_t> ps = {nb};
    for (std::size_t ji = g; ji < std::min(g + 4, t); ++ji) ps.push_back(dfin[ji]);
    const std::uint32_t s1 = c.b.emit(Unit::Fps, q.mul, ps.data(), ps.size());
    const std::uint32_t s2 = c.b.emit(Unit::Fps, q.add, {s1});
    const std::uint32_t s3 = c.b.emit(Unit::Fps, q.mul, {s2, rec});
    const std::uint32_t s4 = c.b.emit(Unit::Fps, q.mul, {s3});
    const std::uint32_t s5 = c.b.emit(Unit::Fps, q.add, {s4});
    for (std::size_t ji = g; ji < std::min(g + 4, t); ++ji) {
      bready[ji] = s3;
      rowdone[ji] = s5;
    }
  }

  for (std::size_t ji = 0; ji < t; ++ji) {
    const std::size_t j = k + 1 + ji;
    std::uint32_t last = rowdone[ji];
    for (std::size_t i = 0; i < Ct; ++i)
      last = c.b.emit(Unit::Fps, q.fused_macro,
                      {bready[ji], c.col_ver[j], i + 1 == Ct ? rowdone[ji] : kNone});
    c.col_ver[j] = last;
  }
  if (vout) *vout = std::move(vch);
}

// Aggregated (two-gemm) trailing update of a factored panel: W = V^T A as
// chained dot passes, the small coupling recurrence for Y, then A += V Y as
// DOT4 passes over the reflector dimension.
void aggregated_update(Ctx& c, std::size_t panel_rows, std::size_t jbegin, std::size_t jend,
                       const std::vector<std::vector<std::uint32_t>>& vchunks) {
  const CostConfig& q = c.cfg;
  const std::size_t b = vchunks.size();
  const std::size_t C = chunks(panel_rows);
  const std::size_t pb = chunks(b);

  for (std::size_t j = jbegin; j < jend; ++j) {
    std::vector<std::uint32_t> w0(b);
    for (std::size_t r = 0; r < b; ++r) {
      std::uint32_t prev = kNone;
      for (std::uint32_t vc : vchunks[r])
        prev = c.b.emit(Unit::Fps, q.dot4, {prev, vc, c.col_ver[j]});
      if (vchunks[r].empty()) prev = c.b.emit(Unit::Fps, q.dot4, {c.col_ver[j]});
      w0[r] = prev;
    }
    std::uint32_t prev = kNone;
    for (std::size_t r = 0; r < b; ++r) {
      const std::size_t nq = chunks(r + 1);
      for (std::size_t s = 0; s < nq; ++s)
        prev = c.b.emit(Unit::Fps, q.add, {prev, s == 0 ? w0[r] : kNone});
    }
    const std::uint32_t y = prev;
    std::uint32_t last = y;
    for (std::size_t i = 0; i < C; ++i)
      for (std::size_t e = 0; e < 4 * pb; ++e)
        last = c.b.emit(Unit::Fps, q.dot4, {y, e == 0 ? c.col_ver[j] : kNone});
    c.col_ver[j] = last;
  }
}

}  // namespace

PassGraph build_pe_graph(Routine routine, std::size_t m, std::size_t n, std::size_t block,
                         const CostConfig& cfg) {
  Ctx c{GraphBuilder{}, cfg, m, {}};
  const std::uint32_t load = c.b.emit(
      Unit::Ls, cfg.gm_access + cfg.lm_access * static_cast<std::uint32_t>(chunks(m)), {});
  c.col_ver.assign(n, load);

  switch (routine) {
    case Routine::HT:
      for (std::size_t k = 0; k < n; ++k) step_classic(c, k, n, nullptr);
      break;
    case Routine::MHT:
      for (std::size_t k = 0; k < n; ++k) step_fused(c, k, n, nullptr);
      break;
    case Routine::BlockedHT:
    case Routine::BlockedMHT: {
      const bool fused = routine == Routine::BlockedMHT;
      for (std::size_t p0 = 0; p0 < n; p0 += block) {
        const std::size_t p1 = std::min(p0 + block, n);
        std::vector<std::vector<std::uint32_t>> vchunks(p1 - p0);
        for (std::size_t k = p0; k < p1; ++k) {
          if (fused)
            step_fused(c, k, p1, &vchunks[k - p0]);
          else
            step_classic(c, k, p1, &vchunks[k - p0]);
        }
        if (p1 < n) aggregated_update(c, m - p0, p1, n, vchunks);
      }
      break;
    }
  }
  return c.b.take();
}

PassGraph build_qr_kernel(bool fused, std::size_t m, std::size_t n, const CostConfig& cfg) {
  Ctx c{GraphBuilder{}, cfg, m, {}};
  c.col_ver.assign(n, kNone);
  for (std::size_t k = 0; k < n; ++k) {
    if (fused)
      step_fused(c, k, n, nullptr);
    else
      step_classic(c, k, n, nullptr);
  }
  return c.b.take();
}

PassGraph build_update_kernel(bool fused, std::size_t rows, std::size_t cols, std::size_t nref,
                              const CostConfig& cfg) {
  Ctx c{GraphBuilder{}, cfg, rows, {}};
  const CostConfig& q = cfg;
  c.col_ver.assign(cols, kNone);
  const std::size_t C = chunks(rows);
  for (std::size_t r = 0; r < nref; ++r) {
    if (!fused) {
      for (std::size_t j = 0; j < cols; ++j) {
        std::uint32_t prev = kNone;
        for (std::size_t i = 0; i < C; ++i)
          prev = c.b.emit(Unit::Fps, q.dot4, {prev, c.col_ver[j]});
        const std::uint32_t w = prev;
        std::uint32_t last = w;
        for (std::size_t i = 0; i < C; ++i) {
          const std::uint32_t t1 = c.b.emit(Unit::Fps, q.mul, {w, c.col_ver[j]});
          const std::uint32_t t2 = c.b.emit(Unit::Fps, q.add, {t1});
          last = c.b.emit(Unit::Fps, q.add, {t2});
        }
        c.col_ver[j] = last;
      }
    } else {
      const std::uint32_t rec = c.b.emit(Unit::Div, q.div, {});
      std::vector<std::uint32_t> dfin(cols);
      for (std::size_t j = 0; j < cols; ++j) {
        std::uint32_t prev = kNone;
        for (std::size_t i = 0; i < C; ++i)
          prev = c.b.emit(Unit::Fps, q.dot4, {prev, c.col_ver[j]});
        dfin[j] = prev;
      }
      std::vector<std::uint32_t> bready(cols);
      for (std::size_t g = 0; g < cols; g += 4) {
        std::vector<std::uint32_t> ps = {rec};
        for (std::size_t j = g; j < std::min(g + 4, cols); ++j) ps.push_back(dfin[j]);
        const std::uint32_t s1 = c.b.emit(Unit::Fps, q.mul, ps.data(), ps.size());
        const std::uint32_t s2 = c.b.emit(Unit::Fps, q.add, {s1});
        const std::uint32_t s3 = c.b.emit(Unit::Fps, q.mul, {s2});
        for (std::size_t j = g; j < std::min(g + 4, cols); ++j) bready[j] = s3;
      }
      for (std::size_t j = 0; j < cols; ++j) {
        std::uint32_t last = bready[j];
        for (std::size_t i = 0; i < C; ++i)
          last = c.b.emit(Unit::Fps, q.fused_macro, {bready[j], c.col_ver[j]});
        c.col_ver[j] = last;
      }
    }
  }
  return c.b.take();
}

PassGraph build_aggregated_update_kernel(std::size_t rows, std::size_t cols, std::size_t nref,
                                         const CostConfig& cfg) {
  Ctx c{GraphBuilder{}, cfg, rows, {}};
  c.col_ver.assign(cols, kNone);
  std::vector<std::vector<std::uint32_t>> vchunks(nref);
  for (std::size_t r = 0; r < nref; ++r) vchunks[r].assign(chunks(rows), kNone);
  aggregated_update(c, rows, 0, cols, vchunks);
  return c.b.take();
}

ScheduleResult schedule(const PassGraph& g, const CostConfig& cfg,
                        std::vector<IssueRecord>* trace) {
  const std::size_t nn = g.size();
  ScheduleResult res;
  if (nn == 0) return res;

  std::vector<std::uint32_t> succ_off(nn + 1, 0), indeg(nn, 0);
  for (std::size_t v = 0; v < nn; ++v) {
    indeg[v] = g.pred_off[v + 1] - g.pred_off[v];
    for (std::uint32_t e = g.pred_off[v]; e < g.pred_off[v + 1]; ++e) ++succ_off[g.preds[e] + 1];
  }
  for (std::size_t v = 0; v < nn; ++v) succ_off[v + 1] += succ_off[v];
  std::vector<std::uint32_t> succs(g.preds.size());
  {
    std::vector<std::uint32_t> cursor(succ_off.begin(), succ_off.end() - 1);
    for (std::size_t v = 0; v < nn; ++v)
      for (std::uint32_t e = g.pred_off[v]; e < g.pred_off[v + 1]; ++e)
        succs[cursor[g.preds[e]]++] = static_cast<std::uint32_t>(v);
  }

  std::vector<std::uint64_t> ready(nn, 0);
  using Item = std::pair<std::uint64_t, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (std::size_t v = 0; v < nn; ++v)
    if (indeg[v] == 0) heap.emplace(0, static_cast<std::uint32_t>(v));

  std::uint64_t fps_cycle = 0;
  std::uint32_t fps_count = 0;
  std::uint64_t unit_free[3] = {0, 0, 0};     // sqrt, div, ls
  if (trace) trace->reserve(nn);

  while (!heap.empty()) {
    const auto [rt, v] = heap.top();
    heap.pop();
    const std::uint32_t lat = g.latency[v];
    std::uint64_t start;
    if (static_cast<Unit>(g.unit[v]) == Unit::Fps) {
      start = std::max(rt, fps_cycle);
      if (start > fps_cycle) {
        fps_cycle = start;
        fps_count = 0;
      }
      if (fps_count >= cfg.issue_width) {
        ++fps_cycle;
        fps_count = 0;
        start = fps_cycle;
      }
      ++fps_count;
      ++res.fp_issues;
    } else {
      std::uint64_t& uf = unit_free[static_cast<std::size_t>(g.unit[v]) - 1];
      start = std::max(rt, uf);
      uf = start + lat;
    }
    const std::uint64_t done = start + lat;
    res.makespan = std::max(res.makespan, done);
    if (trace) trace->push_back({v, start, done});
    for (std::uint32_t e = succ_off[v]; e < succ_off[v + 1]; ++e) {
      const std::uint32_t s = succs[e];
      ready[s] = std::max(ready[s], done);
      if (--indeg[s] == 0) heap.emplace(ready[s], s);
    }
  }
  return res;
}

}  // namespace sim_detail

namespace {

CycleReport make_report(std::string tag, std::size_t n, std::uint64_t cycles, double flops,
                        const CostConfig& cfg) {
  CycleReport r;
  r.routine = std::move(tag);
  r.n = n;
  r.total_cycles = cycles;
  r.flops = flops;
  const double peak = 8.0 * cfg.issue_width;
  r.fp_busy_cycles = flops / peak;
  r.utilization = cycles ? r.fp_busy_cycles / static_cast<double>(cycles) : 0.0;
  r.flops_per_cycle = cycles ? flops / static_cast<double>(cycles) : 0.0;
  return r;
}

}  // namespace

CycleReport simulate_pe(Routine routine, std::size_t m, std::size_t n, const CostConfig& cfg) {
  cfg.validate();
  if (n < 1 || m < n) throw DimensionError("simulate_pe requires m >= n >= 1");
  if (cfg.lm_words < m) throw ConfigError("local memory cannot hold a block column");
  const bool blocked = routine == Routine::BlockedHT || routine == Routine::BlockedMHT;
  const std::size_t block = blocked ? sim_detail::default_block(n) : 0;
  const sim_detail::PassGraph g = sim_detail::build_pe_graph(routine, m, n, block, cfg);
  const sim_detail::ScheduleResult sr = sim_detail::schedule(g, cfg);
  return make_report(routine_name(routine), n, sr.makespan, sim_detail::flops_qr(m, n), cfg);
}

CycleReport simulate_gemm(std::size_t n, const CostConfig& cfg) {
  cfg.validate();
  if (n < 1) throw DimensionError("simulate_gemm requires n >= 1");
  const std::uint64_t passes =
      static_cast<std::uint64_t>(n) * n * ((n + 3) / 4);
  const std::uint64_t cycles = cfg.gm_access + cfg.lm_access +
                               (passes + cfg.issue_width - 1) / cfg.issue_width + cfg.dot4;
  const double flops = 2.0 * static_cast<double>(n) * n * n;
  return make_report("gemm", n, cycles, flops, cfg);
}

bool check_pe_schedule(Routine routine, std::size_t m, std::size_t n, const CostConfig& cfg,
                       std::vector<IssueRecord>* trace_out) {
  const bool blocked = routine == Routine::BlockedHT || routine == Routine::BlockedMHT;
  const std::size_t block = blocked ? sim_detail::default_block(n) : 0;
  const sim_detail::PassGraph g = sim_detail::build_pe_graph(routine, m, n, block, cfg);
  std::vector<IssueRecord> trace;
  sim_detail::schedule(g, cfg, &trace);

  if (trace.size() != g.size()) return false;
  std::vector<std::uint64_t> issue(g.size(), 0), done(g.size(), 0);
  std::vector<bool> seen(g.size(), false);
  for (const IssueRecord& rec : trace) {
    if (rec.node >= g.size() || seen[rec.node]) return false;
    seen[rec.node] = true;
    if (rec.complete != rec.issue + g.latency[rec.node]) return false;
    issue[rec.node] = rec.issue;
    done[rec.node] = rec.complete;
  }
  for (std::size_t v = 0; v < g.size(); ++v)
    for (std::uint32_t e = g.pred_off[v]; e < g.pred_off[v + 1]; ++e)
      if (issue[v] < done[g.preds[e]]) return false;
  if (trace_out) *trace_out = std::move(trace);
  return true;
}

std::string calibrate_report(const CostConfig& cfg) {
  const std::size_t n = 128;
  const CycleReport ht = simulate_pe(Routine::HT, n, n, cfg);
  const CycleReport mht = simulate_pe(Routine::MHT, n, n, cfg);
  const CycleReport bht = simulate_pe(Routine::BlockedHT, n, n, cfg);
  const CycleReport gemm = simulate_gemm(n, cfg);

  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["n"] = n;
  j["speedup_mht_vs_ht"] =
      static_cast<double>(ht.total_cycles) / static_cast<double>(mht.total_cycles);
  j["speedup_mht_vs_blocked_ht"] =
      static_cast<double>(bht.total_cycles) / static_cast<double>(mht.total_cycles);
  j["utilization_mht_over_gemm"] = mht.utilization / gemm.utilization;
  j["utilization"] = {{"ht", ht.utilization},
                      {"mht", mht.utilization},
                      {"blocked-ht", bht.utilization},
                      {"gemm", gemm.utilization}};
  return j.dump(2);
}

}  // namespace qrht
