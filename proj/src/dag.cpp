#include "qrht/dag.hpp"

#include <algorithm>
#include <sstream>

#include "qrht/matrix_market.hpp"

namespace qrht {

std::string routine_name(Routine r) {
  switch (r) {
    case Routine::HT: return "ht";
    case Routine::MHT: return "mht";
    case Routine::BlockedHT: return "blocked-ht";
    case Routine::BlockedMHT: return "blocked-mht";
  }
  return "?";
}

Routine routine_from_name(const std::string& name) {
  if (name == "ht") return Routine::HT;
  if (name == "mht") return Routine::MHT;
  if (name == "blocked-ht" || name == "ht-blocked") return Routine::BlockedHT;
  if (name == "blocked-mht" || name == "mht-blocked") return Routine::BlockedMHT;
  throw ConfigError("unknown routine '" + name + "'");
}

bool OpDag::validate() const {
  if (!recorded) return false;
  if (nodes.size() != total_ops || levels.size() != total_ops) return false;
  std::size_t max_level = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const OpNode& node = nodes[k];
    if (node.id != k) return false;
    std::size_t expect = 1;
    for (std::uint32_t p : node.preds) {
      if (p >= node.id) return false;  // construction-ordered acyclicity
      expect = std::max<std::size_t>(expect, levels[p] + 1);
      if (levels[k] <= levels[p]) return false;  // ASAP respects every edge
    }
    if (levels[k] != expect) return false;
    max_level = std::max<std::size_t>(max_level, levels[k]);
  }
  return max_level == num_levels;
}

namespace {

struct Val {
  std::uint32_t id = 0xFFFFFFFFu;  // sentinel: external input, not a node
  std::uint32_t level = 0;         // inputs sit below level 1
};

class Tracer {
 public:
  explicit Tracer(bool record) { dag_.recorded = record; }

  Val emit(OpKind kind, std::initializer_list<Val> preds, std::size_t flop_weight = 0) {
    std::uint32_t level = 0;
    for (const Val& p : preds) level = std::max(level, p.level);
    ++level;
    const std::uint32_t id = static_cast<std::uint32_t>(dag_.total_ops);
    ++dag_.total_ops;
    dag_.num_levels = std::max<std::size_t>(dag_.num_levels, level);
    dag_.update_flops += flop_weight;
    if (dag_.recorded) {
      OpNode node;
      node.id = id;
      node.kind = kind;
      for (const Val& p : preds)
        if (p.id != kInput) node.preds.push_back(p.id);
      dag_.nodes.push_back(std::move(node));
      dag_.levels.push_back(level);
    }
    return Val{id, level};
  }

  /// Balanced binary combine; depth ceil(log2(size)).
  Val tree(std::vector<Val> vals, OpKind kind, std::size_t flop_weight = 0) {
    while (vals.size() > 1) {
      std::vector<Val> next;
      next.reserve((vals.size() + 1) / 2);
      for (std::size_t k = 0; k + 1 < vals.size(); k += 2)
        next.push_back(emit(kind, {vals[k], vals[k + 1]}, flop_weight));
      if (vals.size() % 2 == 1) next.push_back(vals.back());
      vals = std::move(next);
    }
    return vals.front();
  }

  OpDag take() && { return std::move(dag_); }

  static constexpr std::uint32_t kInput = 0xFFFFFFFFu;

 private:
  OpDag dag_;
};

using Grid = std::vector<std::vector<Val>>;  // column-major value ids for A

Grid make_inputs(std::size_t m, std::size_t n) {
  return Grid(n, std::vector<Val>(m));  // all zero-id inputs
}

struct ReflectorVals {
  std::vector<Val> v;      // unit reflector entries, index 0 at the pivot row
  std::vector<Val> u;      // 2*v entries (classic path only)
  Val alpha, beta, nb, tau;
};

// Shared norm + scalar pipeline of a reflector on rows [row, m) of column col.
ReflectorVals trace_reflector(Tracer& tr, Grid& a, std::size_t row, std::size_t col,
                              std::size_t m, bool classic, bool has_trailing = true) {
  const std::size_t len = m - row;
  ReflectorVals out;
  std::vector<Val> sq(len);
  for (std::size_t i = 0; i < len; ++i) {
    Val x = a[col][row + i];
    sq[i] = tr.emit(OpKind::Mul, {x, x});
  }
  Val ssq = tr.tree(sq, OpKind::Add);
  Val nrm = tr.emit(OpKind::Sqrt, {ssq});
  out.alpha = tr.emit(OpKind::Mul, {nrm});  // sign application
  out.beta = tr.emit(OpKind::Sub, {a[col][row], out.alpha});
  Val negb = tr.emit(OpKind::Mul, {out.beta});
  out.tau = tr.emit(OpKind::Div, {negb, out.alpha});
  if (!classic && has_trailing) {
    // Norm*Beta denominator, hoisted to the head of the update body; the
    // per-column statement chains follow it in program order.
    out.nb = tr.emit(OpKind::Mul, {out.alpha, out.beta, out.tau});
  }
  // r = sqrt((ssq - x1*alpha)/2), v = (x - alpha e1)/(2r)
  Val m1 = tr.emit(OpKind::Mul, {a[col][row], out.alpha});
  Val diff = tr.emit(OpKind::Sub, {ssq, m1});
  Val half = tr.emit(OpKind::Mul, {diff});
  Val r = tr.emit(OpKind::Sqrt, {half});
  Val two_r = tr.emit(OpKind::Add, {r, r});
  out.v.resize(len);
  out.v[0] = tr.emit(OpKind::Div, {out.beta, two_r});
  for (std::size_t i = 1; i < len; ++i)
    out.v[i] = tr.emit(OpKind::Div, {a[col][row + i], two_r});
  if (classic && has_trailing) {
    // Materialized 2v column of the explicit reflector matrix P = I - 2vv^T.
    out.u.resize(len);
    for (std::size_t i = 0; i < len; ++i) out.u[i] = tr.emit(OpKind::Add, {out.v[i], out.v[i]});
  }
  return out;
}

// Classic step: reflector, then per trailing column a serial dot on v followed
// by the scaled elementwise application.
void trace_ht_step(Tracer& tr, Grid& a, std::size_t step, std::size_t m, std::size_t ncols_end) {
  const std::size_t len = m - step;
  ReflectorVals rv = trace_reflector(tr, a, step, step, m, /*classic=*/true,
                                     /*has_trailing=*/step + 1 < ncols_end);
  for (std::size_t j = step + 1; j < ncols_end; ++j) {
    std::vector<Val> prods(len);
    for (std::size_t i = 0; i < len; ++i)
      prods[i] = tr.emit(OpKind::Mul, {rv.v[i], a[j][step + i]}, 1);
    Val w = tr.tree(prods, OpKind::DotStep, 1);
    Val s = tr.emit(OpKind::Mul, {w, rv.tau}, 1);
    for (std::size_t i = 0; i < len; ++i)
      a[j][step + i] = tr.emit(OpKind::FusedMacro, {a[j][step + i], rv.u[i], s}, 2);
  }
  for (std::size_t i = 0; i < len; ++i) a[step][step + i] = rv.v[i];
  a[step][step] = rv.alpha;
}

// Fused step: the tail dot runs on the raw column concurrently with the norm
// pipeline; the per-column scalar statements chain in program order after Tau.
void trace_mht_step(Tracer& tr, Grid& a, std::size_t step, std::size_t m, std::size_t ncols_end) {
  const std::size_t len = m - step;
  ReflectorVals rv = trace_reflector(tr, a, step, step, m, /*classic=*/false,
                                     /*has_trailing=*/step + 1 < ncols_end);
  for (std::size_t j = step + 1; j < ncols_end; ++j) {
    Val s{};
    if (len > 1) {
      std::vector<Val> prods(len - 1);
      for (std::size_t i = 1; i < len; ++i)
        prods[i - 1] = tr.emit(OpKind::Mul, {a[step][step + i], a[j][step + i]}, 1);
      s = tr.tree(prods, OpKind::DotStep, 1);
    }
    Val b1 = tr.emit(OpKind::Mul, {a[j][step], rv.beta, rv.nb}, 1);
    Val b2 = (len > 1) ? tr.emit(OpKind::Add, {b1, s}, 1) : b1;
    Val b3 = tr.emit(OpKind::Div, {b2, rv.nb}, 1);
    Val pm = tr.emit(OpKind::Mul, {rv.beta, b3}, 1);
    Val pa = tr.emit(OpKind::Add, {a[j][step], pm}, 1);
    for (std::size_t i = 1; i < len; ++i)
      a[j][step + i] = tr.emit(OpKind::FusedMacro, {a[j][step + i], a[step][step + i], b3, pa}, 2);
    a[j][step] = pa;
  }
  for (std::size_t i = 1; i < len; ++i) a[step][step + i] = rv.v[i];
  a[step][step] = rv.alpha;
}

// Aggregated trailing update of a factored panel, traced as the two
// gemm-shaped sweeps with the small inter-reflector coupling recurrence.
void trace_panel_update(Tracer& tr, Grid& a, const std::vector<ReflectorVals>& refls,
                        std::size_t k, std::size_t b, std::size_t m, std::size_t n) {
  if (k + b >= n) return;
  // S = V^T V (strictly lower entries)
  std::vector<std::vector<Val>> s(b, std::vector<Val>(b));
  for (std::size_t j = 1; j < b; ++j)
    for (std::size_t p = 0; p < j; ++p) {
      // v_j lives on rows k+j.., v_p on rows k+p..; overlap starts at k+j
      const std::size_t lo = k + j, hi = m;
      std::vector<Val> prods;
      prods.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i)
        prods.push_back(tr.emit(OpKind::Mul, {refls[j].v[i - (k + j)], refls[p].v[i - (k + p)]}));
      s[j][p] = tr.tree(prods, OpKind::DotStep);
    }
  for (std::size_t c = k + b; c < n; ++c) {
    std::vector<Val> w(b), y(b);
    for (std::size_t j = 0; j < b; ++j) {
      const std::size_t lo = k + j;
      std::vector<Val> prods;
      prods.reserve(m - lo);
      for (std::size_t i = lo; i < m; ++i)
        prods.push_back(tr.emit(OpKind::Mul, {refls[j].v[i - lo], a[c][i]}, 1));
      w[j] = tr.tree(prods, OpKind::DotStep, 1);
    }
    for (std::size_t j = 0; j < b; ++j) {
      Val acc = w[j];
      for (std::size_t p = 0; p < j; ++p) {
        Val t = tr.emit(OpKind::Mul, {s[j][p], y[p]}, 1);
        acc = tr.emit(OpKind::Add, {acc, t}, 1);
      }
      y[j] = tr.emit(OpKind::Mul, {acc}, 1);  // scale by -2
    }
    for (std::size_t i = k; i < m; ++i) {
      std::vector<Val> terms;
      for (std::size_t j = 0; j < b && k + j <= i; ++j)
        terms.push_back(tr.emit(OpKind::Mul, {refls[j].v[i - (k + j)], y[j]}, 1));
      Val sum = tr.tree(terms, OpKind::DotStep, 1);
      a[c][i] = tr.emit(OpKind::Add, {a[c][i], sum}, 1);
    }
  }
}

OpDag trace_unblocked(Routine routine, std::size_t m, std::size_t n, bool record) {
  Tracer tr(record);
  Grid a = make_inputs(m, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (routine == Routine::HT)
      trace_ht_step(tr, a, i, m, n);
    else
      trace_mht_step(tr, a, i, m, n);
  }
  return std::move(tr).take();
}

OpDag trace_blocked(Routine routine, std::size_t m, std::size_t n, std::size_t block,
                    bool record) {
  Tracer tr(record);
  Grid a = make_inputs(m, n);
  const bool classic = routine == Routine::BlockedHT;
  for (std::size_t k = 0; k < n; k += block) {
    const std::size_t b = std::min(block, n - k);
    std::vector<ReflectorVals> refls;
    refls.reserve(b);
    for (std::size_t j = 0; j < b; ++j) {
      const std::size_t col = k + j;
      if (classic)
        trace_ht_step(tr, a, col, m, k + b);
      else
        trace_mht_step(tr, a, col, m, k + b);
      // Rebuild the stored v values for the joint update.
      ReflectorVals rv;
      rv.v.resize(m - col);
      rv.v[0] = a[col][col];  // alpha slot carries the pivot value's node
      for (std::size_t i = 1; i < m - col; ++i) rv.v[i] = a[col][col + i];
      refls.push_back(std::move(rv));
    }
    trace_panel_update(tr, a, refls, k, b, m, n);
  }
  return std::move(tr).take();
}

}  // namespace

OpDag trace_dag(Routine routine, std::size_t m, std::size_t n, std::size_t block_size,
                bool record_nodes) {
  if (m < n || n < 1) throw DimensionError("trace_dag: need m >= n >= 1");
  switch (routine) {
    case Routine::HT:
    case Routine::MHT:
      return trace_unblocked(routine, m, n, record_nodes);
    case Routine::BlockedHT:
    case Routine::BlockedMHT: {
      if (block_size < 1 || block_size > n) throw DimensionError("trace_dag: invalid block size");
      return trace_blocked(routine, m, n, block_size, record_nodes);
    }
  }
  throw ConfigError("unreachable routine");
}

double beta(const OpDag& dag) {
  if (dag.total_ops == 0) throw DimensionError("beta: empty DAG");
  return static_cast<double>(dag.total_ops) / static_cast<double>(dag.num_levels);
}

double theta(std::size_t m, std::size_t n) {
  if (m < n || n < 1) throw DimensionError("theta: need m >= n >= 1");
  OpDag ht = trace_dag(Routine::HT, m, n);
  OpDag mht = trace_dag(Routine::MHT, m, n);
  return static_cast<double>(mht.num_levels) / static_cast<double>(ht.num_levels);
}

std::vector<ThetaRow> sweep_theta(const std::vector<std::size_t>& sizes) {
  std::vector<ThetaRow> rows;
  rows.reserve(sizes.size());
  for (std::size_t n : sizes) {
    OpDag ht = trace_dag(Routine::HT, n, n);
    OpDag mht = trace_dag(Routine::MHT, n, n);
    rows.push_back({n, static_cast<double>(mht.num_levels) / static_cast<double>(ht.num_levels),
                    beta(ht), beta(mht)});
  }
  return rows;
}

std::string sweep_theta_csv(const std::vector<ThetaRow>& rows) {
  std::ostringstream out;
  out << "n,theta,beta_ht,beta_mht\n";
  for (const ThetaRow& r : rows)
    out << r.n << "," << format_double(r.theta) << "," << format_double(r.beta_ht) << ","
        << format_double(r.beta_mht) << "\n";
  return out.str();
}

}  // namespace qrht
