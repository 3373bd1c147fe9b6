#include "value.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace costcomm {

BeliefKey quantize(const BeliefPair& pair) {
  BeliefKey key;
  const int n1 = pair.b1.size();
  const int n2 = pair.b2.size();
  if (n1 + n2 > static_cast<int>(key.q.size()))
    fail(Status::CapExceeded,
         "belief key: state spaces too large for exact memoization; use the grid mode");
  key.n1 = static_cast<std::uint8_t>(n1);
  key.n2 = static_cast<std::uint8_t>(n2);
  for (int x = 0; x < n1; ++x)
    key.q[x] = static_cast<std::int32_t>(std::llround(pair.b1[x] * kQuantFactor));
  for (int x = 0; x < n2; ++x)
    key.q[n1 + x] = static_cast<std::int32_t>(std::llround(pair.b2[x] * kQuantFactor));
  return key;
}

BeliefPair dequantize(const BeliefKey& key) {
  BeliefPair pair;
  pair.b1.w.resize(key.n1);
  pair.b2.w.resize(key.n2);
  for (int x = 0; x < key.n1; ++x)
    pair.b1.w[x] = static_cast<double>(key.q[x]) / kQuantFactor;
  for (int x = 0; x < key.n2; ++x)
    pair.b2.w[x] = static_cast<double>(key.q[key.n1 + x]) / kQuantFactor;
  return pair;
}

namespace {

void enumerate_compositions(int parts, int sum, std::vector<int>& cur,
                            std::vector<Belief>& out, int S) {
  if (parts == 1) {
    cur.push_back(sum);
    std::vector<double> w(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) w[i] = static_cast<double>(cur[i]) / S;
    out.push_back(Belief{std::move(w)});
    cur.pop_back();
    return;
  }
  for (int a = 0; a <= sum; ++a) {
    cur.push_back(a);
    enumerate_compositions(parts - 1, sum - a, cur, out, S);
    cur.pop_back();
  }
}

}  // namespace

AgentGrid::AgentGrid(int num_states, int nodes_per_axis) : n_(num_states) {
  if (nodes_per_axis < 2) fail(Status::InvalidArgument, "grid: need at least 2 nodes per axis");
  S_ = nodes_per_axis - 1;
  std::vector<int> cur;
  enumerate_compositions(n_, S_, cur, nodes_, S_);

  binom_.assign(S_ + n_ + 1, std::vector<std::int64_t>(n_ + 1, 0));
  for (int a = 0; a < static_cast<int>(binom_.size()); ++a) {
    binom_[a][0] = 1;
    for (int b = 1; b <= std::min(a, n_); ++b)
      binom_[a][b] = binom_[a - 1][b - 1] + (a - 1 >= b ? binom_[a - 1][b] : 0);
  }

  delta_ranks_.resize(n_);
  std::vector<int> comp(n_, 0);
  for (int x = 0; x < n_; ++x) {
    comp.assign(n_, 0);
    comp[x] = S_;
    delta_ranks_[x] = rank(comp);
  }
}

int AgentGrid::rank(const std::vector<int>& comp) const {
  // Count compositions lexicographically smaller than comp.
  std::int64_t r = 0;
  int rem = S_;
  for (int i = 0; i + 1 < n_; ++i) {
    for (int a = 0; a < comp[i]; ++a) {
      const int parts = n_ - i - 1;
      const int s = rem - a;
      r += binom_[s + parts - 1][parts - 1];
    }
    rem -= comp[i];
  }
  return static_cast<int>(r);
}

void AgentGrid::stencil(const Belief& pi, std::vector<StencilEntry>& out) const {
  if (n_ == 1) {
    out.push_back({0, 1.0});
    return;
  }
  const int d = n_ - 1;
  // Reverse-cumulative coordinates z_i = S * sum_{k>=i} pi_k form a sorted
  // cube corner in which a Freudenthal stencil never leaves the simplex.
  std::array<double, 8> z{};
  double tail = 0.0;
  for (int i = n_ - 1; i >= 1; --i) {
    tail += pi[i];
    z[i - 1] = std::clamp(tail * S_, 0.0, static_cast<double>(S_));
  }
  for (int i = d - 1; i >= 1; --i) z[i - 1] = std::max(z[i - 1], z[i]);

  std::array<int, 8> base{};
  std::array<double, 8> frac{};
  for (int i = 0; i < d; ++i) {
    base[i] = std::clamp(static_cast<int>(std::floor(z[i])), 0, S_);
    frac[i] = z[i] - base[i];
  }
  std::array<int, 8> order{};
  std::iota(order.begin(), order.begin() + d, 0);
  std::stable_sort(order.begin(), order.begin() + d,
                   [&frac](int a, int b) { return frac[a] > frac[b]; });

  std::array<int, 8> vertex{};
  std::copy(base.begin(), base.begin() + d, vertex.begin());
  std::vector<int> comp(n_);
  double wsum = 0.0;
  const std::size_t first = out.size();
  for (int k = 0; k <= d; ++k) {
    double w;
    if (k == 0)
      w = 1.0 - frac[order[0]];
    else {
      w = (k == d ? frac[order[d - 1]] : frac[order[k - 1]] - frac[order[k]]);
      vertex[order[k - 1]] += 1;
    }
    if (w <= 1e-15) continue;
    // Convert z-vertex back to a composition; skip float-dust vertices that
    // fall outside the ordered domain.
    bool valid = true;
    int prev = S_;
    for (int i = 0; i < d; ++i) {
      if (vertex[i] > prev || vertex[i] < 0) valid = false;
      prev = vertex[i];
    }
    if (!valid) continue;
    for (int i = 0; i < n_; ++i) {
      const int hi = (i == 0) ? S_ : vertex[i - 1];
      const int lo = (i == d) ? 0 : vertex[i];
      comp[i] = hi - lo;
    }
    out.push_back({rank(comp), w});
    wsum += w;
  }
  for (std::size_t i = first; i < out.size(); ++i) out[i].weight /= wsum;
}

int AgentGrid::nearest(const Belief& pi) const {
  std::vector<StencilEntry> st;
  stencil(pi, st);
  int best = st[0].node;
  double bw = st[0].weight;
  for (const auto& e : st)
    if (e.weight > bw) {
      bw = e.weight;
      best = e.node;
    }
  return best;
}

double GridTables::interpolate(const std::vector<double>& table,
                               const BeliefPair& pair) const {
  std::vector<StencilEntry> s1, s2;
  g1.stencil(pair.b1, s1);
  g2.stencil(pair.b2, s2);
  double v = 0.0;
  const int N2 = g2.count();
  for (const auto& a : s1)
    for (const auto& b : s2) v += a.weight * b.weight * table[a.node * N2 + b.node];
  return v;
}

std::size_t ReachableTables::total_entries() const {
  std::size_t n = 0;
  for (const auto& m : comm) n += m.size();
  for (const auto& m : ctrl) n += m.size();
  return n;
}

}  // namespace costcomm
