#include "r1tc/propagation.hpp"

#include "r1tc/gf2.hpp"
#include "r1tc/squares.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace r1tc {

Index PropagatedSet::size() const {
  return std::count(member.begin(), member.end(), char(1));
}

std::vector<Index> PropagatedSet::cells() const {
  std::vector<Index> out;
  for (Index c = 0; c < static_cast<Index>(member.size()); ++c)
    if (member[c]) out.push_back(c);
  return out;
}

namespace {

// Coordinates of every cell, row-major, for the inner loops.
std::vector<int> coordinate_table(const Shape& s) {
  const int d = s.order();
  std::vector<int> table(static_cast<std::size_t>(s.numel() * d));
  for (Index c = 0; c < s.numel(); ++c)
    for (int k = 0; k < d; ++k) table[c * d + k] = s.coord(c, k);
  return table;
}

PropagatedSet seed(const Mask& mask) {
  PropagatedSet p;
  p.shape = mask.shape();
  p.member = mask.membership();
  return p;
}

}  // namespace

PropagatedSet propagate_gs(const Mask& mask) {
  PropagatedSet p = seed(mask);
  const Shape& s = mask.shape();
  const int d = s.order();
  const auto coords = coordinate_table(s);
  std::deque<Index> queue(mask.cells().begin(), mask.cells().end());
  std::vector<Index> done;
  done.reserve(static_cast<std::size_t>(s.numel()));
  while (!queue.empty()) {
    const Index b = queue.front();
    queue.pop_front();
    const int* cb = &coords[b * d];
    // Every triple is examined once, when its last element is processed.
    for (std::size_t i = 0; i < done.size(); ++i) {
      const Index a = done[i];
      const int* ca = &coords[a * d];
      for (std::size_t j = i + 1; j < done.size(); ++j) {
        const Index c = done[j];
        const int* cc = &coords[c * d];
        Index g = 0;
        bool ok = true;
        for (int k = 0; k < d && ok; ++k) {
          int v;
          if (ca[k] == cc[k])
            v = cb[k];
          else if (ca[k] == cb[k])
            v = cc[k];
          else if (cc[k] == cb[k])
            v = ca[k];
          else {
            ok = false;
            break;
          }
          g += v * s.stride(k);
        }
        if (!ok || p.member[g]) continue;
        p.member[g] = 1;
        p.trace.push_back({g, {a, c, b}});
        queue.push_back(g);
      }
    }
    done.push_back(b);
  }
  return p;
}

PropagatedSet propagate_s(const Mask& mask) {
  PropagatedSet p = seed(mask);
  const Shape& s = mask.shape();
  std::deque<Index> queue(mask.cells().begin(), mask.cells().end());
  while (!queue.empty()) {
    const Index b = queue.front();
    queue.pop_front();
    for_each_square_containing(s, b, [&](Index o, Index x, Index y) {
      const int known = p.member[o] + p.member[x] + p.member[y];
      if (known != 2) return;
      Index missing;
      std::array<Index, 3> w;
      if (!p.member[o]) {
        missing = o;
        w = {b, x, y};
      } else if (!p.member[x]) {
        missing = x;
        w = {b, o, y};
      } else {
        missing = y;
        w = {b, o, x};
      }
      p.member[missing] = 1;
      p.trace.push_back({missing, w});
      queue.push_back(missing);
    });
  }
  return p;
}

PropagatedSet propagate_sr(const Mask& mask) {
  PropagatedSet p = seed(mask);
  const Shape& s = mask.shape();
  const std::vector<char> in_mask = mask.membership();
  std::deque<Index> queue(mask.cells().begin(), mask.cells().end());
  while (!queue.empty()) {
    const Index b = queue.front();
    queue.pop_front();
    for (Index a1 : mask.cells()) {
      if (a1 == b) continue;
      for_each_complementary_pair(s, a1, b, [&](Index x, Index y) {
        // Square {a1, b; x, y}: an observed x pins y and vice versa.
        if (in_mask[x] && !p.member[y]) {
          p.member[y] = 1;
          p.trace.push_back({y, {a1, b, x}});
          queue.push_back(y);
        }
        if (in_mask[y] && !p.member[x]) {
          p.member[x] = 1;
          p.trace.push_back({x, {a1, b, y}});
          queue.push_back(x);
        }
      });
    }
  }
  return p;
}

APropagationResult a_propagation(const Mask& mask, AStart mode) {
  APropagationResult result;
  const Shape& s = mask.shape();
  const int d = s.order();
  const auto& cells = mask.cells();
  const Index m = mask.size();
  if (m == 0) return result;

  // Neighbours differ in exactly one axis: equal keys after zeroing that axis.
  std::vector<std::vector<Index>> adj(m);
  std::vector<std::pair<Index, Index>> keyed(m);
  for (int k = 0; k < d; ++k) {
    for (Index i = 0; i < m; ++i)
      keyed[i] = {cells[i] - s.coord(cells[i], k) * s.stride(k), i};
    std::sort(keyed.begin(), keyed.end());
    for (Index lo = 0; lo < m;) {
      Index hi = lo + 1;
      while (hi < m && keyed[hi].first == keyed[lo].first) ++hi;
      for (Index i = lo; i < hi; ++i)
        for (Index j = lo; j < hi; ++j)
          if (i != j) adj[keyed[i].second].push_back(keyed[j].second);
      lo = hi;
    }
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<char> seen(m, 0);
  const Index last_start = mode == AStart::first_cell ? 1 : m;
  for (Index start = 0; start < last_start; ++start) {
    if (seen[start]) continue;
    std::vector<Index> order{start};
    seen[start] = 1;
    for (std::size_t h = 0; h < order.size(); ++h)
      for (Index nb : adj[order[h]])
        if (!seen[nb]) {
          seen[nb] = 1;
          order.push_back(nb);
        }
    bool covers = true;
    for (int k = 0; k < d && covers; ++k) {
      std::vector<char> hit(s.dim(k), 0);
      for (Index i : order) hit[s.coord(cells[i], k)] = 1;
      covers = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
    }
    if (covers) {
      result.holds = true;
      for (Index i : order) result.sequence.push_back(cells[i]);
      return result;
    }
  }
  return result;
}

ConditionProfile condition_profile(const Mask& mask) {
  ConditionProfile p;
  if (mask.empty()) return p;
  p.unique = unique_recovery(mask);
  p.gs = propagate_gs(mask).full();
  p.s = propagate_s(mask).full();
  p.sr = propagate_sr(mask).full();
  p.a = a_propagation(mask).holds;
  if ((p.a && !p.sr) || (p.sr && !p.s) || (p.s && !p.gs) || (p.gs && !p.unique))
    throw std::logic_error("condition chain violated for a mask on " +
                           mask.shape().to_string());
  return p;
}

std::string to_json(const ConditionProfile& p) {
  auto b = [](bool v) { return v ? "true" : "false"; };
  return std::string("{\"unique\":") + b(p.unique) + ",\"gs\":" + b(p.gs) +
         ",\"s\":" + b(p.s) + ",\"sr\":" + b(p.sr) + ",\"a\":" + b(p.a) + "}";
}

WeightVector generate_weights(const Mask& mask, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("generate_weights: theta must lie in (0, 1)");
  if (!propagate_s(mask).full())
    throw PropagationFailure("generate_weights: mask does not satisfy S-propagation");
  const Shape& s = mask.shape();
  WeightVector out;
  out.shape = s;
  out.w = Eigen::VectorXd::Ones(s.numel());
  out.layer.assign(s.numel(), 0);
  std::vector<char> in = propagate_sr(mask).member;
  int layer = 0;
  while (std::count(in.begin(), in.end(), char(1)) != s.numel()) {
    ++layer;
    std::vector<Index> batch;
    for (Index beta = 0; beta < s.numel(); ++beta) {
      if (in[beta]) continue;
      bool reached = false;
      for_each_square_containing(s, beta, [&](Index o, Index x, Index y) {
        if (!reached && in[o] && in[x] && in[y]) reached = true;
      });
      if (reached) batch.push_back(beta);
    }
    if (batch.empty())
      throw PropagationFailure("generate_weights: square propagation stalled");
    for (Index beta : batch) {
      in[beta] = 1;
      out.layer[beta] = layer;
      out.w[beta] = std::pow(theta, layer);
    }
  }
  return out;
}

bool replay_trace(const Mask& mask, const PropagatedSet& set, const std::string& rule) {
  const Shape& s = mask.shape();
  std::vector<char> in = mask.membership();
  const std::vector<char> observed = in;
  for (const auto& step : set.trace) {
    const auto [w0, w1, w2] = step.witnesses;
    if (in[step.added] || !in[w0] || !in[w1] || !in[w2]) return false;
    bool ok = false;
    if (rule == "gs") {
      ok = is_generalized_square(s, w0, w1, w2, step.added);
    } else if (rule == "s") {
      ok = is_square(s, w0, w1, w2, step.added) || is_square(s, w0, w2, w1, step.added) ||
           is_square(s, w1, w2, w0, step.added);
    } else if (rule == "sr") {
      ok = observed[w0] && observed[w2] && is_square(s, w0, w1, w2, step.added);
    } else {
      throw std::invalid_argument("replay_trace: unknown rule '" + rule + "'");
    }
    if (!ok) return false;
    in[step.added] = 1;
  }
  return in == set.member;
}

}  // namespace r1tc
