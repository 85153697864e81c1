#include "r1tc/small_mask.hpp"

#include "r1tc/squares.hpp"

#include <bit>
#include <stdexcept>

namespace r1tc {

SmallMaskAnalyzer::SmallMaskAnalyzer(const Shape& shape) : shape_(shape) {
  const Index total = shape.numel();
  if (total > 64) throw std::invalid_argument("SmallMaskAnalyzer needs at most 64 cells");
  if (shape.dim_sum() > 64) throw std::invalid_argument("SmallMaskAnalyzer needs n <= 64");
  full_ = total == 64 ? ~Bits(0) : (Bits(1) << total) - 1;

  for (const Square& sq : enumerate_squares(shape)) {
    Quad q{};
    const auto c = sq.cells();
    for (int i = 0; i < 4; ++i) {
      q.c[i] = static_cast<std::uint8_t>(c[i]);
      q.all |= Bits(1) << c[i];
    }
    squares_.push_back(q);
  }
  for (Index a = 0; a < total; ++a)
    for (Index b = a + 1; b < total; ++b)
      for (Index c = b + 1; c < total; ++c)
        for (Index e = c + 1; e < total; ++e)
          if (is_generalized_square(shape, a, b, c, e))
            gs_quads_.push_back((Bits(1) << a) | (Bits(1) << b) | (Bits(1) << c) |
                                (Bits(1) << e));

  const int d = shape.order();
  neighbours_.assign(total, 0);
  for (Index a = 0; a < total; ++a)
    for (Index b = 0; b < total; ++b) {
      int diff = 0;
      for (int k = 0; k < d; ++k) diff += shape.coord(a, k) != shape.coord(b, k);
      if (diff == 1) neighbours_[a] |= Bits(1) << b;
    }
  slices_.resize(d);
  for (int k = 0; k < d; ++k) {
    slices_[k].assign(shape.dim(k), 0);
    for (Index c = 0; c < total; ++c) slices_[k][shape.coord(c, k)] |= Bits(1) << c;
  }
  indicator_.assign(total, 0);
  for (Index c = 0; c < total; ++c)
    for (int k = 0; k < d; ++k)
      indicator_[c] |= std::uint64_t(1) << (shape.block_offset(k) + shape.coord(c, k));
}

SmallMaskAnalyzer::Bits SmallMaskAnalyzer::encode(const Mask& mask) {
  Bits b = 0;
  for (Index c : mask.cells()) b |= Bits(1) << c;
  return b;
}

bool SmallMaskAnalyzer::unique(Bits mask) const {
  // XOR basis keyed by leading bit.
  std::uint64_t basis[64] = {};
  int rank = 0;
  for (Bits m = mask; m; m &= m - 1) {
    std::uint64_t v = indicator_[std::countr_zero(m)];
    while (v) {
      const int top = 63 - std::countl_zero(v);
      if (!basis[top]) {
        basis[top] = v;
        ++rank;
        break;
      }
      v ^= basis[top];
    }
  }
  return rank == shape_.dim_sum() - shape_.order() + 1;
}

SmallMaskAnalyzer::Bits SmallMaskAnalyzer::closure_gs(Bits p) const {
  for (bool changed = true; changed;) {
    changed = false;
    for (Bits q : gs_quads_) {
      const Bits miss = q & ~p;
      if (miss && !(miss & (miss - 1))) {
        p |= miss;
        changed = true;
      }
    }
  }
  return p;
}

SmallMaskAnalyzer::Bits SmallMaskAnalyzer::closure_s(Bits p) const {
  for (bool changed = true; changed;) {
    changed = false;
    for (const Quad& q : squares_) {
      const Bits miss = q.all & ~p;
      if (miss && !(miss & (miss - 1))) {
        p |= miss;
        changed = true;
      }
    }
  }
  return p;
}

SmallMaskAnalyzer::Bits SmallMaskAnalyzer::closure_sr(Bits omega) const {
  Bits p = omega;
  auto in = [](Bits set, int c) { return (set >> c) & 1U; };
  for (bool changed = true; changed;) {
    changed = false;
    for (const Quad& q : squares_) {
      const Bits miss = q.all & ~p;
      if (!miss || (miss & (miss - 1))) continue;
      const int g = std::countr_zero(miss);
      // g's opposite partner must be observed; the other pair needs one
      // observed element and one member.
      int partner, x, y;
      if (g == q.c[0] || g == q.c[1]) {
        partner = g == q.c[0] ? q.c[1] : q.c[0];
        x = q.c[2];
        y = q.c[3];
      } else {
        partner = g == q.c[2] ? q.c[3] : q.c[2];
        x = q.c[0];
        y = q.c[1];
      }
      if (in(omega, partner) && (in(omega, x) || in(omega, y))) {
        p |= miss;
        changed = true;
      }
    }
  }
  return p;
}

bool SmallMaskAnalyzer::a_propagation(Bits mask, AStart start) const {
  Bits left = mask;
  const int d = shape_.order();
  while (left) {
    Bits comp = left & (~left + 1);
    Bits frontier = comp;
    while (frontier) {
      Bits next = 0;
      for (Bits f = frontier; f; f &= f - 1) next |= neighbours_[std::countr_zero(f)];
      next &= mask & ~comp;
      comp |= next;
      frontier = next;
    }
    left &= ~comp;
    bool covers = true;
    for (int k = 0; k < d && covers; ++k)
      for (Bits s : slices_[k])
        if (!(comp & s)) {
          covers = false;
          break;
        }
    if (covers) return true;
    if (start == AStart::first_cell) return false;
  }
  return false;
}

ConditionProfile SmallMaskAnalyzer::profile(Bits mask) const {
  ConditionProfile p;
  if (!mask) return p;
  p.unique = unique(mask);
  p.gs = closure_gs(mask) == full_;
  p.s = closure_s(mask) == full_;
  p.sr = closure_sr(mask) == full_;
  p.a = a_propagation(mask);
  if ((p.a && !p.sr) || (p.sr && !p.s) || (p.s && !p.gs) || (p.gs && !p.unique))
    throw std::logic_error("condition chain violated on " + shape_.to_string());
  return p;
}

}  // namespace r1tc
