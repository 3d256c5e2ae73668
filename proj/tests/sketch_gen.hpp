#pragma once

#include "symdyn/foliation.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace sketch_gen {

using namespace symdyn;

inline Leaf half_leaf(int a) {
  Leaf l;
  l.kind = LeafKind::HalfCylinder;
  l.a = a;
  l.area = 1.0;
  return l;
}

inline Leaf cylinder_leaf(int a, int b) {
  Leaf l;
  l.kind = LeafKind::Cylinder;
  l.a = a;
  l.b = b;
  l.area = 1.0;
  return l;
}

// Sketches whose leaf graph comes from a picture in the disk slice: simple
// ones hang every node on the boundary; non-simple ones enclose inner nodes
// by a ring of cylinders or by a circle node.
struct Generated {
  FoliationSketch sketch;
  bool simple = true;
};

inline Generated random_sketch(std::mt19937_64& rng) {
  auto coin = [&] { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int m = pick(1, 8);
  Generated g;
  g.sketch.nodes.resize(m);
  for (int i = 0; i < m; ++i) g.sketch.nodes[i].ref = "n" + std::to_string(i);

  std::vector<int> ring, inner, outer;
  const bool use_circle = m >= 2 && coin();
  const bool enclose = m >= 2 && coin() && (use_circle || m >= 3);
  g.simple = !enclose;
  if (enclose) {
    const int ring_size = use_circle ? 1 : pick(2, m - 1);
    const int inner_size = pick(1, m - ring_size);
    for (int i = 0; i < m; ++i) (i < ring_size ? ring : (i < ring_size + inner_size ? inner : outer)).push_back(i);
    if (use_circle) {
      g.sketch.nodes[ring[0]].circle = true;
    } else {
      for (std::size_t i = 0; i < ring.size(); ++i)
        g.sketch.leaves.push_back(cylinder_leaf(ring[i], ring[(i + 1) % ring.size()]));
    }
    for (int r : ring)
      if (coin()) g.sketch.leaves.push_back(half_leaf(r));
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const int target = i == 0 || coin() ? ring[pick(0, static_cast<int>(ring.size()) - 1)] : inner[pick(0, static_cast<int>(i) - 1)];
      g.sketch.leaves.push_back(cylinder_leaf(inner[i], target));
    }
  } else {
    for (int i = 0; i < m; ++i) outer.push_back(i);
  }
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const int halves = pick(1, 2);
    for (int h = 0; h < halves; ++h) g.sketch.leaves.push_back(half_leaf(outer[i]));
    if (i > 0 && coin()) g.sketch.leaves.push_back(cylinder_leaf(outer[i], outer[pick(0, static_cast<int>(i) - 1)]));
    else if (!ring.empty() && coin()) g.sketch.leaves.push_back(cylinder_leaf(outer[i], ring[0]));
  }

  // Relabel nodes and shuffle leaves.
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<SpanningOrbitNode> nodes(m);
  for (int i = 0; i < m; ++i) nodes[perm[i]] = g.sketch.nodes[i];
  g.sketch.nodes = nodes;
  for (auto& l : g.sketch.leaves) {
    l.a = perm[l.a];
    if (l.b != kBoundaryEnd) l.b = perm[l.b];
  }
  std::shuffle(g.sketch.leaves.begin(), g.sketch.leaves.end(), rng);
  return g;
}

}  // namespace sketch_gen
