#pragma once

#include "endwalk/series.hpp"
#include "endwalk/star.hpp"

namespace endwalk {

// Merged part graph of the open subtree S of all parts containing a vertex
// at graph distance <= 2 from the root vertex o. Every SAW (and SAR) from o
// is represented by a complete arrangement whose source is this merged part.
struct RootStar {
  Patch patch;                  // backing patch, distances exact out to S
  std::vector<int> instances;   // S, ascending instance ids
  PartContext ctx;              // merged part graph with boundary ports
  int origin = -1;              // ctx vertex of o
  std::vector<int> ctx_to_patch;
  // (instance, port) behind each ctx port, aligned with ctx.ports.
  std::vector<std::pair<int, int>> port_source;
};

struct RootLimits {
  long long max_instances = 2'000'000;
  int max_vertices = 100'000;
  long long max_shapes = 200'000'000;
};

RootStar root_contract(const GraphTemplate& t, RootLimits lim = {});

// Generating polynomial of root-star arrangements whose shape starts at o
// with every entry direction pointing inward; variables are configuration
// classes of the pruned system. With returns_only, exits are forced inward
// and the shape must end at a neighbour of o (every factor is then a
// U-class).
Polynomial root_walk_polynomial(const PolynomialSystem& sys,
                                const RootStar& root, int max_weight,
                                bool returns_only,
                                long long max_shapes = 200'000'000);

// Exact SAW counts c_1..c_N of the infinite graph.
std::vector<BigInt> series_coefficients(const PolynomialSystem& sys,
                                        const RootStar& root, int N,
                                        long long max_shapes = 200'000'000);

// Exact SAR counts for n = 1..N.
std::vector<BigInt> series_returns(const PolynomialSystem& sys,
                                   const RootStar& root, int N,
                                   long long max_shapes = 200'000'000);

}  // namespace endwalk
