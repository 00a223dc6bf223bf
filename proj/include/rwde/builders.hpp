#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rwde/graph.hpp"
#include "rwde/lattice.hpp"

namespace rwde {

/// Discrete torus (Z/NZ)^d. Vertex index sum_k x_k N^k; edge v*2d + i leaves
/// v in direction i with weight alpha[i].
WeightedDigraph build_torus(std::size_t d, std::size_t n, std::span<const double> alpha);
std::size_t torus_vertex(std::size_t d, std::size_t n, const Site& x);
Site torus_site(std::size_t d, std::size_t n, std::size_t v);

struct BallGraph {
  WeightedDigraph graph;
  std::vector<Site> sites;  // sites[v] for v < boundary
  std::size_t origin = 0;
  std::size_t boundary = 0;  // the extra vertex collecting all exits
  std::size_t special_edge = 0;  // (boundary, origin)
};

/// Euclidean ball |x| <= N of Z^d plus a boundary vertex. Exits (x, boundary)
/// carry alpha_i, entrances (boundary, x) carry alpha of the opposite
/// direction, and the special edge (boundary, origin) has weight gamma, so that
/// div alpha = gamma (delta_boundary - delta_origin). Empty alpha means all ones.
BallGraph build_ball(std::size_t d, std::size_t n, double gamma, std::span<const double> alpha = {});

struct CylinderGraph {
  WeightedDigraph graph;
  std::size_t n = 0;  // circumference
  std::size_t length = 0;
  std::size_t left = 0;  // exit vertex L
  std::size_t right = 0;  // exit vertex R
  std::size_t origin = 0;  // (column 0, row 0)
  std::size_t long_edge = 0;  // (R, L)
};

/// Horizontal cylinder of circumference N and length L with exit vertices L, R
/// and the long edge (R, L) of weight N(alpha_1 - alpha_3). Vertex
/// column*N + row; requires alpha_1 > alpha_3 so that div alpha = 0.
CylinderGraph build_cylinder(std::size_t n, std::size_t length, std::span<const double> alpha);

/// Segment 0..L with weights alpha to the right and beta to the left, closed
/// by a long edge that makes div alpha = 0 ((L, 0) with weight alpha - beta
/// when alpha > beta, (0, L) with beta - alpha when beta > alpha).
WeightedDigraph build_segment(std::size_t length, double alpha = 1.0, double beta = 1.0);

/// Bidirected cycle on n vertices with unit weights (the triangle for n = 3).
WeightedDigraph build_bidirected_cycle(std::size_t n, double weight = 1.0);

}  // namespace rwde
