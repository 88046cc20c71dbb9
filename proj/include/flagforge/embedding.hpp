#pragma once

#include <optional>
#include <vector>

#include "flagforge/hypergraph.hpp"

namespace flagforge {

// A vertex map pattern -> host sending every pattern edge onto a host edge.
// Injective maps witness (not necessarily induced) subgraph containment;
// arbitrary maps are homomorphisms (edge images must still be r distinct
// vertices, which edge membership already enforces).
std::optional<std::vector<Vertex>> find_embedding(const Hypergraph& pattern, const Hypergraph& host,
                                                  bool injective = true);

bool contains_subgraph(const Hypergraph& host, const Hypergraph& pattern);

// Only copies of `pattern` that use host vertex `x`.
bool contains_subgraph_through_vertex(const Hypergraph& host, const Hypergraph& pattern, Vertex x);

// Only copies of `pattern` that use host edge `e` as one of their edges.
bool contains_subgraph_through_edge(const Hypergraph& host, const Hypergraph& pattern, const Subset& e);

// Number of injective maps pattern -> host preserving edges.
std::uint64_t count_embeddings(const Hypergraph& pattern, const Hypergraph& host);

}  // namespace flagforge
