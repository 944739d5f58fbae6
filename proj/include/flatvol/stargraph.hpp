#pragma once

// Star graphs (one central vertex, every edge central-outer), their twist
// domains, lattice twists, and the recursive flattening of the flat recursion
// into star trees with explicit polynomial integrands.

#include "flatvol/kernel.hpp"
#include "flatvol/multipoly.hpp"
#include "flatvol/polytope.hpp"
#include "flatvol/rational.hpp"
#include "flatvol/weight_vector.hpp"

#include <map>
#include <string>
#include <vector>

namespace flatvol {

struct OuterVertex {
    int genus = 0;
    int edges = 1;
    std::vector<int> legs;  // sorted marking labels

    friend auto operator<=>(const OuterVertex&, const OuterVertex&) = default;
    friend bool operator==(const OuterVertex&, const OuterVertex&) = default;
};

/// A star graph over a set of marking labels. Outer vertices are kept in
/// canonical (genus, edges, legs) order, so each unordered graph appears once;
/// symmetry_weight() restores the ordered-sum normalization.
struct StarGraph {
    int genus = 0;
    int central_genus = 0;
    int i0 = 0;
    std::vector<int> central_legs;  // sorted, contains i0
    std::vector<OuterVertex> outer;

    int ell() const { return static_cast<int>(outer.size()); }
    int e0() const;
    int n0() const { return static_cast<int>(central_legs.size()); }
    /// Power of the central prefactor: 2 g0 - 3 + n0 + e0.
    int j0() const { return 2 * central_genus - 3 + n0() + e0(); }
    int h1() const { return e0() - ell(); }
    /// 2 g_j - 2 + n_j + e_j for outer vertex j (0-based), or the central vertex when j < 0.
    int vertex_euler(int j) const;
    bool is_trivial() const { return outer.empty(); }

    /// Number of ordered outer-vertex tuples this canonical graph stands for.
    long orderings() const;
    /// orderings / (l! prod e_j!) = 1 / (prod m_k! prod e_j!), m_k the sizes of
    /// groups of identical outer vertices.
    Rational symmetry_weight() const;

    /// Stable one-line text: g0[legs] -- (g_j,e_j)[legs] ...
    std::string encode() const;

    friend bool operator==(const StarGraph&, const StarGraph&) = default;
};

/// All star graphs of genus g over the marking labels with i0 on the central vertex.
/// Throws InputError for unstable (g, n) or i0 not among the markings.
std::vector<StarGraph> enumerate_star_graphs(int genus, const std::vector<int>& markings, int i0);

/// Memoized enumeration keyed by (genus, number of markings, position of i0),
/// on labels 0..n-1.
const std::vector<StarGraph>& star_graphs_on_slots(int genus, int n, int i0);

/// |Aut| of the graph with legs fixed, by brute force over vertex and edge permutations.
long automorphism_count(const StarGraph& graph);

struct DomainLevels {
    std::vector<Rational> levels;  // c_j for each outer vertex
    bool empty = false;            // some c_j <= 0
    int dimension = 0;             // h1 = e0 - l
};

/// Levels c_j = 2g_j - 2 + n_j + e_j - sum_{i in L_j} alpha_i; labels index alpha 1-based.
DomainLevels domain_of(const StarGraph& graph, const WeightVector& alpha);

struct Twist {
    std::vector<std::vector<Rational>> beta;  // beta[j][i] for outer vertex j, edge i
    Rational multiplicity() const;             // prod beta
};

/// Twists in the open domain with k*beta integral. Requires k*alpha integral.
std::vector<Twist> enumerate_k_twists(const StarGraph& graph, const WeightVector& alpha, long k);

/// Child i0 choice when a flattened outer vertex is expanded.
enum class I0Policy {
    prefer_fixed_first,  // first constant marking slot, else first edge slot
    prefer_fixed_last,   // last constant marking slot, else last edge slot
    first_edge,          // always the first edge slot
};

struct StarTree {
    std::string id;
    StarGraph root;
    MultiPoly integrand;
    CascadePolytope domain;
    std::map<VarId, std::string> variable_names;
    int depth = 0;
};

/// Expands every outer vertex of `root` through all of its own star graphs,
/// recursively, and returns the resulting trees with assembled integrands and
/// cascade domains. Trees whose domain is structurally empty are dropped.
std::vector<StarTree> flatten(const StarGraph& root, const WeightVector& alpha,
                              ConventionFlags conv,
                              I0Policy policy = I0Policy::prefer_fixed_first);

}  // namespace flatvol
