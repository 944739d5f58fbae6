#pragma once

// Exact integration of polynomials over cascade polytopes: positive variables
// grouped into blocks whose sums equal affine functions of earlier blocks.
//
// Measure: each block drops its last variable (it becomes level minus the sum
// of the others) and the integral is taken with Lebesgue measure in the
// remaining free coordinates.

#include "flatvol/multipoly.hpp"
#include "flatvol/rational.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace flatvol {

struct CascadeBlock {
    std::vector<VarId> vars;
    /// Affine in constants and variables of strictly earlier blocks.
    AffineExpr level;
};

class CascadePolytope {
public:
    CascadePolytope() = default;
    explicit CascadePolytope(std::vector<CascadeBlock> blocks);

    void add_block(CascadeBlock block);
    const std::vector<CascadeBlock>& blocks() const { return blocks_; }
    std::vector<VarId> variables() const;
    /// Number of free coordinates: total variables minus number of blocks.
    std::size_t dimension() const;

private:
    std::vector<CascadeBlock> blocks_;
};

/// Row a.x + b > 0 over the free coordinates.
struct LinearInequality {
    std::vector<Rational> a;
    Rational b;
};

struct InequalitySystem {
    std::size_t dim = 0;
    std::vector<LinearInequality> rows;
    /// Set when a constant row fails (e.g. a single-variable block at a level <= 0).
    bool constant_infeasible = false;

    /// Drops constant rows, recording failure in constant_infeasible.
    void add_row(LinearInequality row);
    bool strictly_satisfies(std::span<const Rational> x) const;
};

struct Parametrization {
    std::vector<VarId> free_vars;
    /// Every cascade variable as an affine function of the free coordinates.
    std::map<VarId, AffineExpr> images;
    InequalitySystem system;
};

/// Throws std::invalid_argument when a level references a variable that is not
/// from an earlier block, or a block is empty.
Parametrization parametrize(const CascadePolytope& polytope);

struct VRepPolytope {
    std::size_t dim = 0;
    std::vector<std::vector<Rational>> vertices;
    /// tight[v] lists the rows satisfied with equality at vertex v.
    std::vector<std::vector<std::size_t>> tight;
    /// Affine dimension of the closed feasible set (-1 when empty).
    int affine_dimension = -1;

    bool empty() const { return vertices.empty(); }
    bool dimension_deficient() const {
        return affine_dimension >= 0 && affine_dimension < static_cast<int>(dim);
    }
};

inline constexpr std::size_t kDefaultMaxDimension = 8;

/// Exact vertex enumeration. Returns no vertices when the open feasible set is
/// empty (infeasible or lower-dimensional); affine_dimension reports the
/// deficiency. Throws std::length_error above max_dim.
VRepPolytope enumerate_vertices(const InequalitySystem& system,
                                std::size_t max_dim = kDefaultMaxDimension);

enum class Apex { lex_min, lex_max };

/// Fan triangulation: cone from the apex vertex over recursively triangulated
/// facets not containing it. Each simplex lists dim+1 vertex indices.
std::vector<std::vector<std::size_t>> triangulate(const VRepPolytope& polytope,
                                                  Apex apex = Apex::lex_min);

/// Exact integral of p over the simplex with the given d+1 vertices.
/// coords[i] is the variable of the i-th coordinate.
/// Throws std::invalid_argument on a degenerate simplex.
Rational integrate_over_simplex(const MultiPoly& p, std::span<const VarId> coords,
                                const std::vector<std::vector<Rational>>& vertices);

/// Exact integral of p over {x : rows > 0}; 0 when the open set is empty.
Rational integrate_system(const MultiPoly& p, std::span<const VarId> coords,
                          const InequalitySystem& system, Apex apex = Apex::lex_min);

/// Exact integral over a cascade polytope under the projection measure.
/// A 0-dimensional domain returns p at the substituted point when every level
/// is positive and 0 otherwise.
Rational integrate(const MultiPoly& p, const CascadePolytope& domain);

/// (1/k^d) * sum of p over the points of (1/k)Z^d strictly inside the system,
/// with p evaluated in double precision.
double lattice_sum(const MultiPoly& p, std::span<const VarId> coords,
                   const InequalitySystem& system, long k);

/// Number of points of (1/k)Z^d strictly inside the system.
std::size_t lattice_count(const InequalitySystem& system, long k);

}  // namespace flatvol
