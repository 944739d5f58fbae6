#include "flatvol/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>

namespace flatvol {

// ---------------------------------------------------------------------------
// Cascade description

CascadePolytope::CascadePolytope(std::vector<CascadeBlock> blocks) {
    for (auto& b : blocks) {
        add_block(std::move(b));
    }
}

void CascadePolytope::add_block(CascadeBlock block) {
    if (block.vars.empty()) {
        throw std::invalid_argument("cascade block without variables");
    }
    std::set<VarId> known;
    for (const auto& b : blocks_) {
        known.insert(b.vars.begin(), b.vars.end());
    }
    for (const auto& [v, c] : block.level.linear()) {
        if (!known.contains(v)) {
            throw std::invalid_argument("cascade level references variable " + std::to_string(v) +
                                        " that is not from an earlier block");
        }
    }
    for (VarId v : block.vars) {
        if (known.contains(v)) {
            throw std::invalid_argument("cascade variable " + std::to_string(v) + " reused");
        }
    }
    blocks_.push_back(std::move(block));
}

std::vector<VarId> CascadePolytope::variables() const {
    std::vector<VarId> out;
    for (const auto& b : blocks_) {
        out.insert(out.end(), b.vars.begin(), b.vars.end());
    }
    return out;
}

std::size_t CascadePolytope::dimension() const {
    std::size_t d = 0;
    for (const auto& b : blocks_) {
        d += b.vars.size() - 1;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Inequality systems

void InequalitySystem::add_row(LinearInequality row) {
    const bool constant =
        std::all_of(row.a.begin(), row.a.end(), [](const Rational& r) { return r.is_zero(); });
    if (constant) {
        if (row.b.sign() <= 0) {
            constant_infeasible = true;
        }
        return;
    }
    rows.push_back(std::move(row));
}

namespace {

Rational row_value(const LinearInequality& row, std::span<const Rational> x) {
    Rational v = row.b;
    for (std::size_t i = 0; i < row.a.size(); ++i) {
        if (!row.a[i].is_zero()) {
            v += row.a[i] * x[i];
        }
    }
    return v;
}

}  // namespace

bool InequalitySystem::strictly_satisfies(std::span<const Rational> x) const {
    if (constant_infeasible) {
        return false;
    }
    return std::all_of(rows.begin(), rows.end(),
                       [&](const LinearInequality& r) { return row_value(r, x).sign() > 0; });
}

Parametrization parametrize(const CascadePolytope& polytope) {
    Parametrization out;
    for (const auto& block : polytope.blocks()) {
        const AffineExpr level = block.level.substitute(out.images);
        AffineExpr last = level;
        for (std::size_t i = 0; i + 1 < block.vars.size(); ++i) {
            const VarId v = block.vars[i];
            out.free_vars.push_back(v);
            out.images[v] = AffineExpr::variable(v);
            last -= out.images[v];
        }
        out.images[block.vars.back()] = last;
    }
    out.system.dim = out.free_vars.size();
    std::map<VarId, std::size_t> column;
    for (std::size_t i = 0; i < out.free_vars.size(); ++i) {
        column[out.free_vars[i]] = i;
    }
    for (const auto& block : polytope.blocks()) {
        for (VarId v : block.vars) {
            const AffineExpr& e = out.images.at(v);
            LinearInequality row{std::vector<Rational>(out.system.dim), e.constant()};
            for (const auto& [var, c] : e.linear()) {
                row.a[column.at(var)] = c;
            }
            out.system.add_row(std::move(row));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Linear algebra helpers

namespace {

using Matrix = std::vector<std::vector<Rational>>;

// Solves M x = rhs for square M; returns false when singular.
bool solve_square(Matrix m, std::vector<Rational> rhs, std::vector<Rational>& x) {
    const std::size_t n = m.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col].is_zero()) {
            ++pivot;
        }
        if (pivot == n) {
            return false;
        }
        std::swap(m[pivot], m[col]);
        std::swap(rhs[pivot], rhs[col]);
        const Rational inv = inverse(m[col][col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || m[r][col].is_zero()) {
                continue;
            }
            const Rational f = m[r][col] * inv;
            for (std::size_t c = col; c < n; ++c) {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rhs[i] / m[i][i];
    }
    return true;
}

std::size_t matrix_rank(Matrix m) {
    std::size_t rank = 0;
    const std::size_t rows = m.size();
    const std::size_t cols = rows == 0 ? 0 : m[0].size();
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && m[pivot][col].is_zero()) {
            ++pivot;
        }
        if (pivot == rows) {
            continue;
        }
        std::swap(m[pivot], m[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            if (m[r][col].is_zero()) {
                continue;
            }
            const Rational f = m[r][col] / m[rank][col];
            for (std::size_t c = col; c < cols; ++c) {
                m[r][c] -= f * m[rank][c];
            }
        }
        ++rank;
    }
    return rank;
}

Rational determinant(Matrix m) {
    const std::size_t n = m.size();
    Rational det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col].is_zero()) {
            ++pivot;
        }
        if (pivot == n) {
            return Rational(0);
        }
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            det = -det;
        }
        det *= m[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col].is_zero()) {
                continue;
            }
            const Rational f = m[r][col] / m[col][col];
            for (std::size_t c = col; c < n; ++c) {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    return det;
}

int affine_rank(const std::vector<std::vector<Rational>>& points,
                const std::vector<std::size_t>& subset) {
    if (subset.empty()) {
        return -1;
    }
    Matrix diffs;
    const auto& base = points[subset[0]];
    for (std::size_t i = 1; i < subset.size(); ++i) {
        std::vector<Rational> d(base.size());
        for (std::size_t c = 0; c < base.size(); ++c) {
            d[c] = points[subset[i]][c] - base[c];
        }
        diffs.push_back(std::move(d));
    }
    return static_cast<int>(matrix_rank(std::move(diffs)));
}

// Calls f for every k-subset of {0..n-1}, in lexicographic order.
void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<void(const std::vector<std::size_t>&)>& f) {
    if (k > n) {
        return;
    }
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = i;
    }
    while (true) {
        f(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vertex enumeration

VRepPolytope enumerate_vertices(const InequalitySystem& system, std::size_t max_dim) {
    if (system.dim > max_dim) {
        throw std::length_error("polytope dimension " + std::to_string(system.dim) +
                                " exceeds the configured bound " + std::to_string(max_dim) +
                                "; decompose the domain");
    }
    VRepPolytope out;
    out.dim = system.dim;
    if (system.constant_infeasible) {
        return out;
    }
    const std::size_t d = system.dim;
    if (d == 0) {
        out.vertices.emplace_back();
        out.tight.emplace_back();
        out.affine_dimension = 0;
        return out;
    }
    std::set<std::vector<Rational>> seen;
    std::vector<std::vector<Rational>> vertices;
    for_each_combination(system.rows.size(), d, [&](const std::vector<std::size_t>& subset) {
        Matrix m;
        std::vector<Rational> rhs;
        for (std::size_t r : subset) {
            m.push_back(system.rows[r].a);
            rhs.push_back(-system.rows[r].b);
        }
        std::vector<Rational> x;
        if (!solve_square(std::move(m), std::move(rhs), x)) {
            return;
        }
        for (const auto& row : system.rows) {
            if (row_value(row, x).sign() < 0) {
                return;
            }
        }
        if (seen.insert(x).second) {
            vertices.push_back(std::move(x));
        }
    });
    // Deterministic order independent of constraint order.
    std::sort(vertices.begin(), vertices.end());
    std::vector<std::size_t> all(vertices.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    out.affine_dimension = affine_rank(vertices, all);
    if (out.affine_dimension < static_cast<int>(d)) {
        return out;
    }
    out.vertices = std::move(vertices);
    for (const auto& v : out.vertices) {
        std::vector<std::size_t> t;
        for (std::size_t r = 0; r < system.rows.size(); ++r) {
            if (row_value(system.rows[r], v).is_zero()) {
                t.push_back(r);
            }
        }
        out.tight.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Triangulation

namespace {

struct Triangulator {
    const VRepPolytope& poly;
    Apex apex_rule;
    std::size_t row_count = 0;
    std::vector<std::vector<std::size_t>> simplices;

    bool is_tight(std::size_t vertex, std::size_t row) const {
        const auto& t = poly.tight[vertex];
        return std::binary_search(t.begin(), t.end(), row);
    }

    std::size_t pick_apex(const std::vector<std::size_t>& face) const {
        // Vertices are sorted lexicographically, so indices order them.
        return apex_rule == Apex::lex_min ? *std::min_element(face.begin(), face.end())
                                          : *std::max_element(face.begin(), face.end());
    }

    void run(const std::vector<std::size_t>& face, int face_dim, std::vector<std::size_t> cone) {
        if (face_dim == 0) {
            cone.push_back(face.front());
            simplices.push_back(std::move(cone));
            return;
        }
        const std::size_t apex = pick_apex(face);
        cone.push_back(apex);
        std::set<std::vector<std::size_t>> facets;
        for (std::size_t r = 0; r < row_count; ++r) {
            if (is_tight(apex, r)) {
                continue;
            }
            std::vector<std::size_t> sub;
            for (std::size_t v : face) {
                if (is_tight(v, r)) {
                    sub.push_back(v);
                }
            }
            if (sub.size() < static_cast<std::size_t>(face_dim) || facets.contains(sub)) {
                continue;
            }
            if (affine_rank(poly.vertices, sub) == face_dim - 1) {
                facets.insert(sub);
            }
        }
        for (const auto& facet : facets) {
            run(facet, face_dim - 1, cone);
        }
    }
};

}  // namespace

std::vector<std::vector<std::size_t>> triangulate(const VRepPolytope& polytope, Apex apex) {
    if (polytope.empty()) {
        return {};
    }
    std::size_t rows = 0;
    for (const auto& t : polytope.tight) {
        if (!t.empty()) {
            rows = std::max(rows, t.back() + 1);
        }
    }
    Triangulator tri{polytope, apex, rows, {}};
    std::vector<std::size_t> all(polytope.vertices.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    tri.run(all, static_cast<int>(polytope.dim), {});
    return std::move(tri.simplices);
}

// ---------------------------------------------------------------------------
// Integration

Rational integrate_over_simplex(const MultiPoly& p, std::span<const VarId> coords,
                                const std::vector<std::vector<Rational>>& vertices) {
    const std::size_t d = coords.size();
    if (vertices.size() != d + 1) {
        throw std::invalid_argument("integrate_over_simplex: need d+1 vertices");
    }
    if (d == 0) {
        return p.constant_term();
    }
    Matrix edges(d, std::vector<Rational>(d));
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < d; ++i) {
            edges[i][j] = vertices[j + 1][i] - vertices[0][i];
        }
    }
    const Rational jac = abs(determinant(edges));
    if (jac.is_zero()) {
        throw std::invalid_argument("integrate_over_simplex: degenerate simplex");
    }
    // Barycentric parameters t_j live above every coordinate id in use.
    VarId base = 0;
    for (VarId v : coords) {
        base = std::max(base, v + 1);
    }
    for (VarId v : p.variables()) {
        base = std::max(base, v + 1);
    }
    std::map<VarId, AffineExpr> images;
    for (std::size_t i = 0; i < d; ++i) {
        AffineExpr e(vertices[0][i]);
        for (std::size_t j = 0; j < d; ++j) {
            e += AffineExpr::variable(base + static_cast<VarId>(j), edges[i][j]);
        }
        images[coords[i]] = std::move(e);
    }
    const MultiPoly pulled = p.compose_affine(images);
    // int_{t >= 0, sum t <= 1} prod t_j^{m_j} dt = prod m_j! / (sum m_j + d)!
    Rational total;
    for (const auto& [m, c] : pulled.terms()) {
        Rational term = c;
        for (const auto& [v, e] : m.factors()) {
            term *= factorial(e);
        }
        term /= factorial(m.degree() + static_cast<unsigned>(d));
        total += term;
    }
    return total * jac;
}

Rational integrate_system(const MultiPoly& p, std::span<const VarId> coords,
                          const InequalitySystem& system, Apex apex) {
    if (system.constant_infeasible) {
        return Rational(0);
    }
    if (system.dim == 0) {
        return p.constant_term();
    }
    const VRepPolytope vrep = enumerate_vertices(system);
    if (vrep.empty()) {
        return Rational(0);
    }
    Rational total;
    for (const auto& simplex : triangulate(vrep, apex)) {
        std::vector<std::vector<Rational>> pts;
        pts.reserve(simplex.size());
        for (std::size_t idx : simplex) {
            pts.push_back(vrep.vertices[idx]);
        }
        total += integrate_over_simplex(p, coords, pts);
    }
    return total;
}

Rational integrate(const MultiPoly& p, const CascadePolytope& domain) {
    const auto vars = domain.variables();
    for (VarId v : p.variables()) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
            throw std::invalid_argument("integrate: integrand variable " + std::to_string(v) +
                                        " is not a domain variable");
        }
    }
    const Parametrization param = parametrize(domain);
    if (param.system.constant_infeasible) {
        return Rational(0);
    }
    const MultiPoly reduced = p.compose_affine(param.images);
    return integrate_system(reduced, param.free_vars, param.system);
}

// ---------------------------------------------------------------------------
// Lattice sums

namespace {

template <typename Visit>
void for_each_lattice_point(const InequalitySystem& system, long k, Visit&& visit) {
    if (system.constant_infeasible) {
        return;
    }
    const std::size_t d = system.dim;
    if (d == 0) {
        visit(std::vector<Rational>{});
        return;
    }
    VRepPolytope vrep = enumerate_vertices(system);
    if (vrep.empty()) {
        return;
    }
    std::vector<long> lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
        Rational mn = vrep.vertices[0][i];
        Rational mx = mn;
        for (const auto& v : vrep.vertices) {
            mn = std::min(mn, v[i]);
            mx = std::max(mx, v[i]);
        }
        lo[i] = (mn * Rational(k)).floor().get_si();
        hi[i] = (mx * Rational(k)).ceil().get_si();
    }
    std::vector<long> z(lo);
    std::vector<Rational> x(d);
    while (true) {
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = Rational(z[i], k);
        }
        if (system.strictly_satisfies(x)) {
            visit(x);
        }
        std::size_t i = 0;
        while (i < d && z[i] == hi[i]) {
            z[i] = lo[i];
            ++i;
        }
        if (i == d) {
            return;
        }
        ++z[i];
    }
}

}  // namespace

double lattice_sum(const MultiPoly& p, std::span<const VarId> coords,
                   const InequalitySystem& system, long k) {
    // Pre-flatten p to (coefficient, [(coord index, exponent)]) for fast double evaluation.
    struct Term {
        double c;
        std::vector<std::pair<std::size_t, std::uint32_t>> f;
    };
    std::vector<Term> terms;
    for (const auto& [m, c] : p.terms()) {
        Term t{c.to_double(), {}};
        for (const auto& [v, e] : m.factors()) {
            auto it = std::find(coords.begin(), coords.end(), v);
            if (it == coords.end()) {
                throw std::invalid_argument("lattice_sum: variable outside the coordinates");
            }
            t.f.emplace_back(static_cast<std::size_t>(it - coords.begin()), e);
        }
        terms.push_back(std::move(t));
    }
    double total = 0.0;
    std::vector<double> xd(system.dim);
    for_each_lattice_point(system, k, [&](const std::vector<Rational>& x) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            xd[i] = x[i].to_double();
        }
        for (const auto& t : terms) {
            double v = t.c;
            for (const auto& [i, e] : t.f) {
                v *= std::pow(xd[i], static_cast<double>(e));
            }
            total += v;
        }
    });
    return total / std::pow(static_cast<double>(k), static_cast<double>(system.dim));
}

std::size_t lattice_count(const InequalitySystem& system, long k) {
    std::size_t count = 0;
    for_each_lattice_point(system, k, [&](const std::vector<Rational>&) { ++count; });
    return count;
}

}  // namespace flatvol
