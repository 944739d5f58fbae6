#include "flatvol/polytope.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace flatvol;

namespace {

Rational R(long p, long q = 1) { return Rational(p, q); }

MultiPoly X(VarId v) { return MultiPoly::variable(v); }

MultiPoly mono(const std::vector<std::pair<VarId, unsigned>>& f) {
    MultiPoly p(1);
    for (auto [v, e] : f) {
        p *= pow(X(v), e);
    }
    return p;
}

// Dirichlet: integral of prod x_i^{m_i} over {x_0 + ... + x_d = c, x > 0}
// in the first d coordinates equals prod m_i! c^{M + d} / (M + d)!.
Rational dirichlet(const std::vector<unsigned>& m, const Rational& c) {
    unsigned total = 0;
    Rational num(1);
    for (unsigned e : m) {
        num *= factorial(e);
        total += e;
    }
    const unsigned d = static_cast<unsigned>(m.size()) - 1;
    return num * pow(c, total + d) / factorial(total + d);
}

InequalitySystem system_of(std::size_t dim, const std::vector<std::pair<std::vector<long>, long>>& rows) {
    InequalitySystem s;
    s.dim = dim;
    for (const auto& [a, b] : rows) {
        LinearInequality row;
        for (long x : a) {
            row.a.emplace_back(x);
        }
        row.b = Rational(b);
        s.add_row(std::move(row));
    }
    return s;
}

Rational random_rational(std::mt19937_64& rng, long lo, long hi, long den) {
    std::uniform_int_distribution<long> d(lo * den, hi * den);
    return Rational(d(rng), den);
}

MultiPoly random_poly(std::mt19937_64& rng, const std::vector<VarId>& vars, bool positive) {
    std::uniform_int_distribution<int> exp(0, 3);
    std::uniform_int_distribution<long> coef(positive ? 1 : -9, 9);
    MultiPoly p;
    for (int t = 0; t < 4; ++t) {
        MultiPoly m(Rational(coef(rng), 3));
        for (VarId v : vars) {
            m *= pow(X(v), static_cast<unsigned>(exp(rng)));
        }
        p += m;
    }
    return p;
}

// A random bounded full-dimensional 2D system: a triangle with rational corners.
InequalitySystem random_triangle(std::mt19937_64& rng) {
    while (true) {
        std::vector<std::vector<Rational>> p(3);
        for (auto& q : p) {
            q = {random_rational(rng, -2, 2, 7), random_rational(rng, -2, 2, 7)};
        }
        const Rational area2 = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) -
                               (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        if (area2.is_zero()) {
            continue;
        }
        InequalitySystem s;
        s.dim = 2;
        for (int i = 0; i < 3; ++i) {
            const auto& a = p[static_cast<std::size_t>(i)];
            const auto& b = p[static_cast<std::size_t>((i + 1) % 3)];
            const auto& c = p[static_cast<std::size_t>((i + 2) % 3)];
            // Line through a, b oriented so that c is on the positive side.
            LinearInequality row{{b[1] - a[1], a[0] - b[0]}, Rational(0)};
            row.b = -(row.a[0] * a[0] + row.a[1] * a[1]);
            if ((row.a[0] * c[0] + row.a[1] * c[1] + row.b).sign() < 0) {
                row.a = {-row.a[0], -row.a[1]};
                row.b = -row.b;
            }
            s.add_row(row);
        }
        return s;
    }
}

}  // namespace

TEST_CASE("parametrize examples") {
    const Rational c(3, 4);
    CascadePolytope one({CascadeBlock{{0, 1}, AffineExpr(c)}});
    auto p1 = parametrize(one);
    CHECK(p1.free_vars == std::vector<VarId>{0});
    CHECK(p1.system.dim == 1);
    CHECK(p1.images.at(1) == AffineExpr(c) - AffineExpr::variable(0));
    const auto v1 = enumerate_vertices(p1.system);
    REQUIRE(v1.vertices.size() == 2);
    CHECK(((v1.vertices[0][0] == R(0) && v1.vertices[1][0] == c) ||
           (v1.vertices[1][0] == R(0) && v1.vertices[0][0] == c)));

    CascadePolytope single({CascadeBlock{{5}, AffineExpr(c)}});
    auto p2 = parametrize(single);
    CHECK(p2.free_vars.empty());
    CHECK(p2.images.at(5) == AffineExpr(c));
    CHECK(!p2.system.constant_infeasible);
    CascadePolytope bad({CascadeBlock{{5}, AffineExpr(-c)}});
    CHECK(parametrize(bad).system.constant_infeasible);

    // Chained: {b1, b2} with b1 + b2 = 1/2, then {c1, c2} with c1 + c2 = b1.
    CascadePolytope chain;
    chain.add_block(CascadeBlock{{0, 1}, AffineExpr(R(1, 2))});
    chain.add_block(CascadeBlock{{2, 3}, AffineExpr::variable(0)});
    auto p3 = parametrize(chain);
    CHECK(p3.free_vars == std::vector<VarId>{0, 2});
    CHECK(chain.dimension() == 2);
    const auto v3 = enumerate_vertices(p3.system);
    CHECK(v3.vertices.size() == 3);
    CHECK(v3.affine_dimension == 2);
    CHECK(integrate(MultiPoly(1), chain) == R(1, 8));

    CHECK_THROWS_AS(parametrize(CascadePolytope({CascadeBlock{{0}, AffineExpr::variable(1)}})),
                    std::invalid_argument);
    CHECK_THROWS_AS(parametrize(CascadePolytope({CascadeBlock{{}, AffineExpr(c)}})),
                    std::invalid_argument);
}

TEST_CASE("vertex enumeration examples") {
    const auto seg = enumerate_vertices(system_of(1, {{{1}, 0}, {{-1}, 1}}));
    CHECK(seg.vertices.size() == 2);
    const auto tri = enumerate_vertices(system_of(2, {{{1, 0}, 0}, {{0, 1}, 0}, {{-2, -2}, 1}}));
    REQUIRE(tri.vertices.size() == 3);
    std::set<std::vector<Rational>> got(tri.vertices.begin(), tri.vertices.end());
    CHECK(got == std::set<std::vector<Rational>>{{R(0), R(0)}, {R(1, 2), R(0)}, {R(0), R(1, 2)}});
    for (std::size_t v = 0; v < tri.vertices.size(); ++v) {
        CHECK(tri.tight[v].size() >= 2);
    }
    CHECK(enumerate_vertices(system_of(1, {{{1}, 0}, {{-1}, -1}})).empty());
    // A segment in the plane: closed set of dimension 1, open set empty.
    const auto flat = enumerate_vertices(system_of(2, {{{1, 0}, 0}, {{0, 1}, 0}, {{0, -1}, 0}}));
    CHECK(flat.empty());
    InequalitySystem big;
    big.dim = 9;
    CHECK_THROWS_AS(enumerate_vertices(big), std::length_error);
}

TEST_CASE("vertices describe the feasible set") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const InequalitySystem s = random_triangle(rng);
        const auto vrep = enumerate_vertices(s);
        REQUIRE(vrep.vertices.size() == 3);
        for (std::size_t v = 0; v < 3; ++v) {
            for (const auto& row : s.rows) {
                CHECK((row.a[0] * vrep.vertices[v][0] + row.a[1] * vrep.vertices[v][1] + row.b)
                          .sign() >= 0);
            }
            CHECK(vrep.tight[v].size() >= 2);
        }
        // Random points: strict feasibility agrees with strict barycentric positivity.
        const auto& P = vrep.vertices;
        const Rational det = (P[1][0] - P[0][0]) * (P[2][1] - P[0][1]) -
                             (P[2][0] - P[0][0]) * (P[1][1] - P[0][1]);
        for (int k = 0; k < 50; ++k) {
            const std::vector<Rational> x{random_rational(rng, -2, 2, 11),
                                          random_rational(rng, -2, 2, 11)};
            const Rational l1 = ((x[0] - P[0][0]) * (P[2][1] - P[0][1]) -
                                 (P[2][0] - P[0][0]) * (x[1] - P[0][1])) / det;
            const Rational l2 = ((P[1][0] - P[0][0]) * (x[1] - P[0][1]) -
                                 (x[0] - P[0][0]) * (P[1][1] - P[0][1])) / det;
            const Rational l0 = R(1) - l1 - l2;
            const bool inside = l0.sign() > 0 && l1.sign() > 0 && l2.sign() > 0;
            CHECK(s.strictly_satisfies(x) == inside);
        }
    }
}

TEST_CASE("simplex integration") {
    const std::vector<VarId> coords{0, 1};
    const std::vector<std::vector<Rational>> std2{{R(0), R(0)}, {R(1), R(0)}, {R(0), R(1)}};
    CHECK(integrate_over_simplex(MultiPoly(1), coords, std2) == R(1, 2));
    CHECK(integrate_over_simplex(X(0), coords, std2) == R(1, 6));
    for (unsigned a = 0; a <= 4; ++a) {
        for (unsigned b = 0; b <= 4; ++b) {
            CHECK(integrate_over_simplex(mono({{0, a}, {1, b}}), coords, std2) ==
                  factorial(a) * factorial(b) / factorial(a + b + 2));
        }
    }
    const std::vector<VarId> c3{0, 1, 2};
    const std::vector<std::vector<Rational>> std3{
        {R(0), R(0), R(0)}, {R(1), R(0), R(0)}, {R(0), R(1), R(0)}, {R(0), R(0), R(1)}};
    CHECK(integrate_over_simplex(mono({{0, 1}, {1, 2}, {2, 3}}), c3, std3) ==
          factorial(1) * factorial(2) * factorial(3) / factorial(9));
    const Rational c(5, 3);
    const std::vector<VarId> c1{0};
    CHECK(integrate_over_simplex(X(0) * (MultiPoly(c) - X(0)), c1, {{R(0)}, {c}}) ==
          pow(c, 3) / R(6));
    CHECK_THROWS_AS(integrate_over_simplex(MultiPoly(1), coords,
                                           {{R(0), R(0)}, {R(1), R(1)}, {R(2), R(2)}}),
                    std::invalid_argument);
}

TEST_CASE("cascade integration examples") {
    CascadePolytope one({CascadeBlock{{0, 1}, AffineExpr(R(1, 2))}});
    CHECK(integrate(X(0) * X(1), one) == R(1, 48));
    CascadePolytope empty({CascadeBlock{{0, 1}, AffineExpr(R(-1, 2))}});
    CHECK(integrate(X(0) * X(1), empty) == R(0));
    CascadePolytope atom({CascadeBlock{{0}, AffineExpr(R(1))}});
    CHECK(integrate(X(0), atom) == R(1));
    CascadePolytope atom_bad({CascadeBlock{{0}, AffineExpr(R(0))}});
    CHECK(integrate(X(0) + MultiPoly(1), atom_bad) == R(0));
    // Atom feeding a one-dimensional block.
    CascadePolytope mixed({CascadeBlock{{0}, AffineExpr(R(2, 3))},
                           CascadeBlock{{1, 2}, AffineExpr::variable(0)}});
    CHECK(integrate(X(1), mixed) == R(2, 9));
}

TEST_CASE("cascade integrals against Dirichlet") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<unsigned> e(0, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const Rational c = random_rational(rng, 0, 3, 13) + R(1, 13);
        const std::size_t size = 2 + static_cast<std::size_t>(trial % 3);
        std::vector<VarId> vars;
        std::vector<unsigned> m;
        std::vector<std::pair<VarId, unsigned>> f;
        for (std::size_t i = 0; i < size; ++i) {
            vars.push_back(static_cast<VarId>(i));
            m.push_back(e(rng));
            f.emplace_back(static_cast<VarId>(i), m.back());
        }
        CascadePolytope p({CascadeBlock{vars, AffineExpr(c)}});
        CHECK(integrate(mono(f), p) == dirichlet(m, c));
    }
    // Chained blocks: inner integral over {c1 + c2 = b1} first.
    for (unsigned i = 0; i <= 2; ++i) {
        for (unsigned j = 0; j <= 2; ++j) {
            for (unsigned k = 0; k <= 2; ++k) {
                const unsigned l = (i + j + k) % 3;
                const Rational c(7, 5);
                CascadePolytope chain({CascadeBlock{{0, 1}, AffineExpr(c)},
                                       CascadeBlock{{2, 3}, AffineExpr::variable(0)}});
                const Rational inner = factorial(k) * factorial(l) / factorial(k + l + 1);
                const Rational expected = inner * dirichlet({i + k + l + 1, j}, c);
                CHECK(integrate(mono({{0, i}, {1, j}, {2, k}, {3, l}}), chain) == expected);
            }
        }
    }
}

TEST_CASE("additivity under hyperplane splits") {
    std::mt19937_64 rng(29);
    const std::vector<VarId> coords{0, 1};
    for (int trial = 0; trial < 15; ++trial) {
        const InequalitySystem s = random_triangle(rng);
        const MultiPoly p = random_poly(rng, coords, false);
        LinearInequality cut{{random_rational(rng, -3, 3, 5), random_rational(rng, -3, 3, 5)},
                             random_rational(rng, -1, 1, 5)};
        if (cut.a[0].is_zero() && cut.a[1].is_zero()) {
            continue;
        }
        InequalitySystem left = s;
        left.add_row(cut);
        InequalitySystem right = s;
        right.add_row(LinearInequality{{-cut.a[0], -cut.a[1]}, -cut.b});
        CHECK(integrate_system(p, coords, left) + integrate_system(p, coords, right) ==
              integrate_system(p, coords, s));
    }
}

TEST_CASE("unimodular affine invariance") {
    std::mt19937_64 rng(31);
    const std::vector<VarId> coords{0, 1};
    const std::vector<std::vector<long>> unimodular{{1, 1, 0, 1}, {2, 1, 1, 1}, {0, 1, -1, 0},
                                                    {1, -3, 0, 1}, {-1, 0, 0, 1}};
    for (int trial = 0; trial < 15; ++trial) {
        const InequalitySystem s = random_triangle(rng);
        const MultiPoly p = random_poly(rng, coords, false);
        const auto& u = unimodular[static_cast<std::size_t>(trial) % unimodular.size()];
        const std::vector<Rational> t{random_rational(rng, -1, 1, 3), random_rational(rng, -1, 1, 3)};
        // x = U y + t
        std::map<VarId, AffineExpr> images;
        images[0] = AffineExpr::variable(0, R(u[0])) + AffineExpr::variable(1, R(u[1])) + AffineExpr(t[0]);
        images[1] = AffineExpr::variable(0, R(u[2])) + AffineExpr::variable(1, R(u[3])) + AffineExpr(t[1]);
        InequalitySystem pulled;
        pulled.dim = 2;
        for (const auto& row : s.rows) {
            LinearInequality r{{row.a[0] * R(u[0]) + row.a[1] * R(u[2]),
                                row.a[0] * R(u[1]) + row.a[1] * R(u[3])},
                               row.a[0] * t[0] + row.a[1] * t[1] + row.b};
            pulled.add_row(r);
        }
        CHECK(integrate_system(p.compose_affine(images), coords, pulled) ==
              integrate_system(p, coords, s));
    }
}

TEST_CASE("triangulation independence") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const Rational c = random_rational(rng, 1, 3, 7);
        CascadePolytope chain({CascadeBlock{{0, 1, 2}, AffineExpr(c)},
                               CascadeBlock{{3, 4}, AffineExpr::variable(0) + AffineExpr(R(1, 3))}});
        const auto par = parametrize(chain);
        const auto vrep = enumerate_vertices(par.system);
        CHECK(triangulate(vrep, Apex::lex_min) != triangulate(vrep, Apex::lex_max));
        const MultiPoly p = random_poly(rng, {0, 1, 3}, false);
        const MultiPoly q = p.compose_affine(par.images);
        CHECK(integrate_system(q, par.free_vars, par.system, Apex::lex_min) ==
              integrate_system(q, par.free_vars, par.system, Apex::lex_max));
    }
}

TEST_CASE("Riemann sums approach exact integrals") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 12; ++trial) {
        const Rational c = random_rational(rng, 1, 2, 5);
        CascadePolytope dom;
        std::vector<VarId> used;
        switch (trial % 4) {
            case 0:
                dom = CascadePolytope({CascadeBlock{{0, 1}, AffineExpr(c)}});
                used = {0, 1};
                break;
            case 1:
                dom = CascadePolytope({CascadeBlock{{0, 1, 2}, AffineExpr(c)}});
                used = {0, 1, 2};
                break;
            case 2:
                dom = CascadePolytope({CascadeBlock{{0, 1}, AffineExpr(c)},
                                       CascadeBlock{{2, 3}, AffineExpr::variable(1)}});
                used = {0, 2, 3};
                break;
            default:
                dom = CascadePolytope({CascadeBlock{{0}, AffineExpr(c)},
                                       CascadeBlock{{1, 2, 3}, AffineExpr::variable(0) + AffineExpr(R(1, 2))}});
                used = {1, 2, 3};
                break;
        }
        const MultiPoly p = random_poly(rng, used, true);
        const Rational exact = integrate(p, dom);
        const auto par = parametrize(dom);
        const double sum = lattice_sum(p.compose_affine(par.images), par.free_vars, par.system, 400);
        CHECK(std::abs(sum - exact.to_double()) <= 0.02 * std::abs(exact.to_double()));
    }
}

TEST_CASE("lattice counts in an open interval") {
    for (long num = 1; num <= 37; num += 3) {
        const Rational c(num, 7);
        InequalitySystem s;
        s.dim = 1;
        s.add_row(LinearInequality{{R(1)}, R(0)});
        s.add_row(LinearInequality{{R(-1)}, c});
        CHECK(static_cast<long>(lattice_count(s, 10)) == (c * R(10)).ceil().get_si() - 1);
    }
}
