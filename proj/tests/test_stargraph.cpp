#include "flatvol/errors.hpp"
#include "flatvol/stargraph.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace flatvol;

namespace {

Rational R(long p, long q = 1) { return Rational(p, q); }

std::vector<int> labels(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 1);
    return v;
}

using Canonical = std::pair<int, std::vector<std::tuple<int, int, std::vector<int>>>>;

Canonical canonical(const StarGraph& gr) {
    Canonical c{gr.central_genus, {}};
    for (const auto& v : gr.outer) {
        c.second.emplace_back(v.genus, v.edges, v.legs);
    }
    std::sort(c.second.begin(), c.second.end());
    return c;
}

// Brute force: every map from non-i0 labels to vertices 0..l (0 central),
// every genus and edge count, kept when stable and genus-consistent.
std::set<Canonical> brute_force(int g, int n, int i0) {
    std::set<Canonical> out;
    std::vector<int> others;
    for (int i = 1; i <= n; ++i) {
        if (i != i0) {
            others.push_back(i);
        }
    }
    for (int ell = 0; ell <= g + n; ++ell) {
        const std::size_t m = others.size();
        std::size_t maps = 1;
        for (std::size_t i = 0; i < m; ++i) {
            maps *= static_cast<std::size_t>(ell + 1);
        }
        for (std::size_t code = 0; code < maps; ++code) {
            std::vector<std::vector<int>> legs(static_cast<std::size_t>(ell + 1));
            std::size_t c = code;
            for (int leg : others) {
                legs[c % static_cast<std::size_t>(ell + 1)].push_back(leg);
                c /= static_cast<std::size_t>(ell + 1);
            }
            legs[0].push_back(i0);
            // Each outer vertex has genus in [0, g] and edges in [1, g + 1].
            const std::size_t choices = static_cast<std::size_t>((g + 1) * (g + 1));
            std::size_t combos = 1;
            for (int j = 0; j < ell; ++j) {
                combos *= choices;
            }
            for (std::size_t k = 0; k < combos; ++k) {
                std::size_t r = k;
                int e0 = 0;
                int sum_g = 0;
                bool stable = true;
                Canonical cand;
                for (int j = 1; j <= ell; ++j) {
                    const int gj = static_cast<int>(r % static_cast<std::size_t>(g + 1));
                    r /= static_cast<std::size_t>(g + 1);
                    const int ej = 1 + static_cast<int>(r % static_cast<std::size_t>(g + 1));
                    r /= static_cast<std::size_t>(g + 1);
                    auto l = legs[static_cast<std::size_t>(j)];
                    std::sort(l.begin(), l.end());
                    stable = stable && 2 * gj - 2 + static_cast<int>(l.size()) + ej > 0;
                    e0 += ej;
                    sum_g += gj;
                    cand.second.emplace_back(gj, ej, l);
                }
                const int g0 = g - (e0 - ell) - sum_g;
                if (!stable || g0 < 0 ||
                    2 * g0 - 2 + static_cast<int>(legs[0].size()) + e0 <= 0) {
                    continue;
                }
                cand.first = g0;
                std::sort(cand.second.begin(), cand.second.end());
                out.insert(cand);
            }
        }
    }
    return out;
}

StarGraph genus7_example() {
    StarGraph gr;
    gr.genus = 7;
    gr.central_genus = 1;
    gr.i0 = 1;
    gr.central_legs = {1};
    gr.outer = {OuterVertex{2, 1, {3}}, OuterVertex{3, 2, {2}}};
    return gr;
}

void compositions(long total, int parts, std::vector<long>& cur,
                  std::vector<std::vector<long>>& out) {
    if (parts == 0) {
        if (total == 0) {
            out.push_back(cur);
        }
        return;
    }
    for (long x = 1; x <= total; ++x) {
        cur.push_back(x);
        compositions(total - x, parts - 1, cur, out);
        cur.pop_back();
    }
}

struct Slot {
    Rational value;
    bool fixed;
};

// Number of (1/k)-lattice points in every nested tree domain, with no pruning.
long nested_count(int genus, const std::vector<Slot>& slots, int i0, long k) {
    const int n = static_cast<int>(slots.size());
    if (genus == 0 && n == 3) {
        return 1;
    }
    std::vector<int> lab(static_cast<std::size_t>(n));
    std::iota(lab.begin(), lab.end(), 0);
    long total = 0;
    for (const auto& gr : enumerate_star_graphs(genus, lab, i0)) {
        long product = 1;
        for (int j = 0; j < gr.ell() && product != 0; ++j) {
            const auto& v = gr.outer[static_cast<std::size_t>(j)];
            Rational c(gr.vertex_euler(j));
            for (int leg : v.legs) {
                c -= slots[static_cast<std::size_t>(leg)].value;
            }
            const Rational scaled = c * Rational(k);
            REQUIRE(scaled.is_integer());
            std::vector<std::vector<long>> parts;
            std::vector<long> cur;
            if (scaled.sign() > 0) {
                compositions(scaled.numerator().get_si(), v.edges, cur, parts);
            }
            long sum = 0;
            for (const auto& p : parts) {
                std::vector<Slot> child;
                for (int leg : v.legs) {
                    child.push_back(slots[static_cast<std::size_t>(leg)]);
                }
                for (long x : p) {
                    child.push_back(Slot{Rational(x, k), false});
                }
                int ci0 = static_cast<int>(v.legs.size());
                for (std::size_t s = 0; s < child.size(); ++s) {
                    if (child[s].fixed) {
                        ci0 = static_cast<int>(s);
                        break;
                    }
                }
                sum += nested_count(v.genus, child, ci0, k);
            }
            product *= sum;
        }
        total += product;
    }
    return total;
}

}  // namespace

TEST_CASE("enumeration examples") {
    const auto g04 = enumerate_star_graphs(0, labels(4), 1);
    CHECK(g04.size() == 4);
    int trivial = 0;
    for (const auto& gr : g04) {
        if (gr.is_trivial()) {
            ++trivial;
            continue;
        }
        REQUIRE(gr.ell() == 1);
        CHECK(gr.outer[0].genus == 0);
        CHECK(gr.outer[0].edges == 1);
        CHECK(gr.outer[0].legs.size() == 2);
        CHECK(std::find(gr.outer[0].legs.begin(), gr.outer[0].legs.end(), 1) ==
              gr.outer[0].legs.end());
    }
    CHECK(trivial == 1);
    const auto g11 = enumerate_star_graphs(1, labels(1), 1);
    REQUIRE(g11.size() == 1);
    CHECK(g11[0].is_trivial());
    CHECK(g11[0].central_genus == 1);
}

TEST_CASE("enumeration matches brute force") {
    for (auto [g, n] : std::vector<std::pair<int, int>>{
             {0, 3}, {0, 4}, {0, 5}, {0, 6}, {1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}, {3, 1}}) {
        for (int i0 = 1; i0 <= n; ++i0) {
            std::set<Canonical> lib;
            const auto graphs = enumerate_star_graphs(g, labels(n), i0);
            for (const auto& gr : graphs) {
                lib.insert(canonical(gr));
            }
            CHECK_MESSAGE(lib.size() == graphs.size(), "duplicates at g=" << g << " n=" << n);
            CHECK_MESSAGE(lib == brute_force(g, n, i0), "g=" << g << " n=" << n << " i0=" << i0);
        }
    }
}

TEST_CASE("invariants of enumerated graphs") {
    for (auto [g, n] : std::vector<std::pair<int, int>>{{0, 5}, {1, 3}, {2, 2}, {3, 2}}) {
        for (const auto& gr : enumerate_star_graphs(g, labels(n), 1)) {
            int euler = gr.vertex_euler(-1);
            int genus = gr.central_genus + gr.h1();
            std::vector<int> all = gr.central_legs;
            for (int j = 0; j < gr.ell(); ++j) {
                euler += gr.vertex_euler(j);
                genus += gr.outer[static_cast<std::size_t>(j)].genus;
                CHECK(gr.vertex_euler(j) > 0);
                CHECK(gr.vertex_euler(j) < 2 * g - 2 + n);
                all.insert(all.end(), gr.outer[static_cast<std::size_t>(j)].legs.begin(),
                           gr.outer[static_cast<std::size_t>(j)].legs.end());
            }
            CHECK(euler == 2 * g - 2 + n);
            CHECK(genus == g);
            CHECK(gr.vertex_euler(-1) >= 1);
            std::sort(all.begin(), all.end());
            CHECK(all == labels(n));
            CHECK(std::binary_search(gr.central_legs.begin(), gr.central_legs.end(), 1));
            CHECK(gr.symmetry_weight() * Rational(automorphism_count(gr)) == R(1));
        }
    }
}

TEST_CASE("relabeling invariance") {
    const int g = 1;
    const int n = 4;
    std::set<Canonical> base;
    for (const auto& gr : enumerate_star_graphs(g, labels(n), 1)) {
        base.insert(canonical(gr));
    }
    std::vector<int> perm{2, 3, 4};
    do {
        std::set<Canonical> moved;
        for (const auto& gr : enumerate_star_graphs(g, labels(n), 1)) {
            StarGraph h = gr;
            for (auto& v : h.outer) {
                for (auto& leg : v.legs) {
                    leg = perm[static_cast<std::size_t>(leg - 2)];
                }
                std::sort(v.legs.begin(), v.legs.end());
            }
            for (auto& leg : h.central_legs) {
                if (leg != 1) {
                    leg = perm[static_cast<std::size_t>(leg - 2)];
                }
            }
            moved.insert(canonical(h));
        }
        CHECK(moved == base);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("enumeration errors and cache") {
    CHECK_THROWS_AS(enumerate_star_graphs(0, labels(2), 1), InputError);
    CHECK_THROWS_AS(enumerate_star_graphs(1, {}, 1), InputError);
    CHECK_THROWS_AS(enumerate_star_graphs(1, labels(2), 5), InputError);
    const auto& a = star_graphs_on_slots(2, 3, 1);
    const auto& b = star_graphs_on_slots(2, 3, 1);
    CHECK(&a == &b);
    CHECK(a.size() == enumerate_star_graphs(2, {0, 1, 2}, 1).size());
}

TEST_CASE("genus-7 example graph") {
    const StarGraph ex = genus7_example();
    const auto graphs = enumerate_star_graphs(7, labels(3), 1);
    CHECK(std::find(graphs.begin(), graphs.end(), ex) != graphs.end());
    CHECK(ex.vertex_euler(-1) + ex.vertex_euler(0) + ex.vertex_euler(1) == 15);
    for (long a2 = 1; a2 <= 29; a2 += 2) {
        for (long a3 = 1; a3 <= 19; a3 += 2) {
            const Rational al2(a2, 4);
            const Rational al3(a3, 4);
            const Rational al1 = R(15) - al2 - al3;
            if (al1.sign() <= 0) {
                continue;
            }
            const auto dom = domain_of(ex, WeightVector(7, {al1, al2, al3}));
            CHECK(dom.empty == (al2 > R(7) || al3 > R(4)));
            CHECK(dom.dimension == 1);
        }
    }
}

TEST_CASE("domain levels") {
    StarGraph gr;
    gr.genus = 0;
    gr.central_genus = 0;
    gr.i0 = 1;
    gr.central_legs = {1, 4};
    gr.outer = {OuterVertex{0, 1, {2, 3}}};
    const auto dom = domain_of(gr, WeightVector(0, {R(1, 5), R(3, 5), R(3, 5), R(3, 5)}));
    REQUIRE(dom.levels.size() == 1);
    CHECK(dom.levels[0] == R(-1, 5));
    CHECK(dom.empty);
    CHECK(dom.dimension == 0);
    const auto ok = domain_of(gr, WeightVector(0, {R(7, 5), R(1, 5), R(1, 5), R(1, 5)}));
    CHECK(!ok.empty);
    CHECK(ok.levels[0] == R(3, 5));
    // The single-edge domain is the single point beta = c.
    const auto tw = enumerate_k_twists(gr, WeightVector(0, {R(7, 5), R(1, 5), R(1, 5), R(1, 5)}), 5);
    REQUIRE(tw.size() == 1);
    CHECK(tw[0].beta[0][0] == R(3, 5));
}

TEST_CASE("k-twists") {
    StarGraph gr;
    gr.genus = 1;
    gr.central_genus = 0;
    gr.i0 = 2;
    gr.central_legs = {2};
    gr.outer = {OuterVertex{0, 2, {1}}};
    const auto t4 = enumerate_k_twists(gr, WeightVector(1, {R(1, 2), R(3, 2)}), 4);
    REQUIRE(t4.size() == 1);
    CHECK(t4[0].beta[0] == std::vector<Rational>{R(1, 4), R(1, 4)});
    CHECK(t4[0].multiplicity() == R(1, 16));
    for (long num = 1; num <= 9; ++num) {
        const Rational a1(num, 10);
        const auto tw = enumerate_k_twists(gr, WeightVector(1, {a1, R(2) - a1}), 10);
        const Rational c = R(1) - a1;
        CHECK(static_cast<long>(tw.size()) == (c * R(10)).ceil().get_si() - 1);
        for (const auto& t : tw) {
            CHECK(t.beta[0][0] + t.beta[0][1] == c);
            CHECK(t.beta[0][0].sign() > 0);
            CHECK(t.beta[0][1].sign() > 0);
        }
    }
    CHECK(enumerate_k_twists(gr, WeightVector(1, {R(3, 2), R(1, 2)}), 2).empty());
    CHECK_THROWS_AS(enumerate_k_twists(gr, WeightVector(1, {R(1, 3), R(5, 3)}), 4), InputError);
    CHECK_THROWS_AS(enumerate_k_twists(gr, WeightVector(1, {R(1, 2), R(3, 2)}), 0), InputError);
    // Trivial graph: one empty twist.
    StarGraph triv;
    triv.genus = 1;
    triv.central_genus = 1;
    triv.i0 = 1;
    triv.central_legs = {1, 2};
    CHECK(enumerate_k_twists(triv, WeightVector(1, {R(1, 2), R(3, 2)}), 2).size() == 1);
}

TEST_CASE("flatten examples") {
    const ConventionFlags conv;
    StarGraph triv;
    triv.genus = 0;
    triv.central_genus = 0;
    triv.i0 = 1;
    triv.central_legs = {1, 2, 3};
    const auto t03 = flatten(triv, WeightVector(0, {R(1, 3), R(1, 3), R(1, 3)}), conv);
    REQUIRE(t03.size() == 1);
    CHECK(t03[0].integrand == MultiPoly(1));
    CHECK(t03[0].domain.variables().empty());
    CHECK(t03[0].depth == 0);

    StarGraph g04;
    g04.genus = 0;
    g04.central_genus = 0;
    g04.i0 = 1;
    g04.central_legs = {1, 4};
    g04.outer = {OuterVertex{0, 1, {2, 3}}};
    const auto t04 = flatten(g04, WeightVector(0, {R(7, 5), R(1, 5), R(1, 5), R(1, 5)}), conv);
    REQUIRE(t04.size() == 1);
    CHECK(t04[0].depth == 1);
    CHECK(t04[0].domain.variables().size() == 1);
    CHECK(t04[0].domain.dimension() == 0);
    // Empty at the example point: pruned.
    CHECK(flatten(g04, WeightVector(0, {R(1, 5), R(3, 5), R(3, 5), R(3, 5)}), conv).empty());

    StarGraph g12;
    g12.genus = 1;
    g12.central_genus = 0;
    g12.i0 = 2;
    g12.central_legs = {2};
    g12.outer = {OuterVertex{0, 2, {1}}};
    const auto t12 = flatten(g12, WeightVector(1, {R(1, 2), R(3, 2)}), conv);
    REQUIRE(t12.size() == 1);
    const auto vars = t12[0].domain.variables();
    REQUIRE(vars.size() == 2);
    CHECK(t12[0].integrand ==
          MultiPoly::variable(vars[0]) * MultiPoly::variable(vars[1]) * R(1, 2));
    REQUIRE(t12[0].domain.blocks().size() == 1);
    CHECK(t12[0].domain.blocks()[0].level == AffineExpr(R(1, 2)));
    CHECK(t12[0].depth == 1);
    CHECK(t12[0].variable_names.size() == 2);
}

TEST_CASE("flatten depth and degree bounds") {
    const ConventionFlags conv;
    const WeightVector alpha(2, {R(5, 7), R(23, 7)});
    for (const auto& gr : enumerate_star_graphs(2, labels(2), 1)) {
        for (const auto& t : flatten(gr, alpha, conv)) {
            CHECK(t.depth <= 2 * 2 - 2 + 2);
            const auto vars = t.domain.variables();
            for (VarId v : t.integrand.variables()) {
                CHECK(std::find(vars.begin(), vars.end(), v) != vars.end());
            }
        }
    }
}

TEST_CASE("pruning soundness by lattice search") {
    const long k = 12;
    struct Case {
        int g;
        std::vector<Rational> alpha;
    };
    const std::vector<Case> cases{
        {0, {R(5, 12), R(7, 12), R(11, 12), R(1, 12)}},
        {0, {R(1, 12), R(1, 12), R(1, 12), R(21, 12)}},
        {0, {R(5, 12), R(5, 12), R(7, 12), R(7, 12), R(12, 12)}},
        {1, {R(5, 12), R(19, 12)}},
        {1, {R(1, 12), R(23, 12)}},
        {1, {R(5, 12), R(7, 12), R(24, 12)}},
        {1, {R(1, 12), R(1, 12), R(34, 12)}},
        {2, {R(7, 12), R(41, 12)}},
        {2, {R(1, 12), R(47, 12)}},
    };
    for (const auto& c : cases) {
        const WeightVector alpha(c.g, c.alpha);
        std::vector<Slot> slots;
        for (const auto& a : c.alpha) {
            slots.push_back(Slot{a, true});
        }
        const int n = static_cast<int>(c.alpha.size());
        long lib = 0;
        for (const auto& root : enumerate_star_graphs(c.g, labels(n), 1)) {
            for (const auto& t : flatten(root, alpha, ConventionFlags{})) {
                lib += static_cast<long>(lattice_count(parametrize(t.domain).system, k));
            }
        }
        CHECK_MESSAGE(lib == nested_count(c.g, slots, 0, k), "alpha = " << alpha.str());
    }
}
