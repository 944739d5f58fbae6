#include "flatvol/stargraph.hpp"

#include "flatvol/errors.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace flatvol {

// ---------------------------------------------------------------------------
// StarGraph

int StarGraph::e0() const {
    int e = 0;
    for (const auto& v : outer) {
        e += v.edges;
    }
    return e;
}

int StarGraph::vertex_euler(int j) const {
    if (j < 0) {
        return 2 * central_genus - 2 + n0() + e0();
    }
    const auto& v = outer.at(static_cast<std::size_t>(j));
    return 2 * v.genus - 2 + static_cast<int>(v.legs.size()) + v.edges;
}

long StarGraph::orderings() const {
    // l! / prod m_k! over runs of identical (consecutive, canonical) descriptors.
    long total = 1;
    long run = 0;
    for (std::size_t j = 0; j < outer.size(); ++j) {
        run = (j > 0 && outer[j] == outer[j - 1]) ? run + 1 : 1;
        total = total * static_cast<long>(j + 1) / run;
    }
    return total;
}

Rational StarGraph::symmetry_weight() const {
    Rational w = Rational(orderings()) / factorial(static_cast<unsigned>(ell()));
    for (const auto& v : outer) {
        w /= factorial(static_cast<unsigned>(v.edges));
    }
    return w;
}

namespace {

std::string legs_str(const std::vector<int>& legs) {
    std::string s = "[";
    for (std::size_t i = 0; i < legs.size(); ++i) {
        if (i != 0) {
            s += ",";
        }
        s += std::to_string(legs[i]);
    }
    return s + "]";
}

}  // namespace

std::string StarGraph::encode() const {
    std::string s = std::to_string(central_genus) + legs_str(central_legs);
    if (!outer.empty()) {
        s += " --";
        for (const auto& v : outer) {
            s += " (" + std::to_string(v.genus) + "," + std::to_string(v.edges) + ")" +
                 legs_str(v.legs);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

struct Enumerator {
    int genus;
    int i0;
    std::vector<StarGraph> out;

    void record(const std::vector<OuterVertex>& outer, const std::vector<int>& remaining) {
        int used = 0;
        for (const auto& v : outer) {
            used += v.genus + v.edges - 1;
        }
        const int g0 = genus - used;
        if (g0 < 0) {
            return;
        }
        StarGraph gr;
        gr.genus = genus;
        gr.central_genus = g0;
        gr.i0 = i0;
        gr.central_legs = remaining;
        gr.central_legs.push_back(i0);
        std::sort(gr.central_legs.begin(), gr.central_legs.end());
        gr.outer = outer;
        if (gr.vertex_euler(-1) <= 0) {
            return;
        }
        out.push_back(std::move(gr));
    }

    void extend(std::vector<OuterVertex>& outer, const std::vector<int>& remaining, int budget) {
        record(outer, remaining);
        const std::size_t r = remaining.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << r); ++mask) {
            std::vector<int> legs;
            std::vector<int> rest;
            for (std::size_t b = 0; b < r; ++b) {
                ((mask >> b) & 1U ? legs : rest).push_back(remaining[b]);
            }
            for (int g = 0; g <= budget; ++g) {
                for (int e = 1; g + e - 1 <= budget; ++e) {
                    OuterVertex v{g, e, legs};
                    if (2 * g - 2 + static_cast<int>(legs.size()) + e <= 0) {
                        continue;
                    }
                    if (!outer.empty() && v < outer.back()) {
                        continue;
                    }
                    outer.push_back(v);
                    extend(outer, rest, budget - (g + e - 1));
                    outer.pop_back();
                }
            }
        }
    }
};

}  // namespace

std::vector<StarGraph> enumerate_star_graphs(int genus, const std::vector<int>& markings, int i0) {
    const int n = static_cast<int>(markings.size());
    if (genus < 0 || 2 * genus - 2 + n <= 0) {
        throw InputError("unstable (g, n) = (" + std::to_string(genus) + ", " + std::to_string(n) +
                         ")");
    }
    if (std::find(markings.begin(), markings.end(), i0) == markings.end()) {
        throw InputError("i0 = " + std::to_string(i0) + " is not a marking");
    }
    std::vector<int> remaining;
    for (int m : markings) {
        if (m != i0) {
            remaining.push_back(m);
        }
    }
    std::sort(remaining.begin(), remaining.end());
    Enumerator en{genus, i0, {}};
    std::vector<OuterVertex> outer;
    en.extend(outer, remaining, genus);
    return std::move(en.out);
}

const std::vector<StarGraph>& star_graphs_on_slots(int genus, int n, int i0) {
    using Key = std::tuple<int, int, int>;
    static std::mutex mutex;
    static std::map<Key, std::vector<StarGraph>> cache;
    const Key key{genus, n, i0};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 0);
    auto graphs = enumerate_star_graphs(genus, labels, i0);
    std::lock_guard lock(mutex);
    return cache.try_emplace(key, std::move(graphs)).first->second;
}

long automorphism_count(const StarGraph& graph) {
    std::vector<std::size_t> perm(graph.outer.size());
    std::iota(perm.begin(), perm.end(), 0);
    long edge_perms = 1;
    for (const auto& v : graph.outer) {
        for (int k = 2; k <= v.edges; ++k) {
            edge_perms *= k;
        }
    }
    long count = 0;
    do {
        bool ok = true;
        for (std::size_t j = 0; j < perm.size() && ok; ++j) {
            ok = graph.outer[j] == graph.outer[perm[j]];
        }
        if (ok) {
            count += edge_perms;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

// ---------------------------------------------------------------------------
// Domains and twists

DomainLevels domain_of(const StarGraph& graph, const WeightVector& alpha) {
    DomainLevels d;
    d.dimension = graph.h1();
    for (int j = 0; j < graph.ell(); ++j) {
        Rational c(graph.vertex_euler(j));
        for (int leg : graph.outer[static_cast<std::size_t>(j)].legs) {
            c -= alpha.at(static_cast<std::size_t>(leg));
        }
        if (c.sign() <= 0) {
            d.empty = true;
        }
        d.levels.push_back(c);
    }
    return d;
}

Rational Twist::multiplicity() const {
    Rational m(1);
    for (const auto& block : beta) {
        for (const auto& b : block) {
            m *= b;
        }
    }
    return m;
}

namespace {

// Compositions of `total` into `parts` positive integers.
void compositions(long total, int parts, std::vector<long>& cur, std::vector<std::vector<long>>& out) {
    if (parts == 1) {
        if (total >= 1) {
            cur.push_back(total);
            out.push_back(cur);
            cur.pop_back();
        }
        return;
    }
    for (long first = 1; first <= total - (parts - 1); ++first) {
        cur.push_back(first);
        compositions(total - first, parts - 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Twist> enumerate_k_twists(const StarGraph& graph, const WeightVector& alpha, long k) {
    if (k <= 0) {
        throw InputError("k must be positive");
    }
    for (const auto& a : alpha.entries()) {
        if (!(a * Rational(k)).is_integer()) {
            throw InputError("k*alpha is not integral for k = " + std::to_string(k));
        }
    }
    const DomainLevels dom = domain_of(graph, alpha);
    std::vector<Twist> twists{Twist{}};
    for (int j = 0; j < graph.ell(); ++j) {
        const Rational scaled = dom.levels[static_cast<std::size_t>(j)] * Rational(k);
        std::vector<std::vector<long>> parts;
        std::vector<long> cur;
        if (scaled.sign() > 0) {
            compositions(scaled.numerator().get_si(), graph.outer[static_cast<std::size_t>(j)].edges,
                         cur, parts);
        }
        std::vector<Twist> next;
        for (const auto& t : twists) {
            for (const auto& p : parts) {
                Twist u = t;
                std::vector<Rational> block;
                for (long x : p) {
                    block.emplace_back(x, k);
                }
                u.beta.push_back(std::move(block));
                next.push_back(std::move(u));
            }
        }
        twists = std::move(next);
    }
    return twists;
}

// ---------------------------------------------------------------------------
// Flattening

namespace {

struct Partial {
    MultiPoly integrand;
    std::vector<CascadeBlock> blocks;
    std::string id;
    int depth = 0;
};

// An affine level that is <= 0 at every point with positive variables.
bool structurally_nonpositive(const AffineExpr& level) {
    if (level.constant().sign() > 0) {
        return false;
    }
    for (const auto& [v, c] : level.linear()) {
        if (c.sign() > 0) {
            return false;
        }
    }
    return true;
}

class Flattener {
public:
    Flattener(ConventionFlags conv, I0Policy policy) : conv_(conv), policy_(policy) {}

    std::vector<Partial> expand_graph(const StarGraph& gr, const std::map<int, AffineExpr>& slot_of,
                                      const std::string& path) {
        const int ell = gr.ell();
        std::vector<std::vector<VarId>> edge_vars(static_cast<std::size_t>(ell));
        std::vector<CascadeBlock> blocks;
        MultiPoly edge_product(Rational(1));
        for (int j = 0; j < ell; ++j) {
            const auto& v = gr.outer[static_cast<std::size_t>(j)];
            AffineExpr level(Rational(gr.vertex_euler(j)));
            for (int leg : v.legs) {
                level -= slot_of.at(leg);
            }
            if (structurally_nonpositive(level)) {
                return {};
            }
            CascadeBlock block;
            for (int i = 0; i < v.edges; ++i) {
                const VarId id = next_var_++;
                names_[id] = "b" + path + "." + std::to_string(j + 1) + "." + std::to_string(i + 1);
                edge_vars[static_cast<std::size_t>(j)].push_back(id);
                block.vars.push_back(id);
                edge_product *= MultiPoly::variable(id);
            }
            block.level = std::move(level);
            blocks.push_back(std::move(block));
        }

        // Central kernel on slots (alpha_{L0}, -beta).
        std::map<VarId, AffineExpr> images;
        std::size_t i0_pos = 0;
        VarId slot = 0;
        for (int leg : gr.central_legs) {
            if (leg == gr.i0) {
                i0_pos = slot;
            }
            images[slot++] = slot_of.at(leg);
        }
        for (const auto& vars : edge_vars) {
            for (VarId v : vars) {
                images[slot++] = AffineExpr::variable(v, Rational(-1));
            }
        }
        MultiPoly base =
            generic_kernel(gr.central_genus, images.size(), i0_pos, conv_).compose_affine(images);
        if (conv_.term_sign == TermSign::prefactor) {
            base *= pow(-slot_of.at(gr.i0).to_poly(), static_cast<unsigned>(gr.j0()));
        } else if (ell % 2 == 1) {
            base *= Rational(-1);
        }
        base *= gr.symmetry_weight();
        base *= edge_product;

        std::vector<Partial> combos{Partial{std::move(base), std::move(blocks), gr.encode(), 0}};
        for (int j = 0; j < ell; ++j) {
            const auto& v = gr.outer[static_cast<std::size_t>(j)];
            std::vector<AffineExpr> child_slots;
            for (int leg : v.legs) {
                child_slots.push_back(slot_of.at(leg));
            }
            for (VarId id : edge_vars[static_cast<std::size_t>(j)]) {
                child_slots.push_back(AffineExpr::variable(id));
            }
            const std::string child_path = path + "." + std::to_string(j + 1);
            std::vector<Partial> children =
                expand_node(v.genus, child_slots, choose_i0(child_slots, v.legs.size()), child_path);
            std::vector<Partial> next;
            next.reserve(combos.size() * children.size());
            for (const auto& c : combos) {
                for (const auto& ch : children) {
                    Partial p;
                    p.integrand = c.integrand * ch.integrand;
                    p.blocks = c.blocks;
                    p.blocks.insert(p.blocks.end(), ch.blocks.begin(), ch.blocks.end());
                    p.id = c.id + " {" + std::to_string(j + 1) + ":" + ch.id + "}";
                    p.depth = std::max(c.depth, ch.depth + 1);
                    next.push_back(std::move(p));
                }
            }
            combos = std::move(next);
        }
        return combos;
    }

    std::vector<Partial> expand_node(int genus, const std::vector<AffineExpr>& slots, int i0,
                                     const std::string& path) {
        const int n = static_cast<int>(slots.size());
        if (genus == 0 && n == 3) {
            return {Partial{MultiPoly(Rational(1)), {}, "0[0,1,2]", 0}};
        }
        std::map<int, AffineExpr> slot_of;
        for (int k = 0; k < n; ++k) {
            slot_of[k] = slots[static_cast<std::size_t>(k)];
        }
        std::vector<Partial> out;
        for (const auto& gr : star_graphs_on_slots(genus, n, i0)) {
            auto parts = expand_graph(gr, slot_of, path);
            std::move(parts.begin(), parts.end(), std::back_inserter(out));
        }
        return out;
    }

    const std::map<VarId, std::string>& names() const { return names_; }

private:
    int choose_i0(const std::vector<AffineExpr>& slots, std::size_t legs) const {
        const int n = static_cast<int>(slots.size());
        switch (policy_) {
            case I0Policy::prefer_fixed_first:
                for (int k = 0; k < n; ++k) {
                    if (slots[static_cast<std::size_t>(k)].is_constant()) {
                        return k;
                    }
                }
                return static_cast<int>(legs);
            case I0Policy::prefer_fixed_last:
                for (int k = n - 1; k >= 0; --k) {
                    if (slots[static_cast<std::size_t>(k)].is_constant()) {
                        return k;
                    }
                }
                return n - 1;
            case I0Policy::first_edge:
                return static_cast<int>(legs);
        }
        return 0;
    }

    ConventionFlags conv_;
    I0Policy policy_;
    VarId next_var_ = 0;
    std::map<VarId, std::string> names_;
};

}  // namespace

std::vector<StarTree> flatten(const StarGraph& root, const WeightVector& alpha,
                              ConventionFlags conv, I0Policy policy) {
    std::map<int, AffineExpr> slot_of;
    for (std::size_t label = 1; label <= alpha.n(); ++label) {
        slot_of[static_cast<int>(label)] = AffineExpr(alpha.at(label));
    }
    for (int leg : root.central_legs) {
        if (!slot_of.contains(leg)) {
            throw InputError("graph marking " + std::to_string(leg) + " outside alpha");
        }
    }
    Flattener fl(conv, policy);
    std::vector<StarTree> trees;
    for (auto& p : fl.expand_graph(root, slot_of, "")) {
        StarTree t;
        t.id = std::move(p.id);
        t.root = root;
        t.integrand = std::move(p.integrand);
        t.domain = CascadePolytope(std::move(p.blocks));
        t.depth = p.depth;
        for (VarId v : t.domain.variables()) {
            t.variable_names[v] = fl.names().at(v);
        }
        trees.push_back(std::move(t));
    }
    return trees;
}

}  // namespace flatvol
