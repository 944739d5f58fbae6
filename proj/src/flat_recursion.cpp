#include "flatvol/flat_recursion.hpp"

#include "flatvol/errors.hpp"
#include "flatvol/parallel.hpp"
#include "flatvol/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

namespace flatvol {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("FLATVOL_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) {
            return static_cast<unsigned>(n);
        }
    }
    return 1;
}

namespace {

using CacheKey = std::pair<int, std::vector<Rational>>;

std::mutex cache_mutex;
std::map<CacheKey, Rational> value_cache;

}  // namespace

FlatValue eval_v(const WeightVector& alpha, int i0, ConventionFlags conv,
                 const EvalOptions& options) {
    if (!alpha.is_positive()) {
        throw InputError("alpha entries must be positive: " + alpha.str());
    }
    const int n = static_cast<int>(alpha.n());
    if (i0 < 1 || i0 > n) {
        throw InputError("i0 = " + std::to_string(i0) + " is not a marking in 1.." +
                         std::to_string(n));
    }
    FlatValue out{alpha, i0, conv, Rational(0), {}, std::nullopt};

    const bool cached = options.use_cache && conv.is_validated();
    CacheKey key;
    if (cached) {
        key.first = alpha.genus();
        key.second = alpha.entries();
        std::sort(key.second.begin(), key.second.end());
        std::lock_guard lock(cache_mutex);
        if (auto it = value_cache.find(key); it != value_cache.end()) {
            out.value = it->second;
            if (options.with_volhat && !alpha.has_integral_entry()) {
                out.volhat = volhat_from_v(alpha, out.value);
            }
            return out;
        }
    }

    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 1);
    std::vector<StarTree> trees;
    for (const auto& graph : enumerate_star_graphs(alpha.genus(), labels, i0)) {
        auto part = flatten(graph, alpha, conv, options.policy);
        std::move(part.begin(), part.end(), std::back_inserter(trees));
    }
    std::vector<Rational> values(trees.size());
    parallel_for(trees.size(), resolve_threads(options.threads), [&](std::size_t t) {
        values[t] = integrate(trees[t].integrand, trees[t].domain);
    });
    for (std::size_t t = 0; t < trees.size(); ++t) {
        out.value += values[t];
        if (options.keep_terms) {
            out.terms.push_back({trees[t].id, values[t]});
        }
    }
    if (cached) {
        std::lock_guard lock(cache_mutex);
        value_cache.try_emplace(key, out.value);
    }
    if (options.with_volhat && !alpha.has_integral_entry()) {
        out.volhat = volhat_from_v(alpha, out.value);
    }
    return out;
}

Rational genus0_n4_oracle(const WeightVector& alpha) {
    if (alpha.genus() != 0 || alpha.n() != 4) {
        throw InputError("genus-0 oracle needs (g, n) = (0, 4), got (" +
                         std::to_string(alpha.genus()) + ", " + std::to_string(alpha.n()) + ")");
    }
    const Rational& a1 = alpha.at(1);
    Rational v = -a1;
    for (std::size_t m = 2; m <= 4; ++m) {
        const Rational hinge = a1 + alpha.at(m) - Rational(1);
        if (hinge.sign() > 0) {
            v += hinge;
        }
    }
    return v;
}

double volhat_from_v(const WeightVector& alpha, const Rational& v) {
    if (alpha.has_integral_entry()) {
        throw WallPointError("volhat is undefined at the wall point " + alpha.str());
    }
    const int chi = alpha.euler();
    const double scale = std::pow(2.0 * std::numbers::pi, chi) /
                         factorial(static_cast<unsigned>(chi)).to_double();
    return scale / q_factor(alpha) * v.to_double();
}

double volhat(const WeightVector& alpha, ConventionFlags conv, const EvalOptions& options) {
    if (alpha.has_integral_entry()) {
        throw WallPointError("volhat is undefined at the wall point " + alpha.str());
    }
    return volhat_from_v(alpha, eval_v(alpha, 1, conv, options).value);
}

ScanSpec default_scan(int genus, int n, int steps) {
    if (n < 2) {
        throw InputError("scan needs n >= 2");
    }
    if (steps < 1) {
        throw InputError("scan needs steps >= 1");
    }
    const int chi = 2 * genus - 2 + n;
    if (chi <= 0) {
        throw InputError("unstable (g, n) = (" + std::to_string(genus) + ", " + std::to_string(n) +
                         ")");
    }
    ScanSpec spec;
    spec.genus = genus;
    spec.steps = steps;
    spec.base.assign(static_cast<std::size_t>(n), Rational(chi, n - 1));
    spec.base[0] = Rational(0);
    spec.direction.assign(static_cast<std::size_t>(n), Rational(-1, n - 1));
    spec.direction[0] = Rational(1);
    spec.t0 = Rational(0);
    spec.t1 = Rational(chi);
    return spec;
}

std::vector<ScanRow> scan(const ScanSpec& spec, ConventionFlags conv, const EvalOptions& options) {
    if (spec.base.size() != spec.direction.size()) {
        throw InputError("scan base and direction differ in length");
    }
    if (spec.steps < 1) {
        throw InputError("scan needs steps >= 1");
    }
    Rational drift;
    for (const auto& d : spec.direction) {
        drift += d;
    }
    if (!drift.is_zero()) {
        throw InputError("scan direction must sum to 0");
    }
    std::vector<ScanRow> rows(static_cast<std::size_t>(spec.steps) + 1);
    for (int i = 0; i <= spec.steps; ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        row.t = spec.t0 + (spec.t1 - spec.t0) * Rational(i, spec.steps);
        for (std::size_t m = 0; m < spec.base.size(); ++m) {
            row.alpha.push_back(spec.base[m] + row.t * spec.direction[m]);
        }
    }
    EvalOptions inner = options;
    inner.threads = 1;
    inner.keep_terms = false;
    inner.with_volhat = false;
    parallel_for(rows.size(), resolve_threads(options.threads), [&](std::size_t r) {
        auto& row = rows[r];
        try {
            const WeightVector alpha(spec.genus, row.alpha);
            if (!alpha.is_positive()) {
                row.flag = "outside";
                return;
            }
            // Wall codimension: min(#integral entries, n - 1).
            const auto integral = std::count_if(row.alpha.begin(), row.alpha.end(),
                                                [](const Rational& a) { return a.is_integer(); });
            const auto codim = std::min<std::ptrdiff_t>(
                integral, static_cast<std::ptrdiff_t>(row.alpha.size()) - 1);
            row.v = eval_v(alpha, 1, conv, inner).value;
            if (codim == 0) {
                row.volhat = volhat_from_v(alpha, *row.v);
                row.flag = "ok";
            } else {
                row.flag = codim == 1 ? "wall" : "multiwall";
            }
        } catch (const std::exception& e) {
            row.flag = std::string("error:") + e.what();
        }
    });
    return rows;
}

std::vector<RiemannRow> riemann_diagnostic(const WeightVector& alpha, int i0,
                                           const std::vector<long>& ks) {
    std::vector<int> labels(alpha.n());
    std::iota(labels.begin(), labels.end(), 1);
    std::vector<RiemannRow> rows;
    for (const auto& graph : enumerate_star_graphs(alpha.genus(), labels, i0)) {
        const DomainLevels dom = domain_of(graph, alpha);
        CascadePolytope polytope;
        MultiPoly f(Rational(1));
        VarId next = 0;
        for (int j = 0; j < graph.ell(); ++j) {
            CascadeBlock block;
            block.level = AffineExpr(dom.levels[static_cast<std::size_t>(j)]);
            for (int e = 0; e < graph.outer[static_cast<std::size_t>(j)].edges; ++e) {
                block.vars.push_back(next);
                f *= MultiPoly::variable(next);
                ++next;
            }
            polytope.add_block(std::move(block));
        }
        const Rational exact = integrate(f, polytope);
        for (long k : ks) {
            RiemannRow row;
            row.graph = graph.encode();
            row.k = k;
            row.dimension = dom.dimension;
            row.exact = exact;
            const auto twists = enumerate_k_twists(graph, alpha, k);
            row.points = twists.size();
            for (const auto& t : twists) {
                row.lattice += t.multiplicity();
            }
            row.lattice /= pow(Rational(k), static_cast<unsigned>(dom.dimension));
            if (exact.is_zero()) {
                row.rel_error = row.lattice.is_zero() ? 0.0 : std::abs(row.lattice.to_double());
            } else {
                row.rel_error = std::abs(((row.lattice - exact) / exact).to_double());
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace flatvol
