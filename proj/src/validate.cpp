#include "flatvol/validate.hpp"

#include "flatvol/flat_recursion.hpp"
#include "flatvol/polytope.hpp"
#include "flatvol/sampling.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace flatvol {

bool ConventionRow::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::vector<std::string> ConventionRow::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
        if (!c.pass) {
            out.push_back(c.name);
        }
    }
    return out;
}

const ConventionRow* ValidationReport::row(ConventionFlags conv) const {
    for (const auto& r : rows) {
        if (r.convention == conv) {
            return &r;
        }
    }
    return nullptr;
}

bool ValidationReport::gate() const {
    bool default_seen = false;
    for (const auto& r : rows) {
        if (r.convention.is_validated()) {
            default_seen = true;
            if (!r.all_pass()) {
                return false;
            }
        } else if (r.all_pass()) {
            return false;
        }
    }
    return default_seen;
}

std::string ValidationReport::text() const {
    std::ostringstream os;
    if (rows.empty()) {
        return "no rows\n";
    }
    os << std::left << std::setw(26) << "check";
    for (const auto& r : rows) {
        os << std::setw(20) << (r.convention.s_exponent_name() + "/" + r.convention.term_sign_name());
    }
    os << "\n";
    for (std::size_t c = 0; c < rows.front().checks.size(); ++c) {
        const auto& head = rows.front().checks[c];
        os << std::setw(26) << ("[" + std::to_string(head.criterion) + "] " + head.name);
        for (const auto& r : rows) {
            os << std::setw(20) << (r.checks[c].pass ? "pass" : "FAIL");
        }
        os << "\n";
    }
    os << "\n";
    for (const auto& r : rows) {
        for (const auto& c : r.checks) {
            if (!c.pass) {
                os << r.convention.str() << "  " << c.name << ": " << c.detail << "\n";
            }
        }
    }
    os << "gate: " << (gate() ? "PASS" : "FAIL")
       << " (validated convention passes everything, every other member fails a check)\n";
    return os.str();
}

namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(int criterion, std::string name,
                  const std::function<std::string(bool&)>& body) {
    CheckResult r;
    r.criterion = criterion;
    r.name = std::move(name);
    const auto start = Clock::now();
    bool pass = true;
    try {
        r.detail = body(pass);
    } catch (const std::exception& e) {
        pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.pass = pass;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

EvalOptions quiet(I0Policy policy = I0Policy::prefer_fixed_first) {
    EvalOptions o;
    o.keep_terms = false;
    o.threads = 1;
    o.policy = policy;
    return o;
}

Rational v_of(const WeightVector& a, int i0, ConventionFlags conv,
              I0Policy policy = I0Policy::prefer_fixed_first) {
    return eval_v(a, i0, conv, quiet(policy)).value;
}

WeightVector permuted(const WeightVector& a, const std::vector<int>& perm) {
    std::vector<Rational> e(a.n());
    for (std::size_t i = 0; i < a.n(); ++i) {
        e[static_cast<std::size_t>(perm[i])] = a.entries()[i];
    }
    return WeightVector(a.genus(), std::move(e));
}

const std::vector<std::pair<int, int>> kInvarianceCases{{0, 4}, {0, 5}, {1, 2}, {1, 3}};

std::string mismatch(const WeightVector& a, const std::string& what, const Rational& x,
                     const Rational& y) {
    return what + " at " + a.str() + ": " + x.str() + " vs " + y.str();
}

}  // namespace

CheckResult check_base_case(ConventionFlags conv, std::uint64_t seed) {
    return timed(1, "base-case", [&](bool& pass) -> std::string {
        Rng rng(seed);
        for (int s = 0; s < 10; ++s) {
            const auto a = random_point(rng, 0, 3);
            const int i0 = 1 + s % 3;
            const Rational v = v_of(a, i0, conv);
            if (v != Rational(1)) {
                pass = false;
                return mismatch(a, "v", v, Rational(1));
            }
        }
        return "10 points";
    });
}

CheckResult check_genus0_oracle(ConventionFlags conv, std::uint64_t seed) {
    return timed(2, "genus0-oracle", [&](bool& pass) -> std::string {
        Rng rng(seed);
        for (int s = 0; s < 50; ++s) {
            const auto a = random_point(rng, 0, 4);
            const Rational ref = genus0_n4_oracle(a);
            std::vector<int> perm{0, 1, 2, 3};
            do {
                if (genus0_n4_oracle(permuted(a, perm)) != ref) {
                    pass = false;
                    return "oracle not symmetric at " + a.str();
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        std::vector<WeightVector> points{
            WeightVector(0, {Rational(9, 10), Rational(3, 10), Rational(1, 2), Rational(3, 10)}),
            WeightVector(0, {Rational(1), Rational(1, 3), Rational(1, 3), Rational(1, 3)}),
        };
        std::map<int, int> chamber_count;
        auto chamber = [](const WeightVector& a) {
            int c = 0;
            for (std::size_t m = 2; m <= 4; ++m) {
                c = 2 * c + (a.at(1) + a.at(m) > Rational(1) ? 1 : 0);
            }
            return c;
        };
        for (int attempt = 0; attempt < 20000; ++attempt) {
            if (chamber_count.size() == 8 && points.size() >= 24 &&
                std::all_of(chamber_count.begin(), chamber_count.end(),
                            [](const auto& kv) { return kv.second >= 2; })) {
                break;
            }
            const auto a = random_point(rng, 0, 4);
            const int c = chamber(a);
            if (chamber_count[c] < 3) {
                ++chamber_count[c];
                points.push_back(a);
            }
        }
        for (const auto& a : points) {
            const Rational v = v_of(a, 1, conv);
            const Rational ref = genus0_n4_oracle(a);
            if (v != ref) {
                pass = false;
                return mismatch(a, "v vs oracle", v, ref);
            }
        }
        return std::to_string(points.size()) + " points, " + std::to_string(chamber_count.size()) +
               " chambers";
    });
}

CheckResult check_i0_independence(ConventionFlags conv, std::uint64_t seed) {
    return timed(3, "i0-independence", [&](bool& pass) -> std::string {
        Rng rng(seed);
        int evaluations = 0;
        for (const auto& [g, n] : kInvarianceCases) {
            for (int s = 0; s < 10; ++s) {
                const auto a = random_point(rng, g, n);
                const Rational first = v_of(a, 1, conv);
                for (int i0 = 2; i0 <= n; ++i0) {
                    const Rational v = v_of(a, i0, conv);
                    ++evaluations;
                    if (v != first) {
                        pass = false;
                        return mismatch(a, "i0=1 vs i0=" + std::to_string(i0), first, v);
                    }
                }
            }
        }
        return std::to_string(evaluations) + " comparisons";
    });
}

CheckResult check_sn_invariance(ConventionFlags conv, std::uint64_t seed) {
    return timed(3, "sn-invariance", [&](bool& pass) -> std::string {
        Rng rng(seed);
        for (const auto& [g, n] : kInvarianceCases) {
            for (int s = 0; s < 10; ++s) {
                const auto a = random_point(rng, g, n);
                const auto perm = random_permutation(rng, n);
                const int i0 = 1 + s % n;
                const Rational v = v_of(a, i0, conv);
                const auto b = permuted(a, perm);
                const Rational w = v_of(b, perm[static_cast<std::size_t>(i0 - 1)] + 1, conv);
                if (v != w) {
                    pass = false;
                    return mismatch(a, "permuted", v, w);
                }
            }
        }
        return "40 permutations";
    });
}

CheckResult check_integral_vanishing(ConventionFlags conv, std::uint64_t seed) {
    return timed(3, "integral-vanishing", [&](bool& pass) -> std::string {
        Rng rng(seed);
        const std::array<I0Policy, 3> policies{I0Policy::prefer_fixed_first,
                                               I0Policy::prefer_fixed_last, I0Policy::first_edge};
        std::ostringstream detail;
        for (const auto& [g, n] : kInvarianceCases) {
            std::set<std::string> distinct;
            for (int s = 0; s < 5; ++s) {
                const auto a = random_integral_point(rng, g, n);
                distinct.insert(a.str());
                const int i0 = 1 + s % n;
                const Rational v = v_of(a, i0, conv, policies[static_cast<std::size_t>(s % 3)]);
                if (!v.is_zero()) {
                    pass = false;
                    return mismatch(a, "v", v, Rational(0));
                }
            }
            detail << "(" << g << "," << n << "): 5 evaluations, " << distinct.size()
                   << " distinct points; ";
        }
        return detail.str();
    });
}

CheckResult check_kernel_regression(ConventionFlags conv) {
    return timed(4, "kernel-regression", [&](bool& pass) -> std::string {
        const auto S = series_S(4);
        if (S.coeff(0) != Rational(1) || S.coeff(2) != Rational(1, 24) ||
            S.coeff(4) != Rational(1, 1920)) {
            pass = false;
            return "S(z) coefficients";
        }
        const std::vector<Rational> slots{Rational(2, 7), Rational(-3, 5), Rational(9, 4)};
        for (std::size_t i0 = 0; i0 < slots.size(); ++i0) {
            if (kernel_A_value(0, slots, i0, conv) != Rational(1)) {
                pass = false;
                return "genus-0 kernel is not 1";
            }
        }
        const Rational shift = conv.s_exponent == SExponent::printed ? Rational(2) : Rational(3);
        for (const auto& [a1, a2] : {std::pair{Rational(1, 3), Rational(5, 3)},
                                     std::pair{Rational(7, 5), Rational(-2, 9)}}) {
            const std::vector<Rational> w{a1, a2};
            const Rational expected = (Rational(2) * a1 + a2 * a2 - shift) / Rational(24);
            const Rational got = kernel_A_value(1, w, 0, conv);
            if (got != expected) {
                pass = false;
                return "g=1 kernel " + got.str() + " vs " + expected.str();
            }
        }
        const std::vector<Rational> wall{Rational(1), Rational(1)};
        const Rational at_wall = kernel_A_value(1, wall, 0, conv);
        if (!at_wall.is_zero()) {
            pass = false;
            return "g=1 kernel at (1,1) is " + at_wall.str() + ", not 0";
        }
        return "S coefficients, genus 0, genus 1, vanishing at (1,1)";
    });
}

CheckResult check_aab_identity() {
    return timed(5, "aab-identity", [&](bool& pass) -> std::string {
        const auto table = solve_aab(3);
        if (table.values.at(1) != Rational(-1, 24)) {
            pass = false;
            return "a_1 = " + table.values.at(1).str();
        }
        if (aab_generating_series(table).coeff(0) != Rational(1)) {
            pass = false;
            return "F(0) != 1";
        }
        for (const auto& row : aab_identity_check(table)) {
            if (row.lhs != row.rhs) {
                pass = false;
                return "order " + std::to_string(2 * row.g) + ": " + row.lhs.str() + " vs " +
                       row.rhs.str();
            }
        }
        return "a_1 = -1/24, identity exact through g = 3";
    });
}

CheckResult check_q_identity(std::uint64_t seed) {
    return timed(6, "q-identity", [&](bool& pass) -> std::string {
        Rng rng(seed);
        std::uniform_int_distribution<int> pick_g(0, 3);
        std::uniform_int_distribution<int> pick_n(2, 6);
        double worst = 0.0;
        int done = 0;
        while (done < 100) {
            const int g = pick_g(rng);
            const int n = pick_n(rng);
            if (2 * g - 2 + n <= 0) {
                continue;
            }
            const auto a = random_point(rng, g, n);
            const QFactor q = Q_factor(a);
            const double scale = std::max(1.0, std::abs(q.closed_form));
            const double err = std::abs(q.symmetric_form - q.closed_form) / scale;
            worst = std::max(worst, err);
            if (err > 1e-12) {
                pass = false;
                return "disagreement " + std::to_string(err) + " at g=" + std::to_string(g) + " " +
                       a.str();
            }
            ++done;
        }
        std::ostringstream os;
        os << "100 points, worst scaled difference " << std::scientific << std::setprecision(2)
           << worst;
        return os.str();
    });
}

CheckResult check_polytope(std::uint64_t seed) {
    return timed(7, "polytope", [&](bool& pass) -> std::string {
        const VarId x = 0;
        const VarId y = 1;
        const std::vector<VarId> coords{x, y};
        const std::vector<std::vector<Rational>> std2{
            {Rational(0), Rational(0)}, {Rational(1), Rational(0)}, {Rational(0), Rational(1)}};
        if (integrate_over_simplex(MultiPoly(1), coords, std2) != Rational(1, 2) ||
            integrate_over_simplex(MultiPoly::variable(x), coords, std2) != Rational(1, 6)) {
            pass = false;
            return "Dirichlet values";
        }
        const Rational c(7, 5);
        CascadePolytope seg({CascadeBlock{{x, y}, AffineExpr(c)}});
        if (integrate(MultiPoly::variable(x) * MultiPoly::variable(y), seg) !=
            pow(c, 3) / Rational(6)) {
            pass = false;
            return "segment c^3/6";
        }

        Rng rng(seed);
        std::uniform_int_distribution<long> num(1, 29);
        auto rq = [&] { return Rational(num(rng), 10); };
        for (int trial = 0; trial < 5; ++trial) {
            // Triangle x > 0, y > 0, a x + b y < c, split by a random line.
            InequalitySystem tri;
            tri.dim = 2;
            tri.add_row({{Rational(1), Rational(0)}, Rational(0)});
            tri.add_row({{Rational(0), Rational(1)}, Rational(0)});
            tri.add_row({{-rq(), -rq()}, rq()});
            MultiPoly p = MultiPoly(rq()) + rq() * MultiPoly::variable(x) +
                          rq() * MultiPoly::variable(x) * MultiPoly::variable(y) * MultiPoly::variable(y);
            const Rational whole = integrate_system(p, coords, tri);
            const Rational other = integrate_system(p, coords, tri, Apex::lex_max);
            if (whole != other) {
                pass = false;
                return "triangulation dependence";
            }
            LinearInequality cut{{rq() - Rational(3, 2), rq() - Rational(3, 2)}, rq() - Rational(1)};
            InequalitySystem left = tri;
            InequalitySystem right = tri;
            left.add_row(cut);
            right.add_row({{-cut.a[0], -cut.a[1]}, -cut.b});
            if (integrate_system(p, coords, left) + integrate_system(p, coords, right) != whole) {
                pass = false;
                return "additivity under a hyperplane split";
            }
        }

        // Riemann sums on a two-block cascade: {x1 + x2 = 3/2}, {y1 + y2 = 2 - x1}.
        CascadePolytope chain;
        chain.add_block({{0, 1}, AffineExpr(Rational(3, 2))});
        chain.add_block({{2, 3}, AffineExpr(Rational(2)) - AffineExpr::variable(0)});
        const MultiPoly f = MultiPoly(1) + MultiPoly::variable(0) * MultiPoly::variable(3);
        const Rational exact = integrate(f, chain);
        const auto param = parametrize(chain);
        const MultiPoly reduced = f.compose_affine(param.images);
        double previous = 1e300;
        for (long k : {100L, 200L, 400L}) {
            const double sum = lattice_sum(reduced, param.free_vars, param.system, k);
            const double err = std::abs(sum - exact.to_double()) / std::abs(exact.to_double());
            if (err >= previous) {
                pass = false;
                return "Riemann error not decreasing at k=" + std::to_string(k);
            }
            previous = err;
        }
        if (previous >= 0.02) {
            pass = false;
            return "Riemann error at k=400 is " + std::to_string(previous);
        }
        return "Dirichlet, additivity, triangulation, Riemann (k=400 error " +
               std::to_string(previous) + ")";
    });
}

CheckResult check_wall_order(ConventionFlags conv) {
    return timed(8, "wall-order", [&](bool& pass) -> std::string {
        const std::array<Rational, 3> eps{Rational(1, 10), Rational(1, 40), Rational(1, 160)};
        // n = 2: |v(1 +- e, 1 -+ e)| / e^2 bounded, variation under 50%.
        for (int side : {1, -1}) {
            std::vector<double> ratios;
            for (const auto& e : eps) {
                const Rational s = e * Rational(side);
                const WeightVector a(1, {Rational(1) + s, Rational(1) - s});
                ratios.push_back(std::abs((v_of(a, 1, conv) / (e * e)).to_double()));
            }
            const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
            if (*hi == 0.0 || (*hi - *lo) / *hi >= 0.5) {
                pass = false;
                return "n=2 side " + std::to_string(side) + ": |v|/e^2 ratios vary too much";
            }
        }
        // n >= 3: order-1 vanishing with convergent one-sided difference quotients.
        const std::vector<std::pair<int, std::vector<Rational>>> cases{
            {1, {Rational(1), Rational(5, 6), Rational(7, 6)}},
            {0, {Rational(1), Rational(1, 3), Rational(1, 3), Rational(1, 3)}},
            {0, {Rational(1), Rational(3, 10), Rational(3, 10), Rational(1, 5), Rational(6, 5)}},
        };
        for (const auto& [g, base] : cases) {
            for (int side : {1, -1}) {
                std::vector<double> q;
                for (const auto& e : eps) {
                    auto entries = base;
                    entries[0] += e * Rational(side);
                    entries[1] -= e * Rational(side);
                    const WeightVector a(g, entries);
                    q.push_back((v_of(a, 1, conv) / (e * Rational(side))).to_double());
                }
                const bool converging = std::abs(q[2] - q[1]) <= std::abs(q[1] - q[0]) + 1e-15;
                const bool order_one = std::abs(q[2]) >= 0.5 * std::abs(q[1]) && q[2] != 0.0;
                if (!converging || !order_one) {
                    pass = false;
                    return "n=" + std::to_string(base.size()) + " wall at " +
                           WeightVector(g, base).str() + ": quotients do not settle";
                }
            }
        }
        return "n=2 order two, n>=3 order one";
    });
}

CheckResult check_boundary_zero(ConventionFlags conv) {
    return timed(8, "boundary-zero", [&](bool& pass) -> std::string {
        for (int g : {1, 2}) {
            double previous = 1e300;
            for (const auto& e : {Rational(1, 10), Rational(1, 100), Rational(1, 1000)}) {
                const WeightVector a(g, {e, Rational(2 * g) - e});
                const double v = std::abs(v_of(a, 1, conv).to_double());
                if (!(v < previous)) {
                    pass = false;
                    return "g=" + std::to_string(g) + ": |v(e, 2g-e)| not decreasing at e=" +
                           e.str();
                }
                previous = v;
            }
        }
        return "g = 1, 2";
    });
}

CheckResult check_slice_sign(ConventionFlags conv, unsigned threads) {
    return timed(9, "slice-sign", [&](bool& pass) -> std::string {
        ScanSpec spec = default_scan(1, 2, 202);
        EvalOptions o = quiet();
        o.threads = threads;
        const auto rows = scan(spec, conv, o);
        int off_wall = 0;
        for (const auto& r : rows) {
            if (r.flag == "ok") {
                ++off_wall;
                if (r.v->sign() > 0) {
                    pass = false;
                    return "(-1)^g v < 0 at t = " + r.t.str();
                }
            } else if (r.flag == "wall") {
                if (!r.v->is_zero()) {
                    pass = false;
                    return "v != 0 at wall t = " + r.t.str();
                }
            } else if (r.flag != "outside") {
                pass = false;
                return "row flag " + r.flag;
            }
        }
        if (off_wall < 200) {
            pass = false;
            return "only " + std::to_string(off_wall) + " off-wall samples";
        }
        return std::to_string(off_wall) + " off-wall samples";
    });
}

CheckResult check_policy_independence(ConventionFlags conv, std::uint64_t seed) {
    return timed(3, "policy-independence", [&](bool& pass) -> std::string {
        Rng rng(seed);
        for (const auto& [g, n] : {std::pair{1, 3}, std::pair{2, 2}, std::pair{0, 5}}) {
            for (int s = 0; s < 3; ++s) {
                const auto a = random_point(rng, g, n);
                const Rational first = v_of(a, 1, conv, I0Policy::prefer_fixed_first);
                for (auto policy : {I0Policy::prefer_fixed_last, I0Policy::first_edge}) {
                    const Rational v = v_of(a, 1, conv, policy);
                    if (v != first) {
                        pass = false;
                        return mismatch(a, "policy", first, v);
                    }
                }
            }
        }
        return "9 points, 3 policies";
    });
}

ValidationReport run_validation(const ValidateOptions& options) {
    const std::uint64_t seed = options.seed;
    const unsigned threads = resolve_threads(options.threads);
    const CheckResult aab = check_aab_identity();
    const CheckResult q = check_q_identity(seed + 6);
    const CheckResult poly = check_polytope(seed + 7);
    ValidationReport report;
    for (const auto& conv : ConventionFlags::matrix()) {
        ConventionRow row;
        row.convention = conv;
        row.checks.push_back(check_base_case(conv, seed + 1));
        row.checks.push_back(check_genus0_oracle(conv, seed + 2));
        row.checks.push_back(check_i0_independence(conv, seed + 3));
        row.checks.push_back(check_sn_invariance(conv, seed + 4));
        row.checks.push_back(check_integral_vanishing(conv, seed + 5));
        row.checks.push_back(check_policy_independence(conv, seed + 8));
        row.checks.push_back(check_kernel_regression(conv));
        row.checks.push_back(aab);
        row.checks.push_back(q);
        row.checks.push_back(poly);
        row.checks.push_back(check_wall_order(conv));
        row.checks.push_back(check_boundary_zero(conv));
        row.checks.push_back(check_slice_sign(conv, threads));
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace flatvol
