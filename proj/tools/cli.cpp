#include "cli.hpp"

#include "flatvol/errors.hpp"
#include "flatvol/flat_recursion.hpp"
#include "flatvol/polytope.hpp"
#include "flatvol/run_config.hpp"
#include "flatvol/sampling.hpp"
#include "flatvol/stargraph.hpp"
#include "flatvol/validate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace flatvol {

namespace {

using ojson = nlohmann::ordered_json;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ojson rational_list(const std::vector<Rational>& xs) {
    ojson arr = ojson::array();
    for (const auto& x : xs) {
        arr.push_back(x.str());
    }
    return arr;
}

ojson convention_json(ConventionFlags c) {
    return {{"s_exponent", c.s_exponent_name()}, {"term_sign", c.term_sign_name()}};
}

std::vector<Rational> parse_rationals(const std::vector<std::string>& items) {
    std::vector<Rational> out;
    for (const auto& s : items) {
        out.push_back(Rational::parse(s));
    }
    return out;
}

WeightVector weights(const RunConfig& c) {
    if (c.alpha.empty()) {
        throw InputError("--alpha is required");
    }
    WeightVector a(c.g, parse_rationals(c.alpha));
    if (c.n && static_cast<std::size_t>(*c.n) != a.n()) {
        throw InputError("--n = " + std::to_string(*c.n) + " but alpha has " +
                         std::to_string(a.n()) + " entries");
    }
    return a;
}

int markings(const RunConfig& c) {
    if (c.n) {
        return *c.n;
    }
    if (!c.alpha.empty()) {
        return static_cast<int>(c.alpha.size());
    }
    throw InputError("--n or --alpha is required");
}

OutputFormat format_of(const RunConfig& c, OutputFormat fallback) {
    return c.format.value_or(fallback);
}

// ---------------------------------------------------------------------------
// Subcommands. Each writes its result to `out` and returns an exit code.

int cmd_eval(const RunConfig& c, std::ostream& out) {
    const WeightVector a = weights(c);
    EvalOptions o;
    o.threads = c.threads;
    o.with_volhat = true;
    const FlatValue v = eval_v(a, c.i0, c.convention, o);
    switch (format_of(c, OutputFormat::json)) {
        case OutputFormat::json: {
            ojson j;
            j["g"] = a.genus();
            j["n"] = a.n();
            j["alpha"] = rational_list(a.entries());
            j["i0"] = v.i0;
            j["convention"] = convention_json(v.convention);
            j["v"] = v.value.str();
            j["volhat"] = v.volhat ? ojson(*v.volhat) : ojson(nullptr);
            j["terms"] = ojson::array();
            for (const auto& t : v.terms) {
                j["terms"].push_back({{"tree", t.tree}, {"value", t.value.str()}});
            }
            out << j.dump(2) << "\n";
            break;
        }
        case OutputFormat::csv:
            out << "v_num,v_den,volhat\n"
                << v.value.numerator().get_str() << "," << v.value.denominator().get_str() << ","
                << (v.volhat ? num(*v.volhat) : "") << "\n";
            break;
        case OutputFormat::text:
            out << "v = " << v.value << "\n";
            out << "volhat = " << (v.volhat ? num(*v.volhat) : "undefined (wall point)") << "\n";
            for (const auto& t : v.terms) {
                out << "  " << t.value << "  " << t.tree << "\n";
            }
            break;
    }
    return 0;
}

int cmd_volhat(const RunConfig& c, std::ostream& out) {
    const WeightVector a = weights(c);
    EvalOptions o;
    o.threads = c.threads;
    o.keep_terms = false;
    const double vol = volhat(a, c.convention, o);
    switch (format_of(c, OutputFormat::json)) {
        case OutputFormat::json: {
            ojson j;
            j["g"] = a.genus();
            j["n"] = a.n();
            j["alpha"] = rational_list(a.entries());
            j["convention"] = convention_json(c.convention);
            j["volhat"] = vol;
            out << j.dump(2) << "\n";
            break;
        }
        case OutputFormat::csv:
            out << "volhat\n" << num(vol) << "\n";
            break;
        case OutputFormat::text:
            out << num(vol) << "\n";
            break;
    }
    return 0;
}

ScanSpec scan_spec(const RunConfig& c) {
    const int n = markings(c);
    ScanSpec spec = default_scan(c.g, n, c.scan.steps);
    if (!c.scan.base.empty()) {
        spec.base = parse_rationals(c.scan.base);
    }
    if (!c.scan.direction.empty()) {
        spec.direction = parse_rationals(c.scan.direction);
    }
    if (spec.base.size() != static_cast<std::size_t>(n) ||
        spec.direction.size() != static_cast<std::size_t>(n)) {
        throw InputError("scan base and direction need n = " + std::to_string(n) + " entries");
    }
    if (c.scan.t0) {
        spec.t0 = Rational::parse(*c.scan.t0);
    }
    if (c.scan.t1) {
        spec.t1 = Rational::parse(*c.scan.t1);
    }
    return spec;
}

std::string joined(const std::vector<Rational>& xs, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s += (i ? sep : "") + xs[i].str();
    }
    return s;
}

int cmd_scan(const RunConfig& c, std::ostream& out) {
    const ScanSpec spec = scan_spec(c);
    EvalOptions o;
    o.threads = c.threads;
    const auto rows = scan(spec, c.convention, o);
    switch (format_of(c, OutputFormat::csv)) {
        case OutputFormat::csv:
        case OutputFormat::text:
            out << "t,alpha,v_num,v_den,volhat,flag\n";
            for (const auto& r : rows) {
                out << r.t << "," << joined(r.alpha, ";") << ","
                    << (r.v ? r.v->numerator().get_str() : "") << ","
                    << (r.v ? r.v->denominator().get_str() : "") << ","
                    << (r.volhat ? num(*r.volhat) : "") << "," << r.flag << "\n";
            }
            break;
        case OutputFormat::json: {
            ojson j;
            j["g"] = spec.genus;
            j["n"] = spec.base.size();
            j["convention"] = convention_json(c.convention);
            j["rows"] = ojson::array();
            for (const auto& r : rows) {
                j["rows"].push_back({{"t", r.t.str()},
                                     {"alpha", rational_list(r.alpha)},
                                     {"v", r.v ? ojson(r.v->str()) : ojson(nullptr)},
                                     {"volhat", r.volhat ? ojson(*r.volhat) : ojson(nullptr)},
                                     {"flag", r.flag}});
            }
            out << j.dump(2) << "\n";
            break;
        }
    }
    return 0;
}

int cmd_graphs(const RunConfig& c, std::ostream& out) {
    const int n = markings(c);
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 1);
    const auto graphs = enumerate_star_graphs(c.g, labels, c.i0);
    std::optional<WeightVector> a;
    if (!c.alpha.empty()) {
        a = weights(c);
    }
    const auto fmt = format_of(c, OutputFormat::text);
    ojson arr = ojson::array();
    if (fmt == OutputFormat::csv) {
        out << "graph,h1,weight,levels,empty\n";
    }
    for (const auto& gr : graphs) {
        std::optional<DomainLevels> dom;
        if (a) {
            dom = domain_of(gr, *a);
        }
        if (fmt == OutputFormat::json) {
            ojson j{{"graph", gr.encode()},
                    {"h1", gr.h1()},
                    {"weight", gr.symmetry_weight().str()},
                    {"automorphisms", automorphism_count(gr)}};
            if (dom) {
                j["levels"] = rational_list(dom->levels);
                j["empty"] = dom->empty;
            }
            arr.push_back(j);
        } else if (fmt == OutputFormat::csv) {
            out << "\"" << gr.encode() << "\"," << gr.h1() << "," << gr.symmetry_weight() << ","
                << (dom ? joined(dom->levels, ";") : "") << ","
                << (dom ? (dom->empty ? "true" : "false") : "") << "\n";
        } else {
            out << gr.encode();
            if (dom) {
                out << "  levels: " << (dom->levels.empty() ? "-" : joined(dom->levels, ","))
                    << (dom->empty ? "  (empty)" : "");
            }
            out << "\n";
        }
    }
    if (fmt == OutputFormat::json) {
        out << arr.dump(2) << "\n";
    }
    return 0;
}

int cmd_aab(const RunConfig& c, std::ostream& out) {
    const auto table = solve_aab(c.gmax);
    const auto check = aab_identity_check(table);
    switch (format_of(c, OutputFormat::text)) {
        case OutputFormat::text:
            for (const auto& [g, a] : table.values) {
                out << g << " " << a << "\n";
            }
            break;
        case OutputFormat::csv:
            out << "g,a_num,a_den\n";
            for (const auto& [g, a] : table.values) {
                out << g << "," << a.numerator().get_str() << "," << a.denominator().get_str()
                    << "\n";
            }
            break;
        case OutputFormat::json: {
            ojson j;
            j["g_max"] = table.g_max;
            j["values"] = ojson::array();
            for (const auto& [g, a] : table.values) {
                j["values"].push_back({{"g", g}, {"a", a.str()}});
            }
            j["identity"] = ojson::array();
            for (const auto& row : check) {
                j["identity"].push_back(
                    {{"g", row.g}, {"lhs", row.lhs.str()}, {"rhs", row.rhs.str()}});
            }
            out << j.dump(2) << "\n";
            break;
        }
    }
    return 0;
}

int cmd_q(const RunConfig& c, std::ostream& out) {
    const WeightVector a = weights(c);
    const double q = q_factor(a);
    std::optional<QFactor> Q;
    std::string q_error;
    try {
        Q = Q_factor(a);
    } catch (const std::domain_error& e) {
        q_error = e.what();
    }
    auto cplx = [](std::complex<double> z) { return ojson::array({z.real(), z.imag()}); };
    switch (format_of(c, OutputFormat::json)) {
        case OutputFormat::json: {
            ojson j;
            j["g"] = a.genus();
            j["alpha"] = rational_list(a.entries());
            j["q"] = q;
            j["Q_symmetric"] = Q ? cplx(Q->symmetric_form) : ojson(nullptr);
            j["Q_closed"] = Q ? cplx(Q->closed_form) : ojson(nullptr);
            if (!Q) {
                j["Q_error"] = q_error;
            }
            out << j.dump(2) << "\n";
            break;
        }
        case OutputFormat::csv:
            out << "q,Q_symmetric_re,Q_symmetric_im,Q_closed_re,Q_closed_im\n" << num(q);
            if (Q) {
                out << "," << num(Q->symmetric_form.real()) << "," << num(Q->symmetric_form.imag())
                    << "," << num(Q->closed_form.real()) << "," << num(Q->closed_form.imag());
            } else {
                out << ",,,,";
            }
            out << "\n";
            break;
        case OutputFormat::text:
            out << "q = " << num(q) << "\n";
            if (Q) {
                out << "Q symmetric = " << num(Q->symmetric_form.real()) << " + "
                    << num(Q->symmetric_form.imag()) << "i\n"
                    << "Q closed    = " << num(Q->closed_form.real()) << " + "
                    << num(Q->closed_form.imag()) << "i\n";
            } else {
                out << "Q undefined: " << q_error << "\n";
            }
            break;
    }
    return 0;
}

int cmd_riemann(const RunConfig& c, std::ostream& out) {
    const WeightVector a = weights(c);
    const auto rows = riemann_diagnostic(a, c.i0, c.ks);
    switch (format_of(c, OutputFormat::csv)) {
        case OutputFormat::csv:
        case OutputFormat::text:
            out << "graph,k,h1,points,exact,lattice,rel_error\n";
            for (const auto& r : rows) {
                out << "\"" << r.graph << "\"," << r.k << "," << r.dimension << "," << r.points
                    << "," << r.exact << "," << r.lattice << "," << num(r.rel_error) << "\n";
            }
            break;
        case OutputFormat::json: {
            ojson arr = ojson::array();
            for (const auto& r : rows) {
                arr.push_back({{"graph", r.graph},
                               {"k", r.k},
                               {"h1", r.dimension},
                               {"points", r.points},
                               {"exact", r.exact.str()},
                               {"lattice", r.lattice.str()},
                               {"rel_error", r.rel_error}});
            }
            out << arr.dump(2) << "\n";
            break;
        }
    }
    return 0;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
    ValidateOptions o;
    o.seed = c.seed;
    o.threads = c.threads;
    const ValidationReport report = run_validation(o);
    if (format_of(c, OutputFormat::text) == OutputFormat::json) {
        ojson j;
        j["gate"] = report.gate();
        j["rows"] = ojson::array();
        for (const auto& row : report.rows) {
            ojson r;
            r["convention"] = convention_json(row.convention);
            r["checks"] = ojson::array();
            for (const auto& chk : row.checks) {
                r["checks"].push_back({{"criterion", chk.criterion},
                                       {"name", chk.name},
                                       {"pass", chk.pass},
                                       {"detail", chk.detail}});
            }
            j["rows"].push_back(r);
        }
        out << j.dump(2) << "\n";
    } else {
        out << report.text();
    }
    return report.gate() ? 0 : 1;
}

// Random cascade domains: exact integral under both triangulation apexes and
// lattice sums at increasing k.
int cmd_integrate_test(const RunConfig& c, std::ostream& out, int trials) {
    Rng rng(c.seed);
    std::uniform_int_distribution<long> level(100, 300);
    std::uniform_int_distribution<int> coef(1, 9);
    std::uniform_int_distribution<int> shape(0, 3);
    int failures = 0;
    out << "trial,shape,dim,exact,lex_max_agrees,err_k50,err_k100,err_k200\n";
    for (int t = 0; t < trials; ++t) {
        const int s = shape(rng);
        CascadePolytope p;
        switch (s) {
            case 0:
                p.add_block({{0, 1}, AffineExpr(Rational(level(rng), 100))});
                break;
            case 1:
                p.add_block({{0, 1, 2}, AffineExpr(Rational(level(rng), 100))});
                break;
            case 2:
                p.add_block({{0, 1}, AffineExpr(Rational(level(rng), 100))});
                p.add_block({{2, 3}, AffineExpr(Rational(level(rng) + 200, 100)) -
                                         AffineExpr::variable(0)});
                break;
            default:
                p.add_block({{0}, AffineExpr(Rational(level(rng), 100))});
                p.add_block({{1, 2}, AffineExpr(Rational(level(rng), 100)) +
                                         AffineExpr::variable(0, Rational(1, 2))});
                break;
        }
        const auto vars = p.variables();
        MultiPoly f(Rational(coef(rng)));
        for (VarId v : vars) {
            f += Rational(coef(rng)) * MultiPoly::variable(v) * MultiPoly::variable(v);
        }
        const Rational exact = integrate(f, p);
        const auto param = parametrize(p);
        const MultiPoly reduced = f.compose_affine(param.images);
        const bool agree =
            integrate_system(reduced, param.free_vars, param.system, Apex::lex_max) == exact;
        failures += agree ? 0 : 1;
        out << t << "," << s << "," << p.dimension() << "," << exact << ","
            << (agree ? "true" : "false");
        for (long k : {50L, 100L, 200L}) {
            const double sum = lattice_sum(reduced, param.free_vars, param.system, k);
            out << "," << num(std::abs(sum - exact.to_double()) / std::abs(exact.to_double()));
        }
        out << "\n";
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact flat-recursion engine: v(alpha), volume function, star graphs, kernels."};
    app.name("flatvol");
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    bool dump_config = false;
    std::string format;
    std::string s_exponent;
    std::string term_sign;
    std::string alpha;
    std::string ks;
    std::string base;
    std::string direction;
    std::string t0;
    std::string t1;
    int trials = 20;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Load a JSON run configuration");
        sub->add_flag("--dump-config", dump_config, "Print the resolved configuration and exit");
        sub->add_option("--format", format, "Output format: json, csv or text");
        sub->add_option("-o,--output", cfg.output, "Write output to a file");
        sub->add_option("--threads", cfg.threads, "Worker threads (default FLATVOL_THREADS or 1)");
        sub->add_option("--s-exponent", s_exponent, "Kernel exponent: shifted or printed");
        sub->add_option("--term-sign", term_sign, "Term sign: prefactor or printed");
    };
    auto weights_opts = [&](CLI::App* sub) {
        sub->add_option("--g", cfg.g, "Genus");
        sub->add_option("--n", cfg.n, "Number of markings");
        sub->add_option("--alpha", alpha, "Comma-separated rationals, e.g. 1/2,3/2");
        sub->add_option("--i0", cfg.i0, "Distinguished marking (1-based)");
    };

    std::vector<CLI::App*> subs;
    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        common(sub);
        weights_opts(sub);
        subs.push_back(sub);
        return sub;
    };
    add("eval", "Evaluate v(alpha) with its term breakdown");
    add("volhat", "Evaluate the volume function at alpha");
    CLI::App* scan_cmd = add("scan", "Evaluate v along a line through the simplex");
    scan_cmd->add_option("--steps", cfg.scan.steps, "Number of intervals");
    scan_cmd->add_option("--t0", t0, "Start parameter (default 0)");
    scan_cmd->add_option("--t1", t1, "End parameter (default 2g-2+n)");
    scan_cmd->add_option("--base", base, "Base point, comma-separated");
    scan_cmd->add_option("--direction", direction, "Direction summing to 0, comma-separated");
    add("graphs", "List star graphs with i0 on the central vertex");
    add("aab", "Solve the a^ab table")->add_option("--gmax", cfg.gmax, "Largest genus");
    add("q", "Evaluate the normalizations q(alpha) and Q(alpha)");
    add("riemann", "Compare lattice twist sums with exact integrals")
        ->add_option("--k", ks, "Comma-separated k values (default 20,40,80)");
    add("validate", "Run the property suite across the convention matrix")
        ->add_option("--seed", cfg.seed, "Random seed");
    CLI::App* fuzz = add("integrate-test", "Fuzz the polytope integrator");
    fuzz->group("");
    fuzz->add_option("--seed", cfg.seed, "Random seed");
    fuzz->add_option("--trials", trials, "Number of random domains");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        RunConfig resolved = cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw InputError("cannot read config file " + config_path);
            }
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw InputError(std::string("config is not valid JSON: ") + e.what());
            }
            resolved = RunConfig::from_json(j);
            // Options given on the command line take precedence over the file.
            auto given = [&](const char* name) { return sub->count(name) > 0; };
            if (given("--g")) resolved.g = cfg.g;
            if (given("--n")) resolved.n = cfg.n;
            if (given("--i0")) resolved.i0 = cfg.i0;
            if (given("--output")) resolved.output = cfg.output;
            if (given("--threads")) resolved.threads = cfg.threads;
            if (sub->get_option_no_throw("--steps") && given("--steps")) resolved.scan.steps = cfg.scan.steps;
            if (sub->get_option_no_throw("--gmax") && given("--gmax")) resolved.gmax = cfg.gmax;
            if (sub->get_option_no_throw("--seed") && given("--seed")) resolved.seed = cfg.seed;
        }
        resolved.subcommand = sub->get_name();
        auto split = [](const std::string& s) {
            std::vector<std::string> parts;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ',')) {
                parts.push_back(item);
            }
            return parts;
        };
        if (!alpha.empty()) resolved.alpha = split(alpha);
        if (!format.empty()) resolved.format = parse_format(format);
        if (!s_exponent.empty()) resolved.convention.s_exponent = parse_s_exponent(s_exponent);
        if (!term_sign.empty()) resolved.convention.term_sign = parse_term_sign(term_sign);
        if (!base.empty()) resolved.scan.base = split(base);
        if (!direction.empty()) resolved.scan.direction = split(direction);
        if (!t0.empty()) resolved.scan.t0 = t0;
        if (!t1.empty()) resolved.scan.t1 = t1;
        if (!ks.empty()) {
            resolved.ks.clear();
            for (const auto& k : split(ks)) {
                try {
                    resolved.ks.push_back(std::stol(k));
                } catch (const std::exception&) {
                    throw InputError("bad k value '" + k + "'");
                }
            }
        }

        std::ofstream file;
        std::ostream* sink = &out;
        if (!resolved.output.empty()) {
            file.open(resolved.output);
            if (!file) {
                throw InputError("cannot open output file " + resolved.output);
            }
            sink = &file;
        }
        if (dump_config) {
            *sink << resolved.to_json().dump(2) << "\n";
            return 0;
        }
        const std::string& name = resolved.subcommand;
        if (name == "eval") return cmd_eval(resolved, *sink);
        if (name == "volhat") return cmd_volhat(resolved, *sink);
        if (name == "scan") return cmd_scan(resolved, *sink);
        if (name == "graphs") return cmd_graphs(resolved, *sink);
        if (name == "aab") return cmd_aab(resolved, *sink);
        if (name == "q") return cmd_q(resolved, *sink);
        if (name == "riemann") return cmd_riemann(resolved, *sink);
        if (name == "validate") return cmd_validate(resolved, *sink);
        if (name == "integrate-test") return cmd_integrate_test(resolved, *sink, trials);
        throw std::logic_error("unhandled subcommand " + name);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const WallPointError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace flatvol
