#pragma once

// v(alpha) by the star-graph flat recursion, the volume conversion, the
// genus-0 closed form, slice scans and the Riemann-sum diagnostic.

#include "flatvol/kernel.hpp"
#include "flatvol/rational.hpp"
#include "flatvol/stargraph.hpp"
#include "flatvol/weight_vector.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace flatvol {

struct TermValue {
    std::string tree;
    Rational value;
};

struct FlatValue {
    WeightVector alpha;
    int i0 = 1;
    ConventionFlags convention;
    Rational value;
    std::vector<TermValue> terms;
    std::optional<double> volhat;
};

struct EvalOptions {
    I0Policy policy = I0Policy::prefer_fixed_first;
    /// 0 means FLATVOL_THREADS, falling back to 1.
    unsigned threads = 0;
    /// Reuse values keyed by (g, sorted alpha); honoured only for the validated convention.
    bool use_cache = false;
    bool with_volhat = false;
    bool keep_terms = true;
};

/// Resolves a requested thread count (0 = environment, else 1).
unsigned resolve_threads(unsigned requested);

/// v(alpha) with the recursion rooted at marking i0 (1-based).
/// Throws InputError for non-positive entries or a bad i0.
FlatValue eval_v(const WeightVector& alpha, int i0, ConventionFlags conv = {},
                 const EvalOptions& options = {});

/// -alpha_1 + sum_{m != 1} (alpha_1 + alpha_m - 1)_+ on (g, n) = (0, 4).
Rational genus0_n4_oracle(const WeightVector& alpha);

/// (2 pi)^{2g-2+n} / ((2g-2+n)! q(alpha)) * v.
double volhat_from_v(const WeightVector& alpha, const Rational& v);

/// Throws WallPointError when alpha has an integral entry.
double volhat(const WeightVector& alpha, ConventionFlags conv = {}, const EvalOptions& options = {});

struct ScanRow {
    Rational t;
    std::vector<Rational> alpha;
    std::optional<Rational> v;
    std::optional<double> volhat;
    /// ok, wall, multiwall, outside, or error:<message>
    std::string flag;
};

struct ScanSpec {
    int genus = 1;
    std::vector<Rational> base;
    std::vector<Rational> direction;
    Rational t0;
    Rational t1;
    int steps = 200;
};

/// The slice (t, 2g - t) for n = 2, or the analogous slice through the
/// barycenter for larger n, over t in [0, 2g - 2 + n].
ScanSpec default_scan(int genus, int n, int steps);

/// Rows at t_i = t0 + (t1 - t0) i / steps, i = 0..steps.
std::vector<ScanRow> scan(const ScanSpec& spec, ConventionFlags conv = {},
                          const EvalOptions& options = {});

struct RiemannRow {
    std::string graph;
    long k = 0;
    int dimension = 0;
    std::size_t points = 0;
    Rational exact;
    Rational lattice;
    double rel_error = 0.0;
};

/// For every star graph rooted at i0, compares (1/k^{h1}) sum_{k-twists} prod beta
/// with the exact integral of prod beta over the graph's domain.
std::vector<RiemannRow> riemann_diagnostic(const WeightVector& alpha, int i0,
                                           const std::vector<long>& ks);

}  // namespace flatvol
