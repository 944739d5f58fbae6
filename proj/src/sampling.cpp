#include "flatvol/sampling.hpp"

#include "flatvol/errors.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>

namespace flatvol {

namespace {

// n positive integers summing to total.
std::vector<long> random_composition(Rng& rng, long total, int n) {
    std::uniform_int_distribution<long> cut(1, total - 1);
    std::set<long> cuts;
    while (static_cast<int>(cuts.size()) < n - 1) {
        cuts.insert(cut(rng));
    }
    std::vector<long> parts;
    long prev = 0;
    for (long c : cuts) {
        parts.push_back(c - prev);
        prev = c;
    }
    parts.push_back(total - prev);
    return parts;
}

}  // namespace

WeightVector random_point(Rng& rng, int genus, int n, long denominator, bool allow_integral) {
    const int chi = 2 * genus - 2 + n;
    if (chi <= 0 || n < 1) {
        throw InputError("unstable (g, n) for sampling");
    }
    const long total = chi * denominator;
    if (total < n) {
        throw InputError("denominator too small for a positive point");
    }
    for (;;) {
        const auto parts = n == 1 ? std::vector<long>{total} : random_composition(rng, total, n);
        std::vector<Rational> entries;
        bool integral = false;
        for (long p : parts) {
            entries.emplace_back(p, denominator);
            integral = integral || entries.back().is_integer();
        }
        if (allow_integral || !integral) {
            return WeightVector(genus, std::move(entries));
        }
    }
}

WeightVector random_point(Rng& rng, int genus, int n) {
    static constexpr std::array<long, 10> primes{7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    std::uniform_int_distribution<std::size_t> pick(0, primes.size() - 1);
    return random_point(rng, genus, n, primes[pick(rng)]);
}

WeightVector random_integral_point(Rng& rng, int genus, int n) {
    const int chi = 2 * genus - 2 + n;
    if (n < 2 || chi <= 1) {
        throw InputError("no integral-entry points for these (g, n)");
    }
    std::uniform_int_distribution<int> whole(1, chi - 1);
    const int m = whole(rng);
    std::vector<Rational> entries{Rational(m)};
    const long denominator = 12;
    const long rest = static_cast<long>(chi - m) * denominator;
    if (n == 2) {
        entries.emplace_back(chi - m);
    } else {
        for (long p : random_composition(rng, rest, n - 1)) {
            entries.emplace_back(p, denominator);
        }
    }
    const auto perm = random_permutation(rng, n);
    std::vector<Rational> shuffled(entries.size());
    for (int i = 0; i < n; ++i) {
        shuffled[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
            entries[static_cast<std::size_t>(i)];
    }
    return WeightVector(genus, std::move(shuffled));
}

std::vector<int> random_permutation(Rng& rng, int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

}  // namespace flatvol
