#pragma once

#include "d2dcache/content.hpp"
#include "d2dcache/error.hpp"
#include "d2dcache/random.hpp"
#include "d2dcache/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

namespace d2dcache::placement {

/// Cache marginals b_j = Pr(object j is in a transmitter's cache), capacity K.
struct PlacementPolicy {
    std::vector<double> marginals;
    std::size_t capacity = 0;

    std::size_t size() const { return marginals.size(); }
    double operator[](std::size_t j) const { return marginals[j]; }

    void validate() const
    {
        detail::require(capacity >= 1, "cache capacity must be >= 1");
        double sum = 0.0;
        for (double b : marginals) {
            detail::require(std::isfinite(b) && b >= 0.0 && b <= 1.0,
                            "placement marginals must lie in [0, 1]");
            sum += b;
        }
        detail::require(sum <= static_cast<double>(capacity) * (1.0 + 1e-12),
                        "placement marginals must sum to at most the cache capacity");
    }
};

/**
 * Marginals that spread K slots over the 2K most popular objects:
 * b_j = min(K a_j / sum_{k<=2K} a_k, 1) for j <= 2K and 0 beyond.
 */
inline PlacementPolicy heuristic_marginals(const content::PopularityLaw& popularity,
                                           std::size_t capacity)
{
    detail::require(capacity >= 1, "cache capacity must be >= 1");
    const std::size_t head = 2 * capacity;
    detail::require(head <= popularity.size(), "heuristic placement needs 2K <= F");
    const double head_mass = popularity.head_mass(head);
    PlacementPolicy policy;
    policy.capacity = capacity;
    policy.marginals.assign(popularity.size(), 0.0);
    for (std::size_t j = 0; j < head; ++j)
        policy.marginals[j] =
            std::min(static_cast<double>(capacity) * popularity[j] / head_mass, 1.0);
    return policy;
}

/// Object indices held by one transmitter (0-based, ascending).
struct CacheInventory {
    std::vector<std::size_t> objects;

    bool contains(std::size_t j) const
    {
        return std::binary_search(objects.begin(), objects.end(), j);
    }
    std::size_t size() const { return objects.size(); }
};

/**
 * Probabilistic block placement.
 *
 * The segments [0, b_j) are laid end to end over K unit rows, in descending
 * object index; a segment that runs past the end of a row continues at the
 * start of the next. A single u ~ U[0,1) picks, in every row, the object
 * whose segment covers u. Each object is then cached with probability
 * exactly b_j, and at most one object per row (so at most K) is cached.
 */
class PbpSampler {
public:
    explicit PbpSampler(const PlacementPolicy& policy) : pieces_(policy.size())
    {
        policy.validate();
        const double rows = static_cast<double>(policy.capacity);
        double cursor = 0.0;
        for (std::size_t j = policy.size(); j-- > 0;) {
            const double b = policy[j];
            if (b <= 0.0)
                continue;
            const double start = cursor;
            const double end = std::min(cursor + b, rows);
            const double row = std::min(std::floor(start), rows - 1.0);
            Pieces& p = pieces_[j];
            p.first_lo = start - row;
            p.first_hi = std::min(end - row, 1.0);
            if (end > row + 1.0)
                p.second_hi = end - row - 1.0;
            cursor = end;
        }
    }

    /// Whether object j is in the inventory selected by u.
    bool contains(std::size_t j, double u) const
    {
        const Pieces& p = pieces_[j];
        return (u >= p.first_lo && u < p.first_hi) || u < p.second_hi;
    }

    CacheInventory inventory(double u) const
    {
        CacheInventory inv;
        for (std::size_t j = 0; j < pieces_.size(); ++j)
            if (contains(j, u))
                inv.objects.push_back(j);
        return inv;
    }

    CacheInventory sample(RandomStream& rng) const { return inventory(rng.uniform()); }

private:
    // Covered part of [0, 1): [first_lo, first_hi) in the segment's first row
    // and [0, second_hi) in the following row.
    struct Pieces {
        double first_lo = 0.0;
        double first_hi = 0.0;
        double second_hi = 0.0;
    };
    std::vector<Pieces> pieces_;
};

inline CacheInventory sample_inventory(const PlacementPolicy& policy, RandomStream& rng)
{
    return PbpSampler(policy).sample(rng);
}

/// CSV with header j,popularity,marginal; j is 1-based.
inline void write_policy_csv(std::ostream& out, const content::PopularityLaw& popularity,
                             const PlacementPolicy& policy)
{
    out << "j,popularity,marginal\n";
    for (std::size_t j = 0; j < policy.size(); ++j)
        out << (j + 1) << ',' << format_number(popularity[j]) << ','
            << format_number(policy[j]) << '\n';
}

} // namespace d2dcache::placement
