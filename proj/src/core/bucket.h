// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_CORE_BUCKET_H
#define FEELAB_CORE_BUCKET_H

#include <core/types.h>

#include <cstddef>
#include <vector>

namespace feelab {

enum class BucketKind {
    IntegerCeil, // scale u = ceil(r), clamped to [u_min, u_max]
    Geometric,   // boundaries r_min * ratio^i
};

/**
 * Discretization of the feerate axis. Integer-ceil is the coarse scheme used
 * by the flow estimator (u_min=1, u_max=1000); geometric 5% buckets serve the
 * decayed statistics and the mempool state vector.
 *
 * Integer-ceil bucket i covers (u-1, u]; geometric bucket i covers
 * [r_min*ratio^i, r_min*ratio^(i+1)). Feerates below the first boundary fall
 * into bucket 0 and feerates above r_max clamp to the last bucket. Negative
 * feerates are rejected.
 */
class BucketScheme {
public:
    static BucketScheme integer_ceil(int64_t u_min = 1, int64_t u_max = 1000);
    static BucketScheme geometric(double r_min = 1.0, double r_max = 10000.0, double ratio = 1.05);

    BucketKind kind() const { return m_kind; }
    size_t bucket_count() const { return m_count; }
    double r_min() const { return m_r_min; }
    double r_max() const { return m_r_max; }
    double ratio() const { return m_ratio; }

    /** 0-based bucket index; throws InvalidInput on negative feerate. */
    size_t index_of(double feerate) const;

    /** Integer scale u for the integer-ceil scheme (index + u_min). */
    int64_t scale_of(size_t index) const { return m_u_min + static_cast<int64_t>(index); }

    double lower_bound(size_t index) const; // exclusive (except bucket 0 which starts at 0)
    double upper_bound(size_t index) const; // inclusive

    bool operator==(const BucketScheme&) const = default;

private:
    BucketKind m_kind{BucketKind::IntegerCeil};
    int64_t m_u_min{1};
    int64_t m_u_max{1000};
    double m_r_min{1.0};
    double m_r_max{10000.0};
    double m_ratio{1.05};
    size_t m_count{1000};
    std::vector<double> m_boundaries; // geometric only: boundaries[i] = r_min * ratio^i
};

} // namespace feelab

#endif // FEELAB_CORE_BUCKET_H
