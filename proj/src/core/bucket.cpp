// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <core/bucket.h>

#include <core/errors.h>

#include <algorithm>
#include <cmath>

namespace feelab {

BucketScheme BucketScheme::integer_ceil(int64_t u_min, int64_t u_max)
{
    if (u_min < 1 || u_max < u_min) throw InvalidInput("BucketScheme: need 1 <= u_min <= u_max");
    BucketScheme s;
    s.m_kind = BucketKind::IntegerCeil;
    s.m_u_min = u_min;
    s.m_u_max = u_max;
    s.m_r_min = static_cast<double>(u_min);
    s.m_r_max = static_cast<double>(u_max);
    s.m_count = static_cast<size_t>(u_max - u_min + 1);
    return s;
}

BucketScheme BucketScheme::geometric(double r_min, double r_max, double ratio)
{
    if (!(r_min > 0.0) || !(r_max > r_min) || !(ratio > 1.0))
        throw InvalidInput("BucketScheme: need 0 < r_min < r_max and ratio > 1");
    BucketScheme s;
    s.m_kind = BucketKind::Geometric;
    s.m_r_min = r_min;
    s.m_r_max = r_max;
    s.m_ratio = ratio;
    s.m_u_min = 0;
    // boundaries[i] = r_min * ratio^i, up to the first one at or above r_max;
    // bucket i covers [boundaries[i], boundaries[i+1])
    for (int i = 0;; ++i) {
        const double b = r_min * std::pow(ratio, i);
        s.m_boundaries.push_back(b);
        if (b >= r_max) break;
    }
    s.m_count = s.m_boundaries.size() - 1;
    s.m_u_max = static_cast<int64_t>(s.m_count) - 1;
    return s;
}

size_t BucketScheme::index_of(double feerate) const
{
    if (feerate < 0.0 || std::isnan(feerate))
        throw InvalidInput("BucketScheme: negative feerate " + std::to_string(feerate));
    if (m_kind == BucketKind::IntegerCeil) {
        const double scale = std::ceil(feerate);
        const int64_t u = std::clamp(static_cast<int64_t>(scale), m_u_min, m_u_max);
        return static_cast<size_t>(u - m_u_min);
    }
    // smallest i with boundaries[i + 1] > feerate
    auto it = std::upper_bound(m_boundaries.begin() + 1, m_boundaries.end(), feerate);
    if (it == m_boundaries.end()) return m_count - 1; // above r_max: clamp
    return static_cast<size_t>(it - m_boundaries.begin()) - 1;
}

double BucketScheme::lower_bound(size_t index) const
{
    if (m_kind == BucketKind::IntegerCeil) {
        return index == 0 ? 0.0 : static_cast<double>(m_u_min + static_cast<int64_t>(index) - 1);
    }
    return index == 0 ? 0.0 : m_boundaries[index];
}

double BucketScheme::upper_bound(size_t index) const
{
    if (m_kind == BucketKind::IntegerCeil) return static_cast<double>(m_u_min + static_cast<int64_t>(index));
    return m_boundaries[index + 1];
}

} // namespace feelab
