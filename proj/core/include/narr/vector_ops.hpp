#pragma once

#include <span>
#include <vector>

namespace narr {

using Vector = std::vector<double>;

// All binary ops throw ValidationError on length mismatch.
double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
bool is_zero(std::span<const double> a) noexcept;

/// Cosine similarity in [-1, 1]; throws ValidationError on a zero vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Copy of `a` scaled to unit L2 norm; throws ValidationError on a zero vector.
Vector normalized(std::span<const double> a);

/// Componentwise mean of equally sized vectors; throws on an empty set.
Vector mean_vector(std::span<const Vector> vs);

}  // namespace narr
