#include "narr/vector_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "narr/error.hpp"

namespace narr {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("vector length mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return std::sqrt(acc);
}

bool is_zero(std::span<const double> a) noexcept {
  return std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine of a zero vector is undefined");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

Vector normalized(std::span<const double> a) {
  const double n = l2_norm(a);
  if (n == 0.0) throw ValidationError("cannot normalize a zero vector");
  Vector out(a.begin(), a.end());
  for (double& v : out) v /= n;
  return out;
}

Vector mean_vector(std::span<const Vector> vs) {
  if (vs.empty()) throw ValidationError("mean of an empty vector set");
  Vector out(vs.front().size(), 0.0);
  for (const auto& v : vs) {
    require_same_length(out, v);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  const auto n = static_cast<double>(vs.size());
  for (double& v : out) v /= n;
  return out;
}

}  // namespace narr
