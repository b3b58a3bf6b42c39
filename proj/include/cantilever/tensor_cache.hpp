#pragma once

#include <filesystem>
#include <optional>

#include "cantilever/assembly.hpp"

namespace cantilever {

/// Assembled tensors depend only on these; a cached file is used only on an exact match.
struct TensorCacheKey {
  int n_modes = 0;
  double length = 0.0;
  int panels = 0;
  int points_per_panel = 0;

  bool operator==(const TensorCacheKey&) const = default;
};

std::filesystem::path tensor_cache_file(const std::filesystem::path& dir,
                                        const TensorCacheKey& key);

/// Cached operators (parameters left at their defaults), or nullopt on a miss or mismatch.
std::optional<DiscreteOperators> load_tensors(const std::filesystem::path& dir,
                                              const TensorCacheKey& key);

void store_tensors(const std::filesystem::path& dir, const TensorCacheKey& key,
                   const DiscreteOperators& ops);

/// Assembles, going through the cache directory when one is given.
DiscreteOperators assemble_cached(const ModeBasis& basis, const QuadratureContext& quad,
                                  const BeamParameters& params,
                                  const std::optional<std::filesystem::path>& cache_dir);

}  // namespace cantilever
