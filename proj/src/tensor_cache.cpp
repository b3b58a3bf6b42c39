#include "cantilever/tensor_cache.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "cantilever/error.hpp"

namespace cantilever {

namespace {

constexpr char kMagic[8] = {'C', 'T', 'L', 'V', 'T', 'N', 'S', '1'};

template <typename T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

bool get_block(std::istream& in, std::vector<double>& data) {
  return static_cast<bool>(
      in.read(reinterpret_cast<char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double))));
}

}  // namespace

std::filesystem::path tensor_cache_file(const std::filesystem::path& dir,
                                        const TensorCacheKey& key) {
  std::ostringstream name;
  name << "tensors_n" << key.n_modes << "_L" << std::hex << std::bit_cast<std::uint64_t>(key.length)
       << std::dec << "_p" << key.panels << "_g" << key.points_per_panel << ".bin";
  return dir / name.str();
}

std::optional<DiscreteOperators> load_tensors(const std::filesystem::path& dir,
                                              const TensorCacheKey& key) {
  std::ifstream in(tensor_cache_file(dir, key), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    return std::nullopt;
  TensorCacheKey stored;
  std::uint64_t length_bits = 0;
  if (!get(in, stored.n_modes) || !get(in, length_bits) || !get(in, stored.panels) ||
      !get(in, stored.points_per_panel))
    return std::nullopt;
  stored.length = std::bit_cast<double>(length_bits);
  if (!(stored == key)) return std::nullopt;

  const int n = key.n_modes;
  DiscreteOperators ops;
  std::vector<double> kappa4(n);
  ops.S = Tensor4(n);
  ops.I = Tensor4(n);
  if (!get(in, ops.S_asymmetry) || !get(in, ops.I_asymmetry) || !get_block(in, kappa4) ||
      !get_block(in, ops.S.data()) || !get_block(in, ops.I.data()))
    return std::nullopt;
  ops.kappa4 = Eigen::Map<Eigen::VectorXd>(kappa4.data(), n);
  return ops;
}

void store_tensors(const std::filesystem::path& dir, const TensorCacheKey& key,
                   const DiscreteOperators& ops) {
  std::filesystem::create_directories(dir);
  const auto final_path = tensor_cache_file(dir, key);
  auto tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write tensor cache in " + dir.string());
    out.write(kMagic, sizeof(kMagic));
    put(out, key.n_modes);
    put(out, std::bit_cast<std::uint64_t>(key.length));
    put(out, key.panels);
    put(out, key.points_per_panel);
    put(out, ops.S_asymmetry);
    put(out, ops.I_asymmetry);
    out.write(reinterpret_cast<const char*>(ops.kappa4.data()),
              static_cast<std::streamsize>(ops.kappa4.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(ops.S.data().data()),
              static_cast<std::streamsize>(ops.S.data().size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(ops.I.data().data()),
              static_cast<std::streamsize>(ops.I.data().size() * sizeof(double)));
  }
  std::filesystem::rename(tmp, final_path);
}

DiscreteOperators assemble_cached(const ModeBasis& basis, const QuadratureContext& quad,
                                  const BeamParameters& params,
                                  const std::optional<std::filesystem::path>& cache_dir) {
  if (!cache_dir) return assemble(basis, quad, params);
  const TensorCacheKey key{basis.size(), basis.length(), quad.panels, quad.points_per_panel};
  if (auto cached = load_tensors(*cache_dir, key)) return with_parameters(std::move(*cached), params);
  DiscreteOperators ops = assemble(basis, quad, params);
  static std::mutex store_mutex;  // concurrent sweep runs may share one cache directory
  const std::lock_guard lock(store_mutex);
  store_tensors(*cache_dir, key, ops);
  return ops;
}

}  // namespace cantilever
