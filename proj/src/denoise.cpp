#include "hubmm/denoise.hpp"

#include "hubmm/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <string>
#include <thread>

namespace hubmm {

namespace {

struct Window {
  std::size_t x;
  std::size_t y;
};

struct PatchCode {
  Vector reconstruction; // includes the patch mean
  std::size_t support = 0;
  bool converged = true;
};

PatchCode code_patch(const GrayImage& img, const Window& w, std::size_t side,
                     const std::shared_ptr<const SparseDesign>& design, Eigen::Index k,
                     const SolverConfig& cfg) {
  const auto d = static_cast<Eigen::Index>(side * side);
  Vector patch(d);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c)
      patch[static_cast<Eigen::Index>(r * side + c)] = img.at(w.x + c, w.y + r);

  PatchCode out;
  if (patch.maxCoeff() == patch.minCoeff()) {
    out.reconstruction = std::move(patch);
    return out;
  }
  const double mean = patch.mean();
  SparseProblem prob(patch.array() - mean, design, k);
  const SparseModel model = fit_sparse(prob, cfg);
  out.reconstruction = reconstruct(prob, model).array() + mean;
  out.support = model.support.size();
  out.converged = model.converged;
  return out;
}

} // namespace

void PatchGrid::validate() const {
  if (patch_size < 2)
    throw std::invalid_argument("patch size must be at least 2");
  if (stride < 1)
    throw std::invalid_argument("stride must be at least 1");
}

std::vector<std::size_t> window_origins(std::size_t extent, const PatchGrid& grid) {
  grid.validate();
  std::vector<std::size_t> out;
  for (std::size_t o = 0; o + grid.patch_size <= extent; o += grid.stride)
    out.push_back(o);
  return out;
}

std::vector<unsigned> overlap_counts(std::size_t width, std::size_t height, const PatchGrid& grid) {
  std::vector<unsigned> counts(width * height, 0);
  const auto xs = window_origins(width, grid);
  for (auto oy : window_origins(height, grid))
    for (auto ox : xs)
      for (std::size_t r = 0; r < grid.patch_size; ++r)
        for (std::size_t c = 0; c < grid.patch_size; ++c)
          ++counts[(oy + r) * width + ox + c];
  return counts;
}

DenoiseResult denoise(const GrayImage& img, const Dictionary& dict, const PatchGrid& grid,
                      Eigen::Index k, const SolverConfig& cfg, unsigned threads) {
  grid.validate();
  cfg.validate();
  const std::size_t side = grid.patch_size;
  if (dict.atom_dim() != static_cast<Eigen::Index>(side * side))
    throw DimensionMismatch("dictionary atoms have dimension " + std::to_string(dict.atom_dim()) +
                            ", patch size " + std::to_string(side) + " needs " +
                            std::to_string(side * side));
  if (img.width() < side || img.height() < side)
    throw DimensionMismatch("image " + std::to_string(img.width()) + "x" +
                            std::to_string(img.height()) + " is smaller than the patch");

  // Atoms are unit norm already.
  const auto design = std::make_shared<const SparseDesign>(dict.atoms, false);

  std::vector<Window> windows;
  const auto xs = window_origins(img.width(), grid);
  for (auto oy : window_origins(img.height(), grid))
    for (auto ox : xs)
      windows.push_back({ox, oy});

  // Accumulate (reconstruction - input) so that exact reconstructions give
  // back the input bit for bit.
  std::vector<double> deviation(img.size(), 0.0);
  std::vector<unsigned> counts(img.size(), 0);

  DenoiseResult result;
  result.patches = windows.size();

  const unsigned workers = std::max(1u, threads);
  const std::size_t chunk = std::max<std::size_t>(256, std::size_t{workers} * 32);
  std::vector<PatchCode> codes;
  for (std::size_t begin = 0; begin < windows.size(); begin += chunk) {
    const std::size_t end = std::min(windows.size(), begin + chunk);
    codes.assign(end - begin, PatchCode{});

    std::atomic<std::size_t> next{begin};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&]() {
      try {
        for (std::size_t i = next++; i < end && !failed; i = next++)
          codes[i - begin] = code_patch(img, windows[i], side, design, k, cfg);
      } catch (...) {
        if (!failed.exchange(true))
          failure = std::current_exception();
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back(work);
    }
    if (failure)
      std::rethrow_exception(failure);

    for (std::size_t i = begin; i < end; ++i) {
      const Window& w = windows[i];
      const PatchCode& code = codes[i - begin];
      result.max_support = std::max(result.max_support, code.support);
      if (!code.converged)
        ++result.unconverged;
      for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c) {
          const std::size_t at = (w.y + r) * img.width() + w.x + c;
          deviation[at] += code.reconstruction[static_cast<Eigen::Index>(r * side + c)] - img.pixels()[at];
          ++counts[at];
        }
    }
  }

  result.image = img;
  auto& out = result.image.pixels();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (counts[i] > 0)
      out[i] = std::clamp(out[i] + deviation[i] / counts[i], 0.0, 1.0);
  return result;
}

GrayImage denoise_image(const GrayImage& img, const Dictionary& dict, const PatchGrid& grid,
                        Eigen::Index k, const SolverConfig& cfg, unsigned threads) {
  return denoise(img, dict, grid, k, cfg, threads).image;
}

} // namespace hubmm
