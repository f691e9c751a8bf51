#ifndef HUBMM_DENOISE_HPP
#define HUBMM_DENOISE_HPP

#include "hubmm/dictionary.hpp"
#include "hubmm/hubniht.hpp"
#include "hubmm/image.hpp"

#include <cstddef>
#include <vector>

namespace hubmm {

struct PatchGrid {
  std::size_t patch_size = 8;
  std::size_t stride = 2;

  void validate() const;
};

// Top-left window offsets along one axis: 0, stride, 2 stride, ... while the
// window fits. Empty when extent < patch_size.
std::vector<std::size_t> window_origins(std::size_t extent, const PatchGrid& grid);

// Number of windows covering each pixel, row-major. Zero marks pixels left
// uncovered by the stride (they are copied through).
std::vector<unsigned> overlap_counts(std::size_t width, std::size_t height, const PatchGrid& grid);

struct DenoiseResult {
  GrayImage image;
  std::size_t patches = 0;
  std::size_t max_support = 0; // largest ||beta||_0 over all patch codes
  std::size_t unconverged = 0;
};

// Sparse-codes every window (mean removed) against the dictionary with
// budget k, then averages the overlapping reconstructions. Patch fits run
// on `threads` workers; accumulation always follows raster order of the
// windows so the output does not depend on the thread count.
DenoiseResult denoise(const GrayImage& img, const Dictionary& dict, const PatchGrid& grid,
                      Eigen::Index k, const SolverConfig& cfg, unsigned threads = 1);

GrayImage denoise_image(const GrayImage& img, const Dictionary& dict, const PatchGrid& grid,
                        Eigen::Index k, const SolverConfig& cfg, unsigned threads = 1);

} // namespace hubmm

#endif // HUBMM_DENOISE_HPP
