#ifndef HUBMM_DICTIONARY_HPP
#define HUBMM_DICTIONARY_HPP

#include "hubmm/linalg.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>

namespace hubmm {

// Overcomplete patch dictionary. Each column is one atom: a patch of
// patch_size x patch_size pixels flattened row-major, with unit l2 norm.
struct Dictionary {
  std::size_t patch_size = 0;
  DenseMatrix atoms;

  Eigen::Index atom_dim() const { return atoms.rows(); }
  Eigen::Index n_atoms() const { return atoms.cols(); }
};

enum class DictionaryKind { DctHaarSpike, FromFile };

// Orthonormal 2-D DCT-II basis, 2-D Haar basis and the coordinate spikes,
// concatenated in that order: 3 d atoms for d = patch_size^2. patch_size
// must be a power of two (Haar block) and at least 2.
Dictionary build_dictionary(std::size_t patch_size);

Dictionary build_dictionary(std::size_t patch_size, DictionaryKind kind,
                            const std::filesystem::path& file = {});

// Text format: first line "d p", then d rows of p reals. Columns are
// normalized on load; d must be a perfect square.
Dictionary read_dictionary(std::istream& in);
Dictionary load_dictionary(const std::filesystem::path& path);

// Rows are the orthonormal 1-D basis vectors.
DenseMatrix dct_basis(std::size_t n);
DenseMatrix haar_basis(std::size_t n);

} // namespace hubmm

#endif // HUBMM_DICTIONARY_HPP
