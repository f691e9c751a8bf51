#include "hubmm/dictionary.hpp"

#include "hubmm/errors.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <string>

namespace hubmm {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Atom (u, v) of a separable basis is the outer product of rows u and v,
// flattened row-major.
void put_separable(const DenseMatrix& basis, DenseMatrix& atoms, Eigen::Index first_col) {
  const auto n = basis.rows();
  Eigen::Index col = first_col;
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v, ++col)
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
          atoms(r * n + c, col) = basis(u, r) * basis(v, c);
}

} // namespace

DenseMatrix dct_basis(std::size_t n) {
  DenseMatrix b(n, n);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
    for (std::size_t i = 0; i < n; ++i)
      b(k, i) = s * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * nn));
  }
  return b;
}

DenseMatrix haar_basis(std::size_t n) {
  if (!is_power_of_two(n))
    throw std::invalid_argument("Haar basis needs a power-of-two size, got " + std::to_string(n));
  DenseMatrix h = DenseMatrix::Ones(1, 1);
  const double r = 1.0 / std::numbers::sqrt2;
  while (static_cast<std::size_t>(h.rows()) < n) {
    const auto m = h.rows();
    DenseMatrix next = DenseMatrix::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        next(i, 2 * j) = r * h(i, j);
        next(i, 2 * j + 1) = r * h(i, j);
      }
    for (Eigen::Index i = 0; i < m; ++i) {
      next(m + i, 2 * i) = r;
      next(m + i, 2 * i + 1) = -r;
    }
    h = std::move(next);
  }
  return h;
}

Dictionary build_dictionary(std::size_t patch_size) {
  if (patch_size < 2)
    throw std::invalid_argument("patch size must be at least 2");
  const auto d = static_cast<Eigen::Index>(patch_size * patch_size);
  Dictionary dict{patch_size, DenseMatrix::Zero(d, 3 * d)};
  put_separable(dct_basis(patch_size), dict.atoms, 0);
  put_separable(haar_basis(patch_size), dict.atoms, d);
  dict.atoms.rightCols(d).setIdentity();
  return dict;
}

Dictionary build_dictionary(std::size_t patch_size, DictionaryKind kind,
                            const std::filesystem::path& file) {
  if (kind == DictionaryKind::DctHaarSpike)
    return build_dictionary(patch_size);
  Dictionary dict = load_dictionary(file);
  if (dict.patch_size != patch_size)
    throw DimensionMismatch("dictionary '" + file.string() + "' has patch size " +
                            std::to_string(dict.patch_size) + ", expected " +
                            std::to_string(patch_size));
  return dict;
}

Dictionary read_dictionary(std::istream& in) {
  long d = 0, p = 0;
  if (!(in >> d >> p) || d < 1 || p < 1)
    throw FormatError("dictionary: expected header 'd p' with positive sizes");
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
  if (side * side != static_cast<std::size_t>(d) || side < 2)
    throw FormatError("dictionary: atom dimension " + std::to_string(d) +
                      " is not a square patch");
  DenseMatrix atoms(d, p);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < p; ++j)
      if (!(in >> atoms(i, j)) || !std::isfinite(atoms(i, j)))
        throw FormatError("dictionary: bad value at row " + std::to_string(i + 1) + ", column " +
                          std::to_string(j + 1));
  for (long j = 0; j < p; ++j) {
    const double norm = atoms.col(j).norm();
    if (!(norm > 0.0))
      throw FormatError("dictionary: atom " + std::to_string(j + 1) + " is zero");
    atoms.col(j) /= norm;
  }
  return Dictionary{side, std::move(atoms)};
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw FormatError("cannot open dictionary '" + path.string() + "'");
  try {
    return read_dictionary(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

} // namespace hubmm
