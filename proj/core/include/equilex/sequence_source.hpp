#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>

#include "equilex/norm_oracle.hpp"
#include "equilex/point.hpp"

namespace equilex {

enum class SourceKind { kUnitBasis, kPerturbedBasis, kBlock, kComposed };

enum class BlockProfile { kFlat, kGeometric };

/// Deterministic generator index -> Point modelling a weakly null sequence.
///
/// Indices are 1-based. Coordinate 0 of the ambient space is reserved as the
/// perturbation direction; basis-like families place element i on coordinate
/// i (or on the i-th block of coordinates), so coordinates of element i vanish
/// pointwise as i grows.
class SequenceSource {
 public:
  using Generator = std::function<Point(std::size_t)>;

  /// Empty source (max_index() == 0); every lookup throws.
  SequenceSource() = default;

  /// z_i = e_i.
  static SequenceSource unit_basis(std::size_t dim);
  /// z_i = e_i + beta^i e_0, 0 < beta < 1.
  static SequenceSource perturbed_basis(std::size_t dim, double beta);
  /// z_i supported on the i-th block of `block_size` coordinates, with unit
  /// Euclidean norm and weights given by `profile`.
  static SequenceSource block(std::size_t dim, std::size_t block_size,
                              BlockProfile profile);
  /// Arbitrary deterministic generator; used for rescaled/differenced
  /// sequences and for hand-built test families.
  static SequenceSource composed(std::size_t dim, std::size_t max_index,
                                 Generator generate, std::string label);

  /// Element at `index`; throws if index is 0 or beyond max_index().
  Point operator()(std::size_t index) const;

  SourceKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t max_index() const noexcept { return max_index_; }
  const std::string& label() const noexcept { return label_; }
  double beta() const noexcept { return beta_; }
  std::size_t block_size() const noexcept { return block_size_; }

 private:

  SourceKind kind_ = SourceKind::kUnitBasis;
  std::size_t dim_ = 0;
  std::size_t max_index_ = 0;
  double beta_ = 0.0;
  std::size_t block_size_ = 1;
  std::string label_;
  std::shared_ptr<const Generator> generate_;
};

std::string to_string(BlockProfile profile);
BlockProfile parse_block_profile(const std::string& name);

/// True iff ‖z_i‖ lies in [1/2, 2] for every i in [first, last].
bool semi_normalized(const SequenceSource& source, const NormOracle& oracle,
                     std::size_t first, std::size_t last);

}  // namespace equilex
