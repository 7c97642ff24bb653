#include "equilex/sequence_source.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "equilex/errors.hpp"

namespace equilex {

SequenceSource SequenceSource::unit_basis(std::size_t dim) {
  if (dim < 2) throw Error(ErrorKind::kInvalidArgument, "unit basis needs dim >= 2");
  SequenceSource s;
  s.kind_ = SourceKind::kUnitBasis;
  s.dim_ = dim;
  s.max_index_ = dim - 1;
  s.label_ = "unit-basis";
  s.generate_ = std::make_shared<const Generator>(
      [dim](std::size_t i) { return Point::basis(dim, i); });
  return s;
}

SequenceSource SequenceSource::perturbed_basis(std::size_t dim, double beta) {
  if (dim < 2) throw Error(ErrorKind::kInvalidArgument, "perturbed basis needs dim >= 2");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "perturbed basis needs 0 < beta < 1");
  }
  SequenceSource s;
  s.kind_ = SourceKind::kPerturbedBasis;
  s.dim_ = dim;
  s.max_index_ = dim - 1;
  s.beta_ = beta;
  s.label_ = "perturbed-basis";
  s.generate_ = std::make_shared<const Generator>([dim, beta](std::size_t i) {
    Point p = Point::basis(dim, i);
    p[0] = std::pow(beta, static_cast<double>(i));
    return p;
  });
  return s;
}

SequenceSource SequenceSource::block(std::size_t dim, std::size_t block_size,
                                     BlockProfile profile) {
  if (block_size == 0) throw Error(ErrorKind::kInvalidArgument, "block size must be positive");
  if (dim < 1 + block_size) {
    throw Error(ErrorKind::kInvalidArgument, "dimension too small for one block");
  }
  std::vector<double> weights(block_size, 1.0);
  if (profile == BlockProfile::kGeometric) {
    for (std::size_t m = 1; m < block_size; ++m) weights[m] = weights[m - 1] * 0.5;
  }
  double s2 = 0.0;
  for (double w : weights) s2 += w * w;
  for (double& w : weights) w /= std::sqrt(s2);

  SequenceSource s;
  s.kind_ = SourceKind::kBlock;
  s.dim_ = dim;
  s.max_index_ = (dim - 1) / block_size;
  s.block_size_ = block_size;
  s.label_ = "block";
  s.generate_ = std::make_shared<const Generator>(
      [dim, block_size, weights = std::move(weights)](std::size_t i) {
        Point p(dim);
        const std::size_t first = 1 + (i - 1) * block_size;
        for (std::size_t m = 0; m < block_size; ++m) p[first + m] = weights[m];
        return p;
      });
  return s;
}

SequenceSource SequenceSource::composed(std::size_t dim, std::size_t max_index,
                                        Generator generate, std::string label) {
  if (!generate) throw Error(ErrorKind::kInvalidArgument, "empty generator");
  SequenceSource s;
  s.kind_ = SourceKind::kComposed;
  s.dim_ = dim;
  s.max_index_ = max_index;
  s.label_ = std::move(label);
  s.generate_ = std::make_shared<const Generator>(std::move(generate));
  return s;
}

Point SequenceSource::operator()(std::size_t index) const {
  if (index == 0 || index > max_index_) {
    std::ostringstream os;
    os << label_ << ": index " << index << " outside [1, " << max_index_ << "]";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  return (*generate_)(index);
}

std::string to_string(BlockProfile profile) {
  return profile == BlockProfile::kFlat ? "flat" : "geometric";
}

BlockProfile parse_block_profile(const std::string& name) {
  if (name == "flat") return BlockProfile::kFlat;
  if (name == "geometric") return BlockProfile::kGeometric;
  throw Error(ErrorKind::kInvalidArgument, "unknown block profile '" + name + "'");
}

bool semi_normalized(const SequenceSource& source, const NormOracle& oracle,
                     std::size_t first, std::size_t last) {
  for (std::size_t i = first; i <= last; ++i) {
    const double n = norm(oracle, source(i));
    if (n < 0.5 || n > 2.0) return false;
  }
  return true;
}

}  // namespace equilex
