#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace r1tc {

using Index = Eigen::Index;

/// A d-tuple of coordinates. Stored 0-based; the text formats and printing use
/// 1-based coordinates.
struct IndexTuple {
  std::vector<int> coords;

  IndexTuple() = default;
  explicit IndexTuple(std::vector<int> c) : coords(std::move(c)) {}

  /// Builds a tuple from 1-based coordinates, e.g. from_one_based({1, 2, 2}).
  static IndexTuple from_one_based(const std::vector<int>& one_based);

  int order() const { return static_cast<int>(coords.size()); }
  int operator[](int k) const { return coords[k]; }
  int& operator[](int k) { return coords[k]; }

  std::string to_string() const;  // "(1,2,2)"

  friend bool operator==(const IndexTuple&, const IndexTuple&) = default;
  friend auto operator<=>(const IndexTuple& a, const IndexTuple& b) {
    return a.coords <=> b.coords;
  }
};

std::ostream& operator<<(std::ostream& os, const IndexTuple& t);

/// Dimensions n_1 x ... x n_d. Linearization is row-major, last axis fastest,
/// so ascending linear index coincides with lexicographic tuple order.
class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<int> dims);

  int order() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_[k]; }
  const std::vector<int>& dims() const { return dims_; }
  Index numel() const { return numel_; }
  int dim_sum() const { return dim_sum_; }
  /// Offset of axis k's block inside an indicator vector of length dim_sum().
  int block_offset(int k) const { return offsets_[k]; }
  Index stride(int k) const { return strides_[k]; }

  bool contains(const IndexTuple& t) const;
  Index linearize(const IndexTuple& t) const;
  IndexTuple delinearize(Index cell) const;
  int coord(Index cell, int k) const {
    return static_cast<int>((cell / strides_[k]) % dims_[k]);
  }
  /// Cell with coordinate k replaced by value v.
  Index with_coord(Index cell, int k, int v) const {
    return cell + (v - coord(cell, k)) * strides_[k];
  }

  std::string to_string() const;  // "3x3x2"

  friend bool operator==(const Shape& a, const Shape& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<Index> strides_;
  std::vector<int> offsets_;
  Index numel_ = 0;
  int dim_sum_ = 0;
};

/// Parses "3,3,2" or "3x3x2".
Shape parse_shape(const std::string& text);

class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape);
  DenseTensor(Shape shape, Eigen::VectorXd values);

  const Shape& shape() const { return shape_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double operator()(Index cell) const { return values_[cell]; }
  double& operator()(Index cell) { return values_[cell]; }
  double at(const IndexTuple& t) const { return values_[shape_.linearize(t)]; }

  double norm() const { return values_.norm(); }

  /// Mode-k unfolding, n_k rows by N / n_k columns.
  Eigen::MatrixXd unfold(int k) const;

 private:
  Shape shape_;
  Eigen::VectorXd values_;
};

/// Observation mask: sorted, duplicate-free cells of a shape.
class Mask {
 public:
  Mask() = default;
  explicit Mask(Shape shape) : shape_(std::move(shape)) {}
  Mask(Shape shape, std::vector<Index> cells);
  Mask(Shape shape, const std::vector<IndexTuple>& tuples);

  static Mask full(const Shape& shape);

  const Shape& shape() const { return shape_; }
  const std::vector<Index>& cells() const { return cells_; }
  Index size() const { return static_cast<Index>(cells_.size()); }
  bool empty() const { return cells_.empty(); }
  IndexTuple tuple(Index i) const { return shape_.delinearize(cells_[i]); }
  std::vector<IndexTuple> tuples() const;
  bool contains(Index cell) const;
  /// Dense membership flags, length numel().
  std::vector<char> membership() const;

  friend bool operator==(const Mask& a, const Mask& b) {
    return a.shape_ == b.shape_ && a.cells_ == b.cells_;
  }

 private:
  Shape shape_;
  std::vector<Index> cells_;
};

/// Observed values aligned with mask.cells().
struct ObservedTensor {
  Mask mask;
  Eigen::VectorXd values;

  ObservedTensor() = default;
  ObservedTensor(Mask m, Eigen::VectorXd v);

  const Shape& shape() const { return mask.shape(); }
  /// Throws std::invalid_argument if any value is zero.
  void require_nonzero() const;
};

/// Restricts a dense tensor to the cells of a mask.
ObservedTensor restrict(const DenseTensor& t, const Mask& mask);

struct RankOneFactors {
  std::vector<Eigen::VectorXd> factors;

  Shape shape() const;
};

/// T_{i_1..i_d} = prod_k u^(k)_{i_k}.
DenseTensor expand(const RankOneFactors& f);
DenseTensor expand(const RankOneFactors& f, const Shape& shape);

/// Best rank-one approximation by alternating least squares, started from the
/// leading left singular vector of every unfolding. The scale sits in the last
/// factor; all others have unit norm.
RankOneFactors rank_one_approximation(const DenseTensor& t, int sweeps = 5);

}  // namespace r1tc
