#include "r1tc/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace r1tc {

IndexTuple IndexTuple::from_one_based(const std::vector<int>& one_based) {
  std::vector<int> c(one_based.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (one_based[k] < 1) throw std::invalid_argument("1-based coordinate below 1");
    c[k] = one_based[k] - 1;
  }
  return IndexTuple(std::move(c));
}

std::string IndexTuple::to_string() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const IndexTuple& t) {
  os << '(';
  for (int k = 0; k < t.order(); ++k) {
    if (k) os << ',';
    os << t[k] + 1;
  }
  return os << ')';
}

Shape::Shape(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("shape must have order >= 1");
  if (dims_.size() > 64) throw std::invalid_argument("shape order above 64");
  const int d = order();
  strides_.assign(d, 1);
  offsets_.assign(d, 0);
  numel_ = 1;
  dim_sum_ = 0;
  for (int k = d - 1; k >= 0; --k) {
    if (dims_[k] < 1)
      throw std::invalid_argument("shape dimensions must be positive");
    strides_[k] = numel_;
    if (numel_ > (Index(1) << 40) / dims_[k])
      throw std::invalid_argument("shape too large");
    numel_ *= dims_[k];
  }
  for (int k = 0; k < d; ++k) {
    offsets_[k] = dim_sum_;
    dim_sum_ += dims_[k];
  }
}

bool Shape::contains(const IndexTuple& t) const {
  if (t.order() != order()) return false;
  for (int k = 0; k < order(); ++k)
    if (t[k] < 0 || t[k] >= dims_[k]) return false;
  return true;
}

Index Shape::linearize(const IndexTuple& t) const {
  if (!contains(t))
    throw std::out_of_range("tuple " + t.to_string() + " outside shape " +
                            to_string());
  Index cell = 0;
  for (int k = 0; k < order(); ++k) cell += t[k] * strides_[k];
  return cell;
}

IndexTuple Shape::delinearize(Index cell) const {
  if (cell < 0 || cell >= numel_) throw std::out_of_range("cell out of range");
  std::vector<int> c(order());
  for (int k = 0; k < order(); ++k) c[k] = coord(cell, k);
  return IndexTuple(std::move(c));
}

std::string Shape::to_string() const {
  std::string s;
  for (int k = 0; k < order(); ++k) {
    if (k) s += 'x';
    s += std::to_string(dims_[k]);
  }
  return s;
}

Shape parse_shape(const std::string& text) {
  std::vector<int> dims;
  std::string token;
  auto flush = [&] {
    if (token.empty()) throw std::invalid_argument("bad shape: '" + text + "'");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size())
      throw std::invalid_argument("bad shape: '" + text + "'");
    dims.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == 'x' || c == 'X')
      flush();
    else if (c != ' ')
      token += c;
  }
  flush();
  return Shape(std::move(dims));
}

DenseTensor::DenseTensor(Shape shape)
    : shape_(std::move(shape)), values_(Eigen::VectorXd::Zero(shape_.numel())) {}

DenseTensor::DenseTensor(Shape shape, Eigen::VectorXd values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_.numel())
    throw std::invalid_argument("tensor value count does not match shape");
}

Eigen::MatrixXd DenseTensor::unfold(int k) const {
  const Index rows = shape_.dim(k);
  const Index cols = shape_.numel() / rows;
  Eigen::MatrixXd m(rows, cols);
  std::vector<Index> next_col(rows, 0);
  for (Index cell = 0; cell < shape_.numel(); ++cell) {
    const int r = shape_.coord(cell, k);
    m(r, next_col[r]++) = values_[cell];
  }
  return m;
}

Mask::Mask(Shape shape, std::vector<Index> cells)
    : shape_(std::move(shape)), cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  if (std::adjacent_find(cells_.begin(), cells_.end()) != cells_.end())
    throw std::invalid_argument("mask contains duplicate entries");
  if (!cells_.empty() && (cells_.front() < 0 || cells_.back() >= shape_.numel()))
    throw std::out_of_range("mask cell outside shape");
}

Mask::Mask(Shape shape, const std::vector<IndexTuple>& tuples)
    : shape_(std::move(shape)) {
  std::vector<Index> cells;
  cells.reserve(tuples.size());
  for (const auto& t : tuples) cells.push_back(shape_.linearize(t));
  *this = Mask(shape_, std::move(cells));
}

Mask Mask::full(const Shape& shape) {
  std::vector<Index> cells(shape.numel());
  std::iota(cells.begin(), cells.end(), Index(0));
  return Mask(shape, std::move(cells));
}

std::vector<IndexTuple> Mask::tuples() const {
  std::vector<IndexTuple> out;
  out.reserve(cells_.size());
  for (Index c : cells_) out.push_back(shape_.delinearize(c));
  return out;
}

bool Mask::contains(Index cell) const {
  return std::binary_search(cells_.begin(), cells_.end(), cell);
}

std::vector<char> Mask::membership() const {
  std::vector<char> in(shape_.numel(), 0);
  for (Index c : cells_) in[c] = 1;
  return in;
}

ObservedTensor::ObservedTensor(Mask m, Eigen::VectorXd v)
    : mask(std::move(m)), values(std::move(v)) {
  if (values.size() != mask.size())
    throw std::invalid_argument("observed value count does not match mask");
}

void ObservedTensor::require_nonzero() const {
  for (Index i = 0; i < values.size(); ++i)
    if (values[i] == 0.0)
      throw std::invalid_argument("observed value at " +
                                  mask.tuple(i).to_string() +
                                  " is zero; exact completion needs nonzero data");
}

ObservedTensor restrict(const DenseTensor& t, const Mask& mask) {
  if (!(t.shape() == mask.shape()))
    throw std::invalid_argument("restrict: shape mismatch");
  Eigen::VectorXd v(mask.size());
  for (Index i = 0; i < mask.size(); ++i) v[i] = t(mask.cells()[i]);
  return ObservedTensor(mask, std::move(v));
}

Shape RankOneFactors::shape() const {
  std::vector<int> dims;
  for (const auto& u : factors) dims.push_back(static_cast<int>(u.size()));
  return Shape(std::move(dims));
}

DenseTensor expand(const RankOneFactors& f) { return expand(f, f.shape()); }

DenseTensor expand(const RankOneFactors& f, const Shape& shape) {
  if (static_cast<int>(f.factors.size()) != shape.order())
    throw std::invalid_argument("expand: factor count does not match order");
  for (int k = 0; k < shape.order(); ++k)
    if (f.factors[k].size() != shape.dim(k))
      throw std::invalid_argument("expand: factor length mismatch on axis " +
                                  std::to_string(k + 1));
  // Build the product axis by axis: values for the prefix shape, then extend.
  Eigen::VectorXd v = f.factors[0];
  for (int k = 1; k < shape.order(); ++k) {
    const auto& u = f.factors[k];
    Eigen::VectorXd next(v.size() * u.size());
    for (Index i = 0; i < v.size(); ++i)
      next.segment(i * u.size(), u.size()) = v[i] * u;
    v = std::move(next);
  }
  return DenseTensor(shape, std::move(v));
}

RankOneFactors rank_one_approximation(const DenseTensor& t, int sweeps) {
  const Shape& shape = t.shape();
  const int d = shape.order();
  RankOneFactors f;
  for (int k = 0; k < d; ++k) {
    const Eigen::MatrixXd a = t.unfold(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a * a.transpose());
    f.factors.push_back(es.eigenvectors().col(shape.dim(k) - 1));
  }
  std::vector<int> idx(d);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int k = 0; k < d; ++k) {
      // u_k <- t contracted with the other factors, over their squared norms.
      Eigen::VectorXd next = Eigen::VectorXd::Zero(shape.dim(k));
      std::fill(idx.begin(), idx.end(), 0);
      for (Index cell = 0; cell < shape.numel(); ++cell) {
        double p = t(cell);
        for (int l = 0; l < d; ++l)
          if (l != k) p *= f.factors[l][idx[l]];
        next[idx[k]] += p;
        for (int l = d - 1; l >= 0 && ++idx[l] == shape.dim(l); --l) idx[l] = 0;
      }
      double denom = 1.0;
      for (int l = 0; l < d; ++l)
        if (l != k) denom *= f.factors[l].squaredNorm();
      f.factors[k] = denom > 0.0 ? Eigen::VectorXd(next / denom) : next;
    }
    for (int k = 0; k + 1 < d; ++k) {
      const double n = f.factors[k].norm();
      if (n == 0.0) continue;
      f.factors[k] /= n;
      f.factors[d - 1] *= n;
    }
  }
  if (sweeps == 0) {
    // Unit singular vectors only; scale by the projection of t onto them.
    const double c = expand(f, shape).values().dot(t.values());
    f.factors[d - 1] *= c;
  }
  return f;
}

}  // namespace r1tc
