#include "lambdares/lattice_spectrum.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lres {
namespace {

class Lattice {
 public:
  Lattice(const Potential2D& v, const LatticeOptions& opt) {
    h_ = v.cell();
    const int pad = std::max(1, static_cast<int>(std::ceil((opt.box_half_width - v.half_width()) / h_)));
    m_ = v.n() + 2 * pad;
    diag_.assign(static_cast<size_t>(m_) * m_, 4.0 / (h_ * h_));
    min_v_ = 0.0;
    for (int iy = 0; iy < v.n(); ++iy) {
      for (int ix = 0; ix < v.n(); ++ix) {
        const double val = v.at(ix, iy);
        diag_[index(ix + pad, iy + pad)] += val;
        min_v_ = std::min(min_v_, val);
      }
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(diag_.size() * 3);
    const double off = -1.0 / (h_ * h_);
    for (int iy = 0; iy < m_; ++iy) {
      for (int ix = 0; ix < m_; ++ix) {
        const int k = index(ix, iy);
        trip.emplace_back(k, k, diag_[k]);
        // lower triangle only
        if (ix > 0) trip.emplace_back(k, index(ix - 1, iy), off);
        if (iy > 0) trip.emplace_back(k, index(ix, iy - 1), off);
      }
    }
    a_.resize(m_ * m_, m_ * m_);
    a_.setFromTriplets(trip.begin(), trip.end());
    shifted_ = a_;
    solver_.analyzePattern(shifted_);
  }

  int count_below(double shift) {
    for (int k = 0; k < shifted_.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(shifted_, k); it; ++it) {
        if (it.row() == it.col()) it.valueRef() = diag_[it.row()] - shift;
      }
    }
    solver_.factorize(shifted_);
    if (solver_.info() != Eigen::Success) throw std::runtime_error("lattice LDL^T factorization failed");
    const auto d = solver_.vectorD();
    return static_cast<int>((d.array() < 0.0).count());
  }

  double min_v() const { return min_v_; }

 private:
  int index(int ix, int iy) const { return iy * m_ + ix; }

  double h_ = 0.0;
  int m_ = 0;
  double min_v_ = 0.0;
  std::vector<double> diag_;
  Eigen::SparseMatrix<double> a_, shifted_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> solver_;
};

}  // namespace

int lattice_count_below(const Potential2D& v, double shift, const LatticeOptions& opt) {
  if (v.n() == 0) return 0;
  Lattice lat(v, opt);
  return lat.count_below(shift);
}

std::vector<double> lattice_negative_eigenvalues(const Potential2D& v, double tol, const LatticeOptions& opt) {
  if (v.n() == 0) return {};
  Lattice lat(v, opt);
  const int total = lat.count_below(0.0);
  std::vector<double> out;
  for (int e = 0; e < total; ++e) {
    // e-th eigenvalue: least t with count_below(t) > e
    double lo = lat.min_v() - 1.0, hi = 0.0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (lat.count_below(mid) > e) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

}  // namespace lres
