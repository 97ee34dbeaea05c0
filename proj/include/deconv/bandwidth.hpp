#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "empirical.hpp"
#include "estimators.hpp"
#include "freq_grid.hpp"

namespace deconv {

//! Candidate bandwidths h = 1/m for m = 1..floor(sqrt(n)).
struct BandwidthSet
{
  std::size_t m_max;

  static BandwidthSet for_sample(std::size_t n)
  {
    if (n < 1) throw std::invalid_argument("BandwidthSet: n must be >= 1");
    return { static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))) };
  }
};

//! Full-line integral of an even function given on the non-negative half grid.
inline double even_integral(const std::vector<double>& g_half, double step)
{
  double acc = 0.5 * g_half.front() + 0.5 * g_half.back();
  for (std::size_t k = 1; k + 1 < g_half.size(); ++k) acc += g_half[k];
  return 2.0 * step * acc;
}

//! || a FK_{h_ref} - b FK_h ||_{L2}^2 for two hermitian half-curves; the
//! direct route to one fold's loss, kept for cross-checking the expanded
//! accumulator form.
inline double cv_pair_loss(const FreqGrid& grid,
                           const std::vector<cplx>& a_half,
                           const std::vector<cplx>& b_half,
                           KernelKind kind,
                           double h_ref,
                           double h)
{
  std::vector<double> g(grid.half + 1);
  for (std::size_t k = 0; k <= grid.half; ++k) {
    const double u = grid.nonneg(k);
    g[k] = std::norm(a_half[k] * fourier_kernel_value(kind, h_ref, u) -
                     b_half[k] * fourier_kernel_value(kind, h, u));
  }
  return even_integral(g, grid.step);
}

//! Block leave-10-out machinery for the cross-validation loss.  The CF sums
//! are additive over observations, so each fold is assembled from per-block
//! partial sums in O(grid) instead of O(n * grid).  Building the accumulator
//! once makes the per-m loss evaluation a single weighted quadrature.
class CvAccumulator
{
public:
  CvAccumulator(const PanelSample& sample, const FreqGrid& grid, KernelKind kind)
    : grid_(grid)
    , n_full_(sample.n())
  {
    check_panel(sample);
    const std::size_t n_cv = sample.n() - sample.n() % 5;
    if (n_cv < 15)
      throw std::invalid_argument("cv: need at least 15 observations (3 blocks)");
    const std::size_t nb = n_cv / 5;
    n_folds_ = nb - 1;

    // per-block partial sums
    std::vector<HalfSums> blocks(nb);
    for (std::size_t b = 0; b < nb; ++b)
      blocks[b] = accumulate_half_sums(
        std::span(sample.y1).subspan(5 * b, 5),
        std::span(sample.y2).subspan(5 * b, 5), grid);

    HalfSums total;
    total.s.assign(grid.half + 1, cplx(0.0, 0.0));
    total.t.assign(grid.half + 1, cplx(0.0, 0.0));
    total.count = static_cast<double>(n_cv);
    for (const auto& b : blocks)
      for (std::size_t k = 0; k <= grid.half; ++k) {
        total.s[k] += b.s[k];
        total.t[k] += b.t[k];
      }

    const double h_ref = 1.0 / std::sqrt(static_cast<double>(n_full_));
    std::vector<double> fk_ref(grid.half + 1);
    for (std::size_t k = 0; k <= grid.half; ++k)
      fk_ref[k] = fourier_kernel_value(kind, h_ref, grid.nonneg(k));

    a_.assign(grid.half + 1, 0.0);
    c_.assign(grid.half + 1, 0.0);
    b_.assign(grid.half + 1, 0.0);
    std::vector<cplx> s_out(grid.half + 1), t_out(grid.half + 1);
    std::vector<cplx> s_in(grid.half + 1), t_in(grid.half + 1);
    for (std::size_t f = 0; f < n_folds_; ++f) {
      for (std::size_t k = 0; k <= grid.half; ++k) {
        s_out[k] = blocks[f].s[k] + blocks[f + 1].s[k];
        t_out[k] = blocks[f].t[k] + blocks[f + 1].t[k];
        s_in[k] = total.s[k] - s_out[k];
        t_in[k] = total.t[k] - t_out[k];
      }
      const auto held = kotlarski_half_from_sums(grid, s_out, t_out, 10.0);
      const auto kept = kotlarski_half_from_sums(grid, s_in, t_in,
                                                 static_cast<double>(n_cv - 10));
      for (std::size_t k = 0; k <= grid.half; ++k) {
        const cplx ak = held[k] * fk_ref[k];
        a_[k] += std::norm(ak);
        c_[k] += (std::conj(ak) * kept[k]).real();
        b_[k] += std::norm(kept[k]);
      }
    }
  }

  //! average over folds of || phi^N FK_ref - phi^{-N} FK_{1/m} ||_{L2}^2
  double loss(std::size_t m, KernelKind kind) const
  {
    if (m < 1) throw std::invalid_argument("cv loss: m must be >= 1");
    const double h = 1.0 / static_cast<double>(m);
    std::vector<double> g(grid_.half + 1);
    for (std::size_t k = 0; k <= grid_.half; ++k) {
      const double fk = fourier_kernel_value(kind, h, grid_.nonneg(k));
      g[k] = a_[k] - 2.0 * fk * c_[k] + fk * fk * b_[k];
    }
    return even_integral(g, grid_.step) / static_cast<double>(n_folds_);
  }

  std::size_t fold_count() const { return n_folds_; }

private:
  FreqGrid grid_;
  std::size_t n_full_;
  std::size_t n_folds_ = 0;
  std::vector<double> a_, c_, b_;
};

inline double cv_loss(const PanelSample& sample,
                      std::size_t m,
                      const FreqGrid& grid,
                      KernelKind kind = KernelKind::gaussian)
{
  return CvAccumulator(sample, grid, kind).loss(m, kind);
}

struct CvSelection
{
  std::size_t m;
  double h;
};

//! argmin of the fold loss over the bandwidth set, ties broken toward
//! smaller m (the smoother estimate).
inline CvSelection cv_select(const PanelSample& sample,
                             const FreqGrid& grid,
                             KernelKind kind = KernelKind::gaussian)
{
  const CvAccumulator acc(sample, grid, kind);
  const auto set = BandwidthSet::for_sample(sample.n());
  std::size_t best_m = 1;
  double best_loss = acc.loss(1, kind);
  for (std::size_t m = 2; m <= set.m_max; ++m) {
    const double l = acc.loss(m, kind);
    if (l < best_loss) {
      best_loss = l;
      best_m = m;
    }
  }
  return { best_m, 1.0 / static_cast<double>(best_m) };
}

}  // namespace deconv
