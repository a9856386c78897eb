// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fftw3.h>

#include <complex>
#include <cstdint>
#include <mutex>
#include <span>
#include <vector>

#include "lbmult/error.hpp"

namespace lbmult {

namespace detail {
// FFTW's planner is not reentrant; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace detail

/// In-place multidimensional complex DFT owning its buffer and FFTW plan.
///
/// sign = FFTW_FORWARD computes sum_k x_k e^{-2 pi i jk/N}; FFTW_BACKWARD uses e^{+...}.
/// Neither direction is normalized. Plans are built with FFTW_ESTIMATE so results
/// are reproducible run to run.
class FftPlan {
 public:
  FftPlan(std::vector<int> shape, int sign) : shape_(std::move(shape)) {
    size_ = 1;
    for (int s : shape_) {
      if (s < 1) throw InvalidArgument("FftPlan: non-positive extent");
      size_ *= s;
    }
    if (size_ > (std::int64_t{1} << 28)) throw NumericalFailure("FftPlan: transform too large");
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<size_t>(size_)));
    if (!buf_) throw NumericalFailure("FftPlan: allocation failed");
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan_ = fftw_plan_dft(static_cast<int>(shape_.size()), shape_.data(), buf_, buf_, sign, FFTW_ESTIMATE);
    if (!plan_) {
      fftw_free(buf_);
      throw NumericalFailure("FftPlan: planning failed");
    }
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  ~FftPlan() {
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(buf_);
  }

  std::span<std::complex<double>> data() {
    return {reinterpret_cast<std::complex<double>*>(buf_), static_cast<size_t>(size_)};
  }

  void zero() {
    for (auto& v : data()) v = {};
  }

  void execute() { fftw_execute(plan_); }

  std::int64_t size() const { return size_; }
  const std::vector<int>& shape() const { return shape_; }

 private:
  std::vector<int> shape_;
  std::int64_t size_ = 0;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

inline std::int64_t positive_mod(std::int64_t a, std::int64_t p) {
  const std::int64_t r = a % p;
  return r < 0 ? r + p : r;
}

}  // namespace lbmult
