#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace fnls::detail {

// Unnormalized complex DFT of a fixed length, backed by FFTW.
//
// Plans are created once per length (FFTW_ESTIMATE, so creation is
// deterministic and never touches the data) and executed through the
// new-array interface, which is safe to call from several threads.
class DftPlan {
 public:
  explicit DftPlan(int n) : n_(n) {
    std::vector<std::complex<double>> in(n), out(n);
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(n, pin, pout, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(n, pin, pout, FFTW_BACKWARD, flags);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw std::runtime_error("FFTW plan creation failed");
    }
  }
  DftPlan(const DftPlan&) = delete;
  DftPlan& operator=(const DftPlan&) = delete;
  ~DftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  int size() const noexcept { return n_; }

  // out[k] = sum_j in[j] exp(-2 pi i j k / n)
  void forward(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) const {
    execute(forward_, in, out);
  }

  // out[j] = sum_k in[k] exp(+2 pi i j k / n)
  void backward(std::span<const std::complex<double>> in,
                std::span<std::complex<double>> out) const {
    execute(backward_, in, out);
  }

  static const DftPlan& get(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<DftPlan>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<DftPlan>(n);
    return *slot;
  }

 private:
  void execute(fftw_plan plan, std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) const {
    if (static_cast<int>(in.size()) != n_ ||
        static_cast<int>(out.size()) != n_) {
      throw std::invalid_argument("DFT length mismatch");
    }
    // Plans are out-of-place; FFTW does not write through the input pointer.
    if (in.data() == out.data()) {
      std::vector<std::complex<double>> tmp(in.begin(), in.end());
      execute(plan, tmp, out);
      return;
    }
    auto* pin = reinterpret_cast<fftw_complex*>(
        const_cast<std::complex<double>*>(in.data()));
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan, pin, pout);
  }

  int n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace fnls::detail
