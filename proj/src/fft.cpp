#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace vibshape::detail {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> input) {
  const auto n = input.size();
  std::vector<double> in(input.begin(), input.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  if (n == 0) return out;
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  // c2r destroys its input.
  std::vector<std::complex<double>> in(n / 2 + 1);
  std::copy_n(spectrum.begin(), std::min(spectrum.size(), in.size()), in.begin());
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                    reinterpret_cast<fftw_complex*>(in.data()),
                                    out.data(), FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace vibshape::detail
