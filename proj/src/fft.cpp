#include "ssp3d/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <fftw3.h>

namespace ssp3d {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<fftw_complex> a(static_cast<size_t>(rows) * cols);
    std::vector<fftw_complex> b(a.size());
    // FFTW_UNALIGNED keeps results independent of buffer alignment, so the
    // same input always produces bit-identical output.
    fftw_plan plan = fftw_plan_dft_2d(rows, cols, a.data(), b.data(), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    if (!plan) throw std::runtime_error("fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

CArray transform(const CArray& in, int sign) {
  const int rows = static_cast<int>(in.rows());
  const int cols = static_cast<int>(in.cols());
  CArray out(rows, cols);
  if (in.size() == 0) return out;
  fftw_plan plan = cache().get(rows, cols, sign);
  // FFTW does not write to the input for out-of-place c2c transforms.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
  out *= 1.0 / std::sqrt(static_cast<double>(in.size()));
  return out;
}

}  // namespace

CArray fft2(const CArray& in) { return transform(in, FFTW_FORWARD); }
CArray ifft2(const CArray& in) { return transform(in, FFTW_BACKWARD); }

CArray fft2c(const CArray& in) { return fftshift(fft2(ifftshift(in))); }
CArray ifft2c(const CArray& in) { return fftshift(ifft2(ifftshift(in))); }

}  // namespace ssp3d
