#include "wmn/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace wmn::fft {
namespace {

// The FFTW planner is not thread-safe; fftw_execute_dft on an existing plan is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

std::vector<cplx> transform(std::span<const cplx> x, int sign) {
  if (x.empty()) return {};
  std::vector<cplx> in(x.begin(), x.end());
  std::vector<cplx> out(x.size());
  fftw_plan plan = cache().get(static_cast<int>(x.size()), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<cplx> forward(std::span<const cplx> x) { return transform(x, FFTW_FORWARD); }

std::vector<cplx> backward(std::span<const cplx> x) { return transform(x, FFTW_BACKWARD); }

}  // namespace wmn::fft
