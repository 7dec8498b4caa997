#include "mimres/autodiff/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace mimres::kernels {
namespace {

const KernelTable* initial_table() {
  if (const char* env = std::getenv("MIMRES_KERNELS")) {
    const std::string_view name(env);
    if (name == "scalar") return &scalar_table();
    if (name == "avx2" && avx2_table() != nullptr) return avx2_table();
  }
  if (const KernelTable* simd = avx2_table()) return simd;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  if (name == "scalar") {
    current().store(&scalar_table(), std::memory_order_release);
    return true;
  }
  if (name == "avx2" && avx2_table() != nullptr) {
    current().store(avx2_table(), std::memory_order_release);
    return true;
  }
  return false;
}

}  // namespace mimres::kernels
