#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>

#include "pcrast/core.hpp"

namespace pcrast {

// Grid of 64-bit cells with a linearizable atomic min, the render target of
// the atomic-min pass. Cells hold packed fragments; a freshly constructed
// or cleared buffer holds kClearFragment everywhere.
class Framebuffer64 {
 public:
  Framebuffer64(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("framebuffer: size must be at least 1x1");
    cells_ = std::make_unique<std::atomic<std::uint64_t>[]>(cell_count());
    clear();
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t cell_count() const { return std::size_t(width_) * std::size_t(height_); }

  std::uint64_t load(std::size_t cell) const { return cells_[cell].load(std::memory_order_relaxed); }

  void store(std::size_t cell, std::uint64_t value) {
    cells_[cell].store(value, std::memory_order_relaxed);
  }

  // min is commutative, associative and idempotent, so the final cell value
  // does not depend on write order or thread count.
  void atomic_min(std::size_t cell, std::uint64_t value) {
    std::atomic<std::uint64_t>& c = cells_[cell];
    std::uint64_t cur = c.load(std::memory_order_relaxed);
    while (value < cur && !c.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
    }
  }

  void clear() {
    for (std::size_t i = 0; i < cell_count(); ++i) store(i, kClearFragment);
  }

 private:
  int width_ = 0, height_ = 0;
  std::unique_ptr<std::atomic<std::uint64_t>[]> cells_;
};

// Per-pixel color sums and fragment counter for the splat blending pass.
class AccumBuffer {
 public:
  AccumBuffer(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("accum buffer: size must be at least 1x1");
    cells_ = std::make_unique<std::atomic<std::uint64_t>[]>(pixel_count() * 4);
    clear();
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return std::size_t(width_) * std::size_t(height_); }

  void add(std::size_t pixel, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::atomic<std::uint64_t>* c = &cells_[pixel * 4];
    c[0].fetch_add(r, std::memory_order_relaxed);
    c[1].fetch_add(g, std::memory_order_relaxed);
    c[2].fetch_add(b, std::memory_order_relaxed);
    c[3].fetch_add(1, std::memory_order_relaxed);
  }

  std::uint64_t sum_r(std::size_t pixel) const { return cells_[pixel * 4].load(std::memory_order_relaxed); }
  std::uint64_t sum_g(std::size_t pixel) const { return cells_[pixel * 4 + 1].load(std::memory_order_relaxed); }
  std::uint64_t sum_b(std::size_t pixel) const { return cells_[pixel * 4 + 2].load(std::memory_order_relaxed); }
  std::uint64_t count(std::size_t pixel) const { return cells_[pixel * 4 + 3].load(std::memory_order_relaxed); }

  void clear() {
    for (std::size_t i = 0; i < pixel_count() * 4; ++i) cells_[i].store(0, std::memory_order_relaxed);
  }

 private:
  int width_ = 0, height_ = 0;
  std::unique_ptr<std::atomic<std::uint64_t>[]> cells_;
};

}  // namespace pcrast
