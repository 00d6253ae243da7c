#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace zscomp {

// Bounded top-k selector over a score stream. `Better` is a strict total
// order (better-first); the heap keeps the k best seen so far with the worst
// kept element at the root, so a full sort of the stream is never needed.
template <typename T, typename Better>
class BoundedTopK {
  public:
    explicit BoundedTopK(size_t k, Better better = Better{}) : k_(k), better_(std::move(better)) {
        heap_.reserve(k + 1);
    }

    void push(const T& item) {
        if (k_ == 0) return;
        if (heap_.size() < k_) {
            heap_.push_back(item);
            std::push_heap(heap_.begin(), heap_.end(), better_);
            return;
        }
        if (!better_(item, heap_.front())) return;
        std::pop_heap(heap_.begin(), heap_.end(), better_);
        heap_.back() = item;
        std::push_heap(heap_.begin(), heap_.end(), better_);
    }

    size_t size() const { return heap_.size(); }

    // Destructive: returns the kept elements best-first.
    std::vector<T> take_sorted() {
        std::sort_heap(heap_.begin(), heap_.end(), better_);
        return std::move(heap_);
    }

  private:
    size_t k_;
    Better better_;
    std::vector<T> heap_;
};

} // namespace zscomp
