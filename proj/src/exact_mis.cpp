#include "mis/exact.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <vector>

namespace mis {
namespace {

// Maximum clique of the complement graph, Tomita-style colouring bound.
// `kWords` fixes the row width at compile time (1 for n <= 64); 0 means the
// width is only known at run time.
template <std::size_t kWords>
class CliqueSearch {
 public:
  CliqueSearch(const Graph& g, std::uint64_t budget) : n_(g.n()), budget_(budget) {
    words_ = kWords ? kWords : (static_cast<std::size_t>(n_) + 63) / 64;

    // Initial order: decreasing degree in the complement, ties by id.
    std::vector<int> comp_degree(n_);
    for (int v = 0; v < n_; ++v) comp_degree[v] = n_ - 1 - g.degree(v + 1);
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return comp_degree[a] > comp_degree[b]; });

    // Row i of `comp_` is the complement neighbourhood of order_[i], in the
    // permuted numbering.
    comp_.assign(words_ * static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (i != j && !g.adjacent(order_[i] + 1, order_[j] + 1)) set_bit(row(i), j);
  }

  ExactResult run() {
    std::vector<std::uint64_t> p(words_, 0);
    for (int i = 0; i < n_; ++i) set_bit(p.data(), i);
    current_.clear();
    expand(p);

    ExactResult out;
    out.status = aborted_ ? ExactResult::Status::unknown : ExactResult::Status::optimal;
    std::vector<VertexId> ids;
    for (int i : best_) ids.push_back(order_[i] + 1);
    out.witness = VertexSet(std::move(ids));
    out.alpha = static_cast<int>(out.witness.size());
    out.nodes = nodes_;
    return out;
  }

 private:
  std::uint64_t* row(int i) { return comp_.data() + static_cast<std::size_t>(i) * words_; }
  static void set_bit(std::uint64_t* bits, int i) { bits[i / 64] |= 1ULL << (i % 64); }
  static void clear_bit(std::uint64_t* bits, int i) { bits[i / 64] &= ~(1ULL << (i % 64)); }

  bool any(const std::uint64_t* bits) const {
    for (std::size_t w = 0; w < words_; ++w)
      if (bits[w]) return true;
    return false;
  }
  int lowest(const std::uint64_t* bits) const {
    for (std::size_t w = 0; w < words_; ++w)
      if (bits[w]) return static_cast<int>(w * 64) + std::countr_zero(bits[w]);
    return -1;
  }

  // Greedy sequential colouring of P; vertices come out in non-decreasing
  // colour order, so the last one carries the largest bound.
  void colour(const std::vector<std::uint64_t>& p, std::vector<int>& verts, std::vector<int>& colours) {
    std::vector<std::uint64_t> uncoloured = p, q(words_);
    int c = 0;
    while (any(uncoloured.data())) {
      ++c;
      q = uncoloured;
      while (any(q.data())) {
        const int v = lowest(q.data());
        clear_bit(q.data(), v);
        clear_bit(uncoloured.data(), v);
        const std::uint64_t* nb = row(v);
        for (std::size_t w = 0; w < words_; ++w) q[w] &= ~nb[w];
        verts.push_back(v);
        colours.push_back(c);
      }
    }
  }

  void expand(std::vector<std::uint64_t>& p) {
    if (aborted_) return;
    if (++nodes_ > budget_) {
      aborted_ = true;
      return;
    }
    std::vector<int> verts, colours;
    colour(p, verts, colours);
    std::vector<std::uint64_t> next(words_);
    for (std::size_t idx = verts.size(); idx-- > 0;) {
      if (current_.size() + static_cast<std::size_t>(colours[idx]) <= best_.size()) return;
      const int v = verts[idx];
      current_.push_back(v);
      const std::uint64_t* nb = row(v);
      bool empty = true;
      for (std::size_t w = 0; w < words_; ++w) {
        next[w] = p[w] & nb[w];
        empty = empty && next[w] == 0;
      }
      if (empty) {
        if (current_.size() > best_.size()) best_ = current_;
      } else {
        expand(next);
      }
      current_.pop_back();
      clear_bit(p.data(), v);
      if (aborted_) return;
    }
  }

  int n_;
  std::size_t words_ = 0;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::vector<int> order_;
  std::vector<std::uint64_t> comp_;
  std::vector<int> current_, best_;
};

}  // namespace

ExactResult exact_mis(const Graph& g, std::uint64_t budget) {
  if (g.n() == 0) return ExactResult{};
  if (g.n() <= 64) return CliqueSearch<1>(g, budget).run();
  return CliqueSearch<0>(g, budget).run();
}

}  // namespace mis
