// Stacked iterate x = (V, a^1, ..., a^D) partitioned into named blocks.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dynsolve {

enum class BlockKind { value, action };

struct BlockSpec {
    std::string id;
    BlockKind kind = BlockKind::value;
    std::size_t size = 0;
};

// Flat vector of reals partitioned into blocks. The layout (ids, kinds,
// lengths, order) is fixed at construction; all arithmetic preserves it.
class BlockVector {
  public:
    BlockVector() = default;
    explicit BlockVector(std::vector<BlockSpec> layout);

    std::size_t n_blocks() const { return layout_.size(); }
    std::size_t size() const { return data_.size(); }
    const BlockSpec& spec(std::size_t b) const { return layout_[b]; }
    const std::vector<BlockSpec>& layout() const { return layout_; }

    std::span<double> block(std::size_t b);
    std::span<const double> block(std::size_t b) const;
    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }

    bool same_layout(const BlockVector& other) const;

    double sup_norm() const;
    bool all_finite() const;

  private:
    std::vector<BlockSpec> layout_;
    std::vector<std::size_t> offsets_;
    std::vector<double> data_;
};

double l2_norm(std::span<const double> v);

} // namespace dynsolve
