#include "dynsolve/block_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace dynsolve {

BlockVector::BlockVector(std::vector<BlockSpec> layout) : layout_(std::move(layout)) {
    offsets_.reserve(layout_.size());
    std::size_t total = 0;
    for (const auto& b : layout_) {
        if (b.size == 0) throw std::invalid_argument("BlockVector: empty block '" + b.id + "'");
        offsets_.push_back(total);
        total += b.size;
    }
    data_.assign(total, 0.0);
}

std::span<double> BlockVector::block(std::size_t b) {
    return {data_.data() + offsets_.at(b), layout_[b].size};
}

std::span<const double> BlockVector::block(std::size_t b) const {
    return {data_.data() + offsets_.at(b), layout_[b].size};
}

bool BlockVector::same_layout(const BlockVector& other) const {
    if (layout_.size() != other.layout_.size()) return false;
    for (std::size_t b = 0; b < layout_.size(); ++b) {
        if (layout_[b].id != other.layout_[b].id || layout_[b].kind != other.layout_[b].kind ||
            layout_[b].size != other.layout_[b].size)
            return false;
    }
    return true;
}

double BlockVector::sup_norm() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool BlockVector::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace dynsolve
