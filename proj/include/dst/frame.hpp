#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dst {

// A subset of a frame, one bit per element. Bit i corresponds to the
// element with index i in the owning Frame.
using SubsetMask = std::uint32_t;

// Largest supported frame. Dense 2^N tables are used throughout, so this
// bounds memory and the cost of the exact algorithms.
inline constexpr int kMaxFrame = 24;

inline int set_size(SubsetMask a) { return std::popcount(a); }
inline bool subset_of(SubsetMask a, SubsetMask b) { return (a & ~b) == 0; }
inline SubsetMask singleton_mask(int i) { return SubsetMask{1} << i; }
inline SubsetMask full_mask(int n) { return (SubsetMask{1} << n) - 1; }

// Finite frame of discernment: an ordered list of distinct element names.
// Element order is fixed at construction; index i pairs with bit i.
class Frame {
public:
    explicit Frame(std::vector<std::string> labels, int max_size = kMaxFrame)
        : labels_(std::move(labels)) {
        if (labels_.empty()) throw std::invalid_argument("frame: needs at least one element");
        if (static_cast<int>(labels_.size()) > max_size)
            throw std::invalid_argument("frame: more than " + std::to_string(max_size) + " elements");
        for (const auto& l : labels_) {
            if (l.empty()) throw std::invalid_argument("frame: empty element label");
        }
        auto sorted = labels_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("frame: duplicate element label");
    }

    int size() const { return static_cast<int>(labels_.size()); }
    SubsetMask full() const { return full_mask(size()); }
    std::size_t table_size() const { return std::size_t{1} << size(); }

    const std::string& label(int i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }

    // -1 when the name is unknown.
    int index_of(std::string_view name) const {
        for (int i = 0; i < size(); ++i)
            if (labels_[i] == name) return i;
        return -1;
    }

    bool valid_mask(SubsetMask a) const { return subset_of(a, full()); }

    void require_mask(SubsetMask a) const {
        if (!valid_mask(a))
            throw std::invalid_argument("mask has bits outside the frame");
    }

    // "{a,b}" in element order; "{}" for the empty set.
    std::string describe(SubsetMask a) const {
        std::string out = "{";
        bool first = true;
        for (int i = 0; i < size(); ++i) {
            if (a & singleton_mask(i)) {
                if (!first) out += ',';
                out += labels_[i];
                first = false;
            }
        }
        out += '}';
        return out;
    }

    bool operator==(const Frame& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
};

// Partition of a frame into pairwise disjoint non-empty blocks covering it.
class Partition {
public:
    Partition(Frame frame, std::vector<SubsetMask> blocks)
        : frame_(std::move(frame)), blocks_(std::move(blocks)) {
        if (blocks_.empty()) throw std::invalid_argument("partition: no blocks");
        SubsetMask seen = 0;
        for (SubsetMask b : blocks_) {
            if (b == 0) throw std::invalid_argument("partition: empty block");
            frame_.require_mask(b);
            if (b & seen) throw std::invalid_argument("partition: overlapping blocks");
            seen |= b;
        }
        if (seen != frame_.full()) throw std::invalid_argument("partition: blocks do not cover the frame");
    }

    const Frame& frame() const { return frame_; }
    const std::vector<SubsetMask>& blocks() const { return blocks_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }

private:
    Frame frame_;
    std::vector<SubsetMask> blocks_;
};

// Projection of A onto a partition: block i is in the image iff it meets A.
inline SubsetMask project_set(SubsetMask a, const Partition& y) {
    y.frame().require_mask(a);
    SubsetMask out = 0;
    for (int i = 0; i < y.block_count(); ++i)
        if (y.blocks()[i] & a) out |= singleton_mask(i);
    return out;
}

// Frame whose elements are the partition's blocks. Block labels are the
// sorted, comma-joined member labels, so projected files stay readable
// and reproducible.
inline Frame block_frame(const Partition& y) {
    std::vector<std::string> labels;
    labels.reserve(y.block_count());
    for (SubsetMask b : y.blocks()) {
        std::vector<std::string> members;
        for (int i = 0; i < y.frame().size(); ++i)
            if (b & singleton_mask(i)) members.push_back(y.frame().label(i));
        std::sort(members.begin(), members.end());
        std::string l;
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (k) l += ',';
            l += members[k];
        }
        labels.push_back(std::move(l));
    }
    return Frame(std::move(labels));
}

// A P*Q frame crossed by a row partition (P blocks) and a column partition
// (Q blocks); each row block meets each column block in exactly one element.
struct ProductStructure {
    Frame frame;
    Partition rows;
    Partition cols;
};

inline ProductStructure product_structure(int p, int q) {
    if (p < 1 || q < 1) throw std::invalid_argument("product_structure: counts must be positive");
    if (p * q > kMaxFrame)
        throw std::length_error("product_structure: frame capacity exceeded");
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(p) * q);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j)
            labels.push_back("(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    Frame frame(std::move(labels));

    std::vector<SubsetMask> row_blocks(p, 0), col_blocks(q, 0);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) {
            SubsetMask bit = singleton_mask(i * q + j);
            row_blocks[i] |= bit;
            col_blocks[j] |= bit;
        }
    Partition rows(frame, std::move(row_blocks));
    Partition cols(frame, std::move(col_blocks));
    return ProductStructure{std::move(frame), std::move(rows), std::move(cols)};
}

} // namespace dst
