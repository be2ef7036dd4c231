#include <catch2/catch_amalgamated.hpp>

#include "dst/frame.hpp"

using namespace dst;

TEST_CASE("mask helpers") {
    CHECK(set_size(0) == 0);
    CHECK(set_size(0b1011) == 3);
    CHECK(subset_of(0b001, 0b011));
    CHECK(subset_of(0b011, 0b011));
    CHECK_FALSE(subset_of(0b100, 0b011));
    CHECK(singleton_mask(0) == 1u);
    CHECK(singleton_mask(3) == 8u);
    CHECK(full_mask(3) == 0b111u);
    CHECK(full_mask(1) == 0b1u);
}

TEST_CASE("frame construction and lookup") {
    Frame f({"a", "b", "c"});
    CHECK(f.size() == 3);
    CHECK(f.full() == 0b111u);
    CHECK(f.table_size() == 8);
    CHECK(f.label(1) == "b");
    CHECK(f.index_of("c") == 2);
    CHECK(f.index_of("z") == -1);
    CHECK(f.describe(0b101) == "{a,c}");
    CHECK(f.describe(0) == "{}");
    CHECK(f.valid_mask(0b111));
    CHECK_FALSE(f.valid_mask(0b1000));
    CHECK_THROWS_AS(f.require_mask(0b1000), std::invalid_argument);

    CHECK_THROWS_AS(Frame({}), std::invalid_argument);
    CHECK_THROWS_AS(Frame({"a", "a"}), std::invalid_argument);
    CHECK_THROWS_AS(Frame({"a", ""}), std::invalid_argument);
    CHECK_THROWS_AS(Frame({"a", "b", "c"}, 2), std::invalid_argument);
    std::vector<std::string> many;
    for (int i = 0; i < kMaxFrame + 1; ++i) many.push_back("e" + std::to_string(i));
    CHECK_THROWS_AS(Frame(many), std::invalid_argument);
}

TEST_CASE("partition validation") {
    Frame f({"1", "2", "3", "4"});
    CHECK_NOTHROW(Partition(f, {0b0011, 0b1100}));
    CHECK_THROWS_AS(Partition(f, {}), std::invalid_argument);
    CHECK_THROWS_AS(Partition(f, {0b0011, 0b0110}), std::invalid_argument);
    CHECK_THROWS_AS(Partition(f, {0b0011}), std::invalid_argument);
    CHECK_THROWS_AS(Partition(f, {0b0011, 0, 0b1100}), std::invalid_argument);
    CHECK_THROWS_AS(Partition(f, {0b0011, 0b11100}), std::invalid_argument);
}

TEST_CASE("project_set") {
    Frame f({"1", "2", "3", "4"});
    Partition y(f, {0b0011, 0b1100});
    CHECK(project_set(0b0101, y) == 0b11u); // {1,3} meets both blocks
    CHECK(project_set(0, y) == 0u);
    CHECK(project_set(f.full(), y) == 0b11u);
    CHECK(project_set(0b0010, y) == 0b01u);
    CHECK_THROWS_AS(project_set(0b10000, y), std::invalid_argument);

    // union homomorphism, exhaustive on the 4-frame
    for (SubsetMask a = 0; a < 16; ++a)
        for (SubsetMask b = 0; b < 16; ++b)
            CHECK(project_set(a | b, y) == (project_set(a, y) | project_set(b, y)));
    for (SubsetMask a = 1; a < 16; ++a) CHECK(project_set(a, y) != 0u);
}

TEST_CASE("block_frame labels") {
    Frame f({"1", "2", "3", "4"});
    Partition y(f, {0b0011, 0b1100});
    Frame bf = block_frame(y);
    REQUIRE(bf.size() == 2);
    CHECK(bf.label(0) == "1,2");
    CHECK(bf.label(1) == "3,4");

    Partition singletons(f, {0b0001, 0b0010, 0b0100, 0b1000});
    CHECK(block_frame(singletons).size() == 4);
    Partition whole(f, {f.full()});
    CHECK(block_frame(whole).size() == 1);
}

TEST_CASE("product_structure") {
    ProductStructure s = product_structure(2, 2);
    CHECK(s.frame.size() == 4);
    CHECK(s.frame.label(0) == "(1,1)");
    CHECK(s.frame.label(3) == "(2,2)");
    CHECK(s.rows.block_count() == 2);
    CHECK(s.cols.block_count() == 2);

    ProductStructure row = product_structure(1, 3);
    CHECK(row.rows.block_count() == 1);
    CHECK(row.rows.blocks()[0] == row.frame.full());
    CHECK(row.cols.block_count() == 3);

    ProductStructure s32 = product_structure(3, 2);
    for (SubsetMask a : s32.rows.blocks())
        for (SubsetMask b : s32.cols.blocks()) CHECK(set_size(a & b) == 1);

    CHECK_THROWS_AS(product_structure(5, 5), std::length_error);
    CHECK_THROWS_AS(product_structure(0, 3), std::invalid_argument);
}
